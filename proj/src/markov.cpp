#include "brickshadows/markov.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "brickshadows/brickwork.hpp"
#include "brickshadows/channel.hpp"
#include "brickshadows/clifford.hpp"

namespace brickshadows {

namespace {

long ipow(long base, int exp) {
  long r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// all state indices whose digits at the given qubits are zero
std::vector<long> base_indices(int n, int ldim, int q1, int q2) {
  std::vector<int> pos;
  for (int q = 0; q < n; ++q)
    if (q != q1 && q != q2) pos.push_back(q);
  std::vector<long> strides(pos.size());
  for (size_t i = 0; i < pos.size(); ++i) strides[i] = ipow(ldim, pos[i]);
  const long count = ipow(ldim, static_cast<int>(pos.size()));
  std::vector<long> out(count);
  for (long c = 0; c < count; ++c) {
    long rem = c, idx = 0;
    for (size_t i = 0; i < pos.size(); ++i) {
      idx += (rem % ldim) * strides[i];
      rem /= ldim;
    }
    out[c] = idx;
  }
  return out;
}

// kernel indexed by l_q1 + ldim * l_q2 on both axes
void apply_two_site(Eigen::VectorXd& v, int n, int ldim, int q1, int q2, const Eigen::MatrixXd& k) {
  const long s1 = ipow(ldim, q1);
  const long s2 = ipow(ldim, q2);
  const int pd = ldim * ldim;
  const auto bases = base_indices(n, ldim, q1, q2);
  const int chunk = 512;
  Eigen::MatrixXd x(pd, chunk), y(pd, chunk);
  for (size_t start = 0; start < bases.size(); start += chunk) {
    const int b = static_cast<int>(std::min<size_t>(chunk, bases.size() - start));
    for (int j = 0; j < b; ++j) {
      const long base = bases[start + j];
      for (int l2 = 0; l2 < ldim; ++l2)
        for (int l1 = 0; l1 < ldim; ++l1) x(l1 + ldim * l2, j) = v[base + l1 * s1 + l2 * s2];
    }
    y.leftCols(b).noalias() = k * x.leftCols(b);
    for (int j = 0; j < b; ++j) {
      const long base = bases[start + j];
      for (int l2 = 0; l2 < ldim; ++l2)
        for (int l1 = 0; l1 < ldim; ++l1) v[base + l1 * s1 + l2 * s2] = y(l1 + ldim * l2, j);
    }
  }
}

void apply_one_site(Eigen::VectorXd& v, int n, int ldim, int q, const Eigen::MatrixXd& k) {
  const long s = ipow(ldim, q);
  const long total = ipow(ldim, n);
  Eigen::VectorXd x(ldim);
  for (long idx = 0; idx < total; ++idx) {
    if ((idx / s) % ldim != 0) continue;
    for (int l = 0; l < ldim; ++l) x(l) = v[idx + l * s];
    x = k * x;
    for (int l = 0; l < ldim; ++l) v[idx + l * s] = x(l);
  }
}

// co-vector pass: terminal indicator pulled back through the layers, using the
// symmetry of group conjugation kernels
Eigen::VectorXd propagate(int n, int d, int ldim, const Eigen::VectorXd& terminal_site,
                          const Eigen::MatrixXd& gate_kernel, const Eigen::MatrixXd& site_kernel) {
  const long total = ipow(ldim, n);
  Eigen::VectorXd v(total);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    double val = 1.0;
    for (int q = 0; q < n; ++q) {
      val *= terminal_site(rem % ldim);
      rem /= ldim;
    }
    v[idx] = val;
  }
  for (int layer = d; layer >= 1; --layer) {
    for (const auto& [q1, q2] : brickwork_pairs(n, layer)) {
      apply_two_site(v, n, ldim, q1, q2, gate_kernel);
    }
  }
  for (int q = 0; q < n; ++q) apply_one_site(v, n, ldim, q, site_kernel);
  return v;
}

}  // namespace

Eigen::VectorXd DenseMarkovOracle::all_eigenvalues(int n, int d) {
  if (n < 2 || n % 2 != 0 || n > 10) throw std::invalid_argument("oracle supports even n up to 10");
  if (d < 0) throw std::invalid_argument("oracle needs a finite depth");
  const auto& groups = CliffordGroups::instance();
  Eigen::VectorXd z_type(4);
  for (int l = 0; l < 4; ++l) z_type(l) = ((l >> 1) & 1) == 0 ? 1.0 : 0.0;
  // pack2 already orders a gate's first qubit as the low digit
  return propagate(n, d, 4, z_type, groups.kernel2(), groups.kernel1());
}

Eigen::VectorXd DenseMarkovOracle::all_pair_values(int n, int d) {
  if (n < 2 || n % 2 != 0 || n > 6) throw std::invalid_argument("pair oracle supports even n up to 6");
  if (d < 0) throw std::invalid_argument("oracle needs a finite depth");
  // repack the pair kernel from first*16+second to low-digit-first
  const Eigen::MatrixXd& pg = pair_gate_kernel();
  Eigen::MatrixXd repacked(256, 256);
  auto flip = [](int i) { return (i % 16) * 16 + i / 16; };
  for (int r = 0; r < 256; ++r)
    for (int c = 0; c < 256; ++c) repacked(r, c) = pg(flip(r), flip(c));
  return propagate(n, d, 16, pair_terminal(), repacked, pair_site_kernel());
}

}  // namespace brickshadows
