#include "brickshadows/channel.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "brickshadows/brickwork.hpp"
#include "brickshadows/clifford.hpp"

namespace brickshadows {

namespace {

long ipow(long base, int exp) {
  long r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

int x_bit(int label) { return (label >> 1) & 1; }

std::filesystem::path cache_directory() {
  const char* env = std::getenv("BRICKSHADOWS_CACHE_DIR");
  if (env == nullptr || *env == '\0') return {};
  return std::filesystem::path(env);
}

constexpr char kCacheMagic[4] = {'B', 'S', 'G', 'K'};
constexpr uint32_t kCacheVersion = 1;

bool load_kernel_cache(const std::filesystem::path& file, Eigen::MatrixXd* out) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return false;
  char magic[4];
  uint32_t version = 0, dim = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  if (!in || std::memcmp(magic, kCacheMagic, 4) != 0 || version != kCacheVersion) return false;
  if (dim != static_cast<uint32_t>(out->rows()) || dim != static_cast<uint32_t>(out->cols())) return false;
  in.read(reinterpret_cast<char*>(out->data()), static_cast<std::streamsize>(sizeof(double)) * dim * dim);
  return static_cast<bool>(in);
}

void store_kernel_cache(const std::filesystem::path& file, const Eigen::MatrixXd& m) {
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) return;  // cache is best effort
  const uint32_t dim = static_cast<uint32_t>(m.rows());
  out.write(kCacheMagic, 4);
  out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double)) * dim * dim);
}

void check_even_qubits(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("qubit count must be even and at least 2");
}

}  // namespace

Eigen::MatrixXd signature_gate_kernel() {
  const Eigen::MatrixXd k2 = CliffordGroups::instance().kernel2();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(4, 4);
  // representatives per input pair; signature of a packed label (l1, l2) is
  // ([l1 != 0], [l2 != 0])
  for (int i1 = 0; i1 < 2; ++i1) {
    for (int i2 = 0; i2 < 2; ++i2) {
      const int rep = pack2(i1, i2);  // Z factors stand in for any support
      for (int m = 0; m < 16; ++m) {
        const int o1 = (m & 3) != 0;
        const int o2 = ((m >> 2) & 3) != 0;
        k(o1 * 2 + o2, i1 * 2 + i2) += k2(m, rep);
      }
    }
  }
  return k;
}

Eigen::Vector2d signature_terminal() {
  const Eigen::MatrixXd k1 = CliffordGroups::instance().kernel1();
  Eigen::Vector2d w;
  w(0) = 1.0;
  w(1) = 0.0;
  for (int m = 0; m < 4; ++m) {
    if (x_bit(m) == 0) w(1) += k1(m, 1);  // scrambled Z read out in the Z basis
  }
  return w;
}

const Eigen::MatrixXd& pair_gate_kernel() {
  static const Eigen::MatrixXd kernel = [] {
    Eigen::MatrixXd m(256, 256);
    const auto dir = cache_directory();
    const auto file = dir / "pair-kernel-v1.bin";
    if (!dir.empty() && load_kernel_cache(file, &m)) return m;

    const Eigen::MatrixXd jk = CliffordGroups::instance().joint_kernel2();
    // reindex from (pauli A packed, pauli B packed) to per-qubit joint labels
    std::array<int, 256> perm{};
    for (int a = 0; a < 16; ++a) {
      for (int b = 0; b < 16; ++b) {
        const int m1 = 4 * (a & 3) + (b & 3);
        const int m2 = 4 * ((a >> 2) & 3) + ((b >> 2) & 3);
        perm[a * 16 + b] = m1 * 16 + m2;
      }
    }
    for (int r = 0; r < 256; ++r)
      for (int c = 0; c < 256; ++c) m(perm[r], perm[c]) = jk(r, c);

    if (!dir.empty()) store_kernel_cache(file, m);
    return m;
  }();
  return kernel;
}

Eigen::MatrixXd pair_site_kernel() {
  // joint label packing 4*g + g' already matches the per-qubit layout
  return CliffordGroups::instance().joint_kernel1();
}

Eigen::VectorXd pair_terminal() {
  Eigen::VectorXd v(16);
  for (int m = 0; m < 16; ++m) v(m) = (x_bit(m >> 2) == 0 && x_bit(m & 3) == 0) ? 1.0 : 0.0;
  return v;
}

std::vector<uint8_t> pair_signature(const PauliString& p) {
  check_even_qubits(p.num_qubits());
  std::vector<uint8_t> sig(p.num_qubits() / 2);
  for (size_t j = 0; j < sig.size(); ++j) {
    sig[j] = (p.label(2 * j) != 0 || p.label(2 * j + 1) != 0) ? 1 : 0;
  }
  return sig;
}

SiteTensor build_brickwork_cell(int d, int w, const Eigen::MatrixXd& kernel,
                                const Eigen::VectorXd& terminal) {
  if (d < 1) throw std::invalid_argument("cell depth must be at least 1");
  if (kernel.rows() != w * w || kernel.cols() != w * w || terminal.size() != w)
    throw std::invalid_argument("kernel or terminal shape mismatch");

  const long bond = ipow(w, d - 1);
  SiteTensor cell(static_cast<size_t>(w) * w, Eigen::MatrixXd::Zero(bond, bond));

  // terminal contracted over a gate's two outputs, leaving the input pair
  Eigen::VectorXd closed(w * w);
  for (int col = 0; col < w * w; ++col) {
    double s = 0.0;
    for (int o1 = 0; o1 < w; ++o1)
      for (int o2 = 0; o2 < w; ++o2) s += kernel(o1 * w + o2, col) * terminal(o1) * terminal(o2);
    closed(col) = s;
  }

  for (int ib = 0; ib < w; ++ib) {
    for (int ic = 0; ic < w; ++ic) {
      // amplitudes over [appended boundary states ..., inner wire state]; the
      // boundary states become bond digits, appended most significant first
      std::vector<double> acc(static_cast<size_t>(w), 0.0);
      acc[ib] = 1.0;
      long ext = 1;
      std::vector<int> ext_side;   // 0 left wire, 1 right wire
      std::vector<int> ext_layer;  // which layer's post-state

      for (int l = 1; l <= d; ++l) {
        const bool oddlayer = (l % 2) == 1;
        const bool before_is_phys = (l == 1);  // right wire starts in ic
        const bool last = (l == d);
        const int side = oddlayer ? 1 : 0;
        const int before_count = before_is_phys ? 1 : w;
        if (!before_is_phys) {
          ext_side.push_back(side);
          ext_layer.push_back(l - 1);
        }
        if (!last) {
          ext_side.push_back(side);
          ext_layer.push_back(l);
        }

        if (last) {
          std::vector<double> nxt(static_cast<size_t>(ext) * before_count, 0.0);
          for (long e = 0; e < ext; ++e) {
            for (int before = 0; before < before_count; ++before) {
              const int bval = before_is_phys ? ic : before;
              double s = 0.0;
              for (int bp = 0; bp < w; ++bp) {
                const int col = oddlayer ? bp * w + bval : bval * w + bp;
                s += acc[e * w + bp] * closed(col);
              }
              nxt[e * before_count + before] = s;
            }
          }
          acc.swap(nxt);
          ext *= before_count;
        } else {
          std::vector<double> nxt(static_cast<size_t>(ext) * before_count * w * w, 0.0);
          for (long e = 0; e < ext; ++e) {
            for (int before = 0; before < before_count; ++before) {
              const int bval = before_is_phys ? ic : before;
              for (int after = 0; after < w; ++after) {
                const long eo = (e * before_count + before) * w + after;
                for (int bl = 0; bl < w; ++bl) {
                  const int row = oddlayer ? bl * w + after : after * w + bl;
                  double s = 0.0;
                  for (int bp = 0; bp < w; ++bp) {
                    const int col = oddlayer ? bp * w + bval : bval * w + bp;
                    s += acc[e * w + bp] * kernel(row, col);
                  }
                  nxt[eo * w + bl] = s;
                }
              }
            }
          }
          acc.swap(nxt);
          ext *= static_cast<long>(before_count) * w;
        }
      }

      // scatter appended digits into the canonical bond packing, layer 1 least
      // significant on each side
      const int k = static_cast<int>(ext_side.size());
      Eigen::MatrixXd& target = cell[static_cast<size_t>(ib) * w + ic];
      for (long e = 0; e < ext; ++e) {
        long rem = e, row = 0, col = 0;
        for (int i = k - 1; i >= 0; --i) {
          const int digit = static_cast<int>(rem % w);
          rem /= w;
          const long place = ipow(w, ext_layer[i] - 1);
          if (ext_side[i] == 0)
            row += digit * place;
          else
            col += digit * place;
        }
        target(row, col) = acc[e];
      }
    }
  }
  return cell;
}

EigenvalueMPS::EigenvalueMPS(int n, int d, PeriodicMPS inner) : n_(n), d_(d), inner_(std::move(inner)) {
  check_even_qubits(n);
  if (inner_.num_sites() != n / 2) throw std::invalid_argument("signature MPS has wrong site count");
}

double EigenvalueMPS::value_on_signature(const std::vector<uint8_t>& h) const {
  return inner_.evaluate(h);
}

double EigenvalueMPS::value(const PauliString& p) const {
  if (p.num_qubits() != n_) throw std::invalid_argument("qubit count mismatch");
  return inner_.evaluate(pair_signature(p));
}

EigenvalueMPS build_t_mps(int n, int d) {
  check_even_qubits(n);
  if (d < 1) throw std::invalid_argument("depth must be at least 1 for the eigenvalue MPS");
  SiteTensor cell = build_brickwork_cell(d, 2, signature_gate_kernel(), signature_terminal());
  // every supported input pair is equivalent, keep one representative
  for (int p : {1, 2}) {
    if (((cell[p] - cell[3]).cwiseAbs().maxCoeff()) != 0.0)
      throw std::logic_error("support-indicator cell is not OR-invariant");
  }
  SiteTensor site{cell[0], cell[3]};
  std::vector<SiteTensor> sites(static_cast<size_t>(n / 2), site);
  return EigenvalueMPS(n, d, PeriodicMPS(std::move(sites)));
}

double t_value(const PauliString& p, int d, const EigenvalueMPS* mps) {
  if (d == 0) {
    const int w = p.weight();
    double denom = 1.0;
    for (int i = 0; i < w; ++i) denom *= 3.0;
    return 1.0 / denom;
  }
  if (d == kDepthInfinite) {
    if (p.is_identity()) return 1.0;
    return 1.0 / (std::ldexp(1.0, p.num_qubits()) + 1.0);
  }
  if (d < 0) throw std::invalid_argument("invalid depth");
  if (mps == nullptr || mps->depth() != d || mps->num_qubits() != p.num_qubits())
    throw std::invalid_argument("eigenvalue MPS missing or built for different parameters");
  return mps->value(p);
}

PairEigenvalueMPS::PairEigenvalueMPS(int n, int d, SiteTensor cell)
    : n_(n), d_(d), cell_(std::move(cell)) {
  check_even_qubits(n);
  if (d < 1) throw std::invalid_argument("pair MPS requires depth at least 1");
  if (cell_.size() != 256) throw std::invalid_argument("pair cell must have 256 physical slices");
  const long bond = cell_[0].rows();
  for (const auto& m : cell_) {
    if (m.rows() != bond || m.cols() != bond) throw std::invalid_argument("pair cell must be square");
  }
}

int PairEigenvalueMPS::bond_dim() const { return static_cast<int>(cell_[0].rows()); }

double PairEigenvalueMPS::value(const PauliString& a, const PauliString& b) const {
  if (a.num_qubits() != n_ || b.num_qubits() != n_) throw std::invalid_argument("qubit count mismatch");
  auto joint = [&](int q) { return 4 * a.label(q) + b.label(q); };
  Eigen::MatrixXd m = cell_[static_cast<size_t>(joint(0)) * 16 + joint(1)];
  for (int j = 1; j < n_ / 2; ++j) {
    m = m * cell_[static_cast<size_t>(joint(2 * j)) * 16 + joint(2 * j + 1)];
  }
  return m.trace();
}

PeriodicMPS PairEigenvalueMPS::to_qubit_mps() const {
  if (d_ > 2) throw std::invalid_argument("per-qubit pair form supported for depth <= 2");
  const long chi = cell_[0].rows();
  SiteTensor even(16), odd(16);
  for (int m1 = 0; m1 < 16; ++m1) {
    Eigen::MatrixXd de = Eigen::MatrixXd::Zero(chi, chi * 16);
    for (long l = 0; l < chi; ++l) de(l, l * 16 + m1) = 1.0;
    even[m1] = std::move(de);
  }
  for (int m2 = 0; m2 < 16; ++m2) {
    Eigen::MatrixXd dn(chi * 16, chi);
    for (long l = 0; l < chi; ++l)
      for (int m1 = 0; m1 < 16; ++m1) dn.row(l * 16 + m1) = cell_[m1 * 16 + m2].row(l);
    odd[m2] = std::move(dn);
  }
  std::vector<SiteTensor> sites;
  sites.reserve(static_cast<size_t>(n_));
  for (int j = 0; j < n_ / 2; ++j) {
    sites.push_back(even);
    sites.push_back(odd);
  }
  return PeriodicMPS(std::move(sites));
}

PairEigenvalueMPS build_tau_mps(int n, int d) {
  check_even_qubits(n);
  if (d < 1 || d > kMaxTauDepth) throw std::invalid_argument("pair MPS depth out of supported range");
  return PairEigenvalueMPS(n, d, build_brickwork_cell(d, 16, pair_gate_kernel(), pair_terminal()));
}

double tau_value(const PauliString& a, const PauliString& b, int d, const PairEigenvalueMPS* mps) {
  if (a.num_qubits() != b.num_qubits()) throw std::invalid_argument("qubit count mismatch");
  if (d == 0) {
    static const Eigen::VectorXd site_weight = [] {
      Eigen::VectorXd w = pair_site_kernel().transpose() * pair_terminal();
      return w;
    }();
    double v = 1.0;
    for (int q = 0; q < a.num_qubits(); ++q) v *= site_weight(4 * a.label(q) + b.label(q));
    return v;
  }
  if (d == kDepthInfinite) throw std::invalid_argument("deep-limit pair probabilities are not supported");
  if (d < 0) throw std::invalid_argument("invalid depth");
  if (mps == nullptr || mps->depth() != d || mps->num_qubits() != a.num_qubits())
    throw std::invalid_argument("pair MPS missing or built for different parameters");
  return mps->value(a, b);
}

PeriodicMPS lift_to_pauli_mps(const PeriodicMPS& sig, int n) {
  check_even_qubits(n);
  if (sig.num_sites() != n / 2) throw std::invalid_argument("signature MPS has wrong site count");
  std::vector<SiteTensor> sites;
  sites.reserve(static_cast<size_t>(n));
  for (int j = 0; j < n / 2; ++j) {
    if (sig.phys_dim(j) != 2) throw std::invalid_argument("signature MPS must have physical dimension 2");
    const long chi = sig.site(j)[0].rows();
    SiteTensor first(4), second(4);
    for (int l = 0; l < 4; ++l) {
      const int s = l != 0 ? 1 : 0;
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(chi, chi * 2);
      for (long c = 0; c < chi; ++c) a(c, c * 2 + s) = 1.0;
      first[l] = std::move(a);
      const long cols = sig.site(j)[0].cols();
      Eigen::MatrixXd b(chi * 2, cols);
      for (long c = 0; c < chi; ++c)
        for (int sb = 0; sb < 2; ++sb) b.row(c * 2 + sb) = sig.site(j)[sb | s].row(c);
      second[l] = std::move(b);
    }
    sites.push_back(std::move(first));
    sites.push_back(std::move(second));
  }
  return PeriodicMPS(std::move(sites));
}

PeriodicMPS lift_depth0(int n, bool inverse) {
  check_even_qubits(n);
  const double v = inverse ? 3.0 : 1.0 / 3.0;
  std::vector<std::vector<double>> vals(static_cast<size_t>(n), {1.0, v, v, v});
  return PeriodicMPS::product(vals);
}

PeriodicMPS lift_depth_infinite(int n, bool inverse) {
  check_even_qubits(n);
  const double full = std::ldexp(1.0, n);  // 2^n
  const double flat = inverse ? full + 1.0 : 1.0 / (full + 1.0);
  const double iden = inverse ? -full : full / (full + 1.0);
  const double a = std::pow(flat, 1.0 / n);
  const double c = std::pow(std::abs(iden), 1.0 / n);
  std::vector<SiteTensor> sites;
  sites.reserve(static_cast<size_t>(n));
  for (int q = 0; q < n; ++q) {
    const double sign = (q == 0 && iden < 0) ? -1.0 : 1.0;
    SiteTensor site(4);
    for (int l = 0; l < 4; ++l) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2, 2);
      m(0, 0) = a;
      if (l == 0) m(1, 1) = sign * c;
      site[l] = std::move(m);
    }
    sites.push_back(std::move(site));
  }
  return PeriodicMPS(std::move(sites));
}

PeriodicMPS apply_channel(const PeriodicMPS& alpha, const EigenvalueMPS& t, bool invert,
                          const PeriodicMPS* inverse_sig) {
  const int n = alpha.num_sites();
  if (n != t.num_qubits()) throw std::invalid_argument("qubit count mismatch");
  if (invert) {
    if (inverse_sig == nullptr) throw std::invalid_argument("inversion requires an inverse MPS");
    return PeriodicMPS::hadamard(alpha, lift_to_pauli_mps(*inverse_sig, n));
  }
  return PeriodicMPS::hadamard(alpha, lift_to_pauli_mps(t.inner(), n));
}

}  // namespace brickshadows
