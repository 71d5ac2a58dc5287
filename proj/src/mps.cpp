#include "brickshadows/mps.hpp"

#include <json.hpp>
#include <stdexcept>

namespace brickshadows {

using json = nlohmann::json;

PeriodicMPS::PeriodicMPS(std::vector<SiteTensor> sites) : sites_(std::move(sites)) {
  check_consistent();
}

void PeriodicMPS::check_consistent() const {
  if (sites_.empty()) throw std::invalid_argument("MPS needs at least one site");
  const int N = num_sites();
  for (int j = 0; j < N; ++j) {
    if (sites_[j].empty()) throw std::invalid_argument("site with no physical values");
    const auto rows = sites_[j][0].rows();
    const auto cols = sites_[j][0].cols();
    for (const auto& m : sites_[j])
      if (m.rows() != rows || m.cols() != cols)
        throw std::invalid_argument("ragged site tensor");
    const auto& next = sites_[(j + 1) % N][0];
    if (cols != next.rows()) throw std::invalid_argument("bond dimension mismatch between sites");
  }
}

int PeriodicMPS::bond_dim(int j) const {
  const int N = num_sites();
  return static_cast<int>(sites_[((j % N) + N) % N][0].rows());
}

int PeriodicMPS::max_bond() const {
  int b = 0;
  for (int j = 0; j < num_sites(); ++j) b = std::max(b, bond_dim(j));
  return b;
}

double PeriodicMPS::evaluate(std::span<const int> index) const {
  if (static_cast<int>(index.size()) != num_sites())
    throw std::invalid_argument("evaluate: index length mismatch");
  for (int j = 0; j < num_sites(); ++j)
    if (index[j] < 0 || index[j] >= phys_dim(j))
      throw std::out_of_range("evaluate: physical index out of range");
  Eigen::MatrixXd prod = sites_[0][index[0]];
  for (int j = 1; j < num_sites(); ++j) prod = prod * sites_[j][index[j]];
  return prod.trace();
}

double PeriodicMPS::evaluate(const std::vector<uint8_t>& index) const {
  std::vector<int> idx(index.begin(), index.end());
  return evaluate(std::span<const int>(idx));
}

double PeriodicMPS::sum_all() const {
  Eigen::MatrixXd prod;
  for (int j = 0; j < num_sites(); ++j) {
    Eigen::MatrixXd t = sites_[j][0];
    for (int v = 1; v < phys_dim(j); ++v) t += sites_[j][v];
    prod = (j == 0) ? t : Eigen::MatrixXd(prod * t);
  }
  return prod.trace();
}

PeriodicMPS PeriodicMPS::hadamard(const PeriodicMPS& a, const PeriodicMPS& b) {
  if (a.num_sites() != b.num_sites())
    throw std::invalid_argument("hadamard: site count mismatch");
  std::vector<SiteTensor> sites(a.num_sites());
  for (int j = 0; j < a.num_sites(); ++j) {
    if (a.phys_dim(j) != b.phys_dim(j))
      throw std::invalid_argument("hadamard: physical dimension mismatch");
    sites[j].resize(a.phys_dim(j));
    for (int v = 0; v < a.phys_dim(j); ++v) {
      const Eigen::MatrixXd& A = a.sites_[j][v];
      const Eigen::MatrixXd& B = b.sites_[j][v];
      Eigen::MatrixXd k(A.rows() * B.rows(), A.cols() * B.cols());
      for (Eigen::Index r = 0; r < A.rows(); ++r)
        for (Eigen::Index c = 0; c < A.cols(); ++c)
          k.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
      sites[j][v] = std::move(k);
    }
  }
  return PeriodicMPS(std::move(sites));
}

double PeriodicMPS::sum_product(std::span<const PeriodicMPS* const> factors) {
  if (factors.empty()) throw std::invalid_argument("sum_product: no factors");
  const int N = factors[0]->num_sites();
  for (const PeriodicMPS* f : factors) {
    if (f->num_sites() != N) throw std::invalid_argument("sum_product: site count mismatch");
  }
  Eigen::MatrixXd prod;
  for (int j = 0; j < N; ++j) {
    const int p = factors[0]->phys_dim(j);
    for (const PeriodicMPS* f : factors)
      if (f->phys_dim(j) != p)
        throw std::invalid_argument("sum_product: physical dimension mismatch");
    Eigen::MatrixXd t;
    for (int v = 0; v < p; ++v) {
      Eigen::MatrixXd k = factors[0]->sites_[j][v];
      for (size_t f = 1; f < factors.size(); ++f) {
        const Eigen::MatrixXd& B = factors[f]->sites_[j][v];
        Eigen::MatrixXd nk(k.rows() * B.rows(), k.cols() * B.cols());
        for (Eigen::Index r = 0; r < k.rows(); ++r)
          for (Eigen::Index c = 0; c < k.cols(); ++c)
            nk.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = k(r, c) * B;
        k = std::move(nk);
      }
      if (v == 0)
        t = k;
      else
        t += k;
    }
    prod = (j == 0) ? t : Eigen::MatrixXd(prod * t);
  }
  return prod.trace();
}

double PeriodicMPS::frobenius_sq() const {
  const PeriodicMPS* fs[2] = {this, this};
  return sum_product(fs);
}

double PeriodicMPS::transfer_magnitude() const {
  Eigen::MatrixXd prod;
  double peak = 0.0;
  for (int j = 0; j < num_sites(); ++j) {
    Eigen::MatrixXd t = sites_[j][0];
    for (int v = 1; v < phys_dim(j); ++v) t += sites_[j][v];
    prod = (j == 0) ? t : Eigen::MatrixXd(prod * t);
    peak = std::max(peak, prod.cwiseAbs().maxCoeff());
  }
  return peak;
}

void PeriodicMPS::scale(double factor) {
  for (auto& m : sites_[0]) m *= factor;
}

PeriodicMPS PeriodicMPS::ones(const std::vector<int>& phys_dims) {
  std::vector<SiteTensor> sites(phys_dims.size());
  for (size_t j = 0; j < phys_dims.size(); ++j) {
    sites[j].assign(phys_dims[j], Eigen::MatrixXd::Ones(1, 1));
  }
  return PeriodicMPS(std::move(sites));
}

PeriodicMPS PeriodicMPS::product(const std::vector<std::vector<double>>& site_values) {
  std::vector<SiteTensor> sites(site_values.size());
  for (size_t j = 0; j < site_values.size(); ++j) {
    if (site_values[j].empty()) throw std::invalid_argument("product: empty site");
    for (double v : site_values[j])
      sites[j].push_back(Eigen::MatrixXd::Constant(1, 1, v));
  }
  return PeriodicMPS(std::move(sites));
}

std::string PeriodicMPS::to_json() const {
  json sites = json::array();
  for (int j = 0; j < num_sites(); ++j) {
    json vals = json::array();
    for (int v = 0; v < phys_dim(j); ++v) {
      const Eigen::MatrixXd& m = sites_[j][v];
      json data = json::array();
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
      vals.push_back(std::move(data));
    }
    sites.push_back({{"phys", phys_dim(j)},
                     {"rows", sites_[j][0].rows()},
                     {"cols", sites_[j][0].cols()},
                     {"data", std::move(vals)}});
  }
  json out = {{"format", "periodic-mps"}, {"version", 1}, {"sites", std::move(sites)}};
  return out.dump();
}

PeriodicMPS PeriodicMPS::from_json(const std::string& text) {
  json in = json::parse(text);
  if (in.value("format", "") != "periodic-mps" || in.value("version", 0) != 1)
    throw std::invalid_argument("not a periodic-mps v1 document");
  std::vector<SiteTensor> sites;
  for (const json& s : in.at("sites")) {
    const int phys = s.at("phys").get<int>();
    const Eigen::Index rows = s.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = s.at("cols").get<Eigen::Index>();
    const json& vals = s.at("data");
    if (static_cast<int>(vals.size()) != phys)
      throw std::invalid_argument("MPS json: data/phys mismatch");
    SiteTensor site;
    for (const json& d : vals) {
      if (static_cast<Eigen::Index>(d.size()) != rows * cols)
        throw std::invalid_argument("MPS json: matrix size mismatch");
      Eigen::MatrixXd m(rows, cols);
      Eigen::Index k = 0;
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = d[k++].get<double>();
      site.push_back(std::move(m));
    }
    sites.push_back(std::move(site));
  }
  return PeriodicMPS(std::move(sites));
}

}  // namespace brickshadows
