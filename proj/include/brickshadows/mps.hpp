#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace brickshadows {

// One site of a trace-closed MPS: a matrix per physical value. Row count is
// the bond shared with the previous site, column count the bond with the next.
using SiteTensor = std::vector<Eigen::MatrixXd>;

// Trace-closed (periodic) matrix product state over real tensors. The value
// on an index string x is tr(M^0_{x_0} ... M^{N-1}_{x_{N-1}}). No canonical
// form and no truncation; every operation is exact contraction.
class PeriodicMPS {
 public:
  PeriodicMPS() = default;
  explicit PeriodicMPS(std::vector<SiteTensor> sites);

  int num_sites() const { return static_cast<int>(sites_.size()); }
  int phys_dim(int j) const { return static_cast<int>(sites_[j].size()); }
  int bond_dim(int j) const;  // bond between site j-1 and site j (cyclic)
  int max_bond() const;
  const SiteTensor& site(int j) const { return sites_[j]; }
  SiteTensor& site(int j) { return sites_[j]; }

  double evaluate(std::span<const int> index) const;
  double evaluate(const std::vector<uint8_t>& index) const;

  // Sum of the value over every index string.
  double sum_all() const;

  // Entrywise product as functions of the index string; bond dims multiply.
  static PeriodicMPS hadamard(const PeriodicMPS& a, const PeriodicMPS& b);

  // Sum over x of prod_i values_i(x), contracted site by site. All factors
  // must share site count and per-site physical dims.
  static double sum_product(std::span<const PeriodicMPS* const> factors);

  // Sum over x of value(x)^2.
  double frobenius_sq() const;

  // Largest absolute entry over all running products in a transfer sweep;
  // used for the cancellation warning in the inversion cost.
  double transfer_magnitude() const;

  void scale(double factor);  // multiplies site 0

  // Constant function 1 with a given site layout.
  static PeriodicMPS ones(const std::vector<int>& phys_dims);
  // Bond-1 product MPS with per-site vectors of values.
  static PeriodicMPS product(const std::vector<std::vector<double>>& site_values);

  std::string to_json() const;
  static PeriodicMPS from_json(const std::string& text);

 private:
  void check_consistent() const;
  std::vector<SiteTensor> sites_;
};

}  // namespace brickshadows
