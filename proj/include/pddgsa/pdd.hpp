#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "pddgsa/measures.hpp"

namespace pddgsa {

// One multivariate basis element: a strictly increasing set of variable
// indices (0-based) and a degree >= 1 for each. The constant term is the
// empty subset.
struct BasisTerm {
  std::vector<int> vars;
  std::vector<int> degrees;

  bool is_constant() const { return vars.empty(); }
  int total_degree() const;
  bool operator==(const BasisTerm&) const = default;
};

// The truncated basis: all terms with 1 <= |U| <= S and |U| <= sum(j) <= m,
// constant term first, then graded by |U|, lexicographic in the subset,
// lexicographic in the degree tuple.
struct BasisSet {
  std::vector<BasisTerm> terms;
  int dims = 0;
  int variate = 0;
  int order = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(terms.size()); }
};

// Number of terms 1 + sum_{s=1}^{S} C(N,s) C(m,s).
std::int64_t basis_count(int N, int S, int m);

BasisSet enumerate_basis(int N, int S, int m);

double eval_basis_term(const BasisTerm& term,
                       const std::vector<PolynomialFamily>& families,
                       const Eigen::VectorXd& x);

struct TrainingSet {
  Eigen::MatrixXd inputs;   // M x N
  Eigen::VectorXd outputs;  // M
  std::vector<Distribution> distributions;

  void validate() const;
};

// A[l][i] = Psi_i(x^(l)), b[l] = y^(l). First column is all ones.
void design_matrix(const TrainingSet& ts, const BasisSet& basis,
                   Eigen::MatrixXd& A, Eigen::VectorXd& b);

struct PddModel {
  BasisSet basis;
  Eigen::VectorXd coefficients;
  std::vector<Distribution> distributions;

  PddModel() = default;
  PddModel(BasisSet basis, Eigen::VectorXd coefficients,
           std::vector<Distribution> distributions);

  double predict(const Eigen::VectorXd& x) const;
  const std::vector<PolynomialFamily>& families() const { return families_; }

 private:
  std::vector<PolynomialFamily> families_;
};

std::vector<PolynomialFamily> families_for(
    const std::vector<Distribution>& dists, int m_max);

}  // namespace pddgsa
