#include "pddgsa/pdd.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "pddgsa/errors.hpp"

namespace pddgsa {

int BasisTerm::total_degree() const {
  return std::accumulate(degrees.begin(), degrees.end(), 0);
}

std::int64_t basis_count(int N, int S, int m) {
  auto binom = [](int n, int k) -> std::int64_t {
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  std::int64_t total = 1;
  for (int s = 1; s <= S; ++s) total += binom(N, s) * binom(m, s);
  return total;
}

namespace {

void append_degree_tuples(const std::vector<int>& subset, int m,
                          std::vector<int>& degrees, int pos, int remaining,
                          std::vector<BasisTerm>& out) {
  const int s = static_cast<int>(subset.size());
  if (pos == s) {
    out.push_back(BasisTerm{subset, degrees});
    return;
  }
  // Each later position still needs degree >= 1.
  int slack = remaining - (s - pos - 1);
  for (int j = 1; j <= slack; ++j) {
    degrees[static_cast<std::size_t>(pos)] = j;
    append_degree_tuples(subset, m, degrees, pos + 1, remaining - j, out);
  }
}

void enumerate_subsets(int N, int s, int start, std::vector<int>& subset, int m,
                       std::vector<BasisTerm>& out) {
  if (static_cast<int>(subset.size()) == s) {
    std::vector<int> degrees(static_cast<std::size_t>(s));
    append_degree_tuples(subset, m, degrees, 0, m, out);
    return;
  }
  for (int v = start; v < N; ++v) {
    subset.push_back(v);
    enumerate_subsets(N, s, v + 1, subset, m, out);
    subset.pop_back();
  }
}

}  // namespace

BasisSet enumerate_basis(int N, int S, int m) {
  if (S < 1 || S > N) throw config_error("truncation requires 1 <= S <= N");
  if (m < S) throw config_error("truncation requires m >= S");
  BasisSet basis;
  basis.dims = N;
  basis.variate = S;
  basis.order = m;
  basis.terms.push_back(BasisTerm{});  // constant term
  std::vector<int> subset;
  for (int s = 1; s <= S; ++s) {
    enumerate_subsets(N, s, 0, subset, m, basis.terms);
  }
  return basis;
}

double eval_basis_term(const BasisTerm& term,
                       const std::vector<PolynomialFamily>& families,
                       const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(families.size())) {
    throw config_error("input dimension does not match family count");
  }
  double v = 1.0;
  for (std::size_t k = 0; k < term.vars.size(); ++k) {
    int i = term.vars[k];
    if (i < 0 || i >= static_cast<int>(families.size())) {
      throw config_error("basis term variable index out of range");
    }
    v *= families[static_cast<std::size_t>(i)].eval(term.degrees[k], x(i));
  }
  return v;
}

void TrainingSet::validate() const {
  const Eigen::Index M = inputs.rows();
  const Eigen::Index N = inputs.cols();
  if (M < 1) throw config_error("training set must contain at least one sample");
  if (outputs.size() != M) throw config_error("inputs/outputs row count mismatch");
  if (static_cast<Eigen::Index>(distributions.size()) != N) {
    throw config_error("distribution count does not match input dimension");
  }
  for (Eigen::Index l = 0; l < M; ++l) {
    if (!std::isfinite(outputs(l))) {
      throw numeric_error("non-finite output at row " + std::to_string(l + 1));
    }
    for (Eigen::Index j = 0; j < N; ++j) {
      if (!distributions[static_cast<std::size_t>(j)].in_support(inputs(l, j))) {
        throw config_error("input outside distribution support at row " +
                           std::to_string(l + 1) + ", column " + std::to_string(j + 1));
      }
    }
  }
}

void design_matrix(const TrainingSet& ts, const BasisSet& basis,
                   Eigen::MatrixXd& A, Eigen::VectorXd& b) {
  ts.validate();
  if (ts.inputs.cols() != basis.dims) {
    throw config_error("training set dimension does not match basis");
  }
  auto families = families_for(ts.distributions, basis.order);
  const Eigen::Index M = ts.inputs.rows();
  const Eigen::Index L = basis.size();
  A.resize(M, L);
  b = ts.outputs;
  for (Eigen::Index l = 0; l < M; ++l) {
    Eigen::VectorXd x = ts.inputs.row(l);
    // Evaluate every univariate polynomial once per row, then form products.
    Eigen::MatrixXd uni(basis.dims, basis.order + 1);
    for (int j = 0; j < basis.dims; ++j) {
      const auto& fam = families[static_cast<std::size_t>(j)];
      uni(j, 0) = 1.0;
      for (int d = 1; d <= basis.order; ++d) uni(j, d) = fam.eval(d, x(j));
    }
    for (Eigen::Index i = 0; i < L; ++i) {
      const auto& term = basis.terms[static_cast<std::size_t>(i)];
      double v = 1.0;
      for (std::size_t k = 0; k < term.vars.size(); ++k) {
        v *= uni(term.vars[k], term.degrees[k]);
      }
      if (!std::isfinite(v)) {
        throw numeric_error("non-finite basis value at row " + std::to_string(l + 1) +
                            ", column " + std::to_string(i + 1));
      }
      A(l, i) = v;
    }
  }
}

PddModel::PddModel(BasisSet basis_in, Eigen::VectorXd coefficients_in,
                   std::vector<Distribution> distributions_in)
    : basis(std::move(basis_in)),
      coefficients(std::move(coefficients_in)),
      distributions(std::move(distributions_in)) {
  if (coefficients.size() != basis.size()) {
    throw config_error("coefficient vector length does not match basis");
  }
  if (static_cast<int>(distributions.size()) != basis.dims) {
    throw config_error("distribution count does not match basis dimension");
  }
  if (!coefficients.allFinite()) {
    throw numeric_error("model coefficients contain non-finite entries");
  }
  families_ = families_for(distributions, basis.order);
}

double PddModel::predict(const Eigen::VectorXd& x) const {
  if (x.size() != basis.dims) throw config_error("prediction input dimension mismatch");
  double y = 0.0;
  for (Eigen::Index i = 0; i < basis.size(); ++i) {
    y += coefficients(i) *
         eval_basis_term(basis.terms[static_cast<std::size_t>(i)], families_, x);
  }
  return y;
}

std::vector<PolynomialFamily> families_for(
    const std::vector<Distribution>& dists, int m_max) {
  std::vector<PolynomialFamily> fams;
  fams.reserve(dists.size());
  for (const auto& d : dists) fams.emplace_back(d, m_max);
  return fams;
}

}  // namespace pddgsa
