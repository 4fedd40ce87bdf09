#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace pddgsa {

enum class DistKind { Uniform, Normal };

// A one-dimensional input probability measure. For Uniform the parameters
// are the support bounds, for Normal the mean and standard deviation.
struct Distribution {
  DistKind kind = DistKind::Uniform;
  double p1 = 0.0;  // lower bound / mean
  double p2 = 1.0;  // upper bound / std

  static Distribution uniform(double lower, double upper);
  static Distribution normal(double mean, double stddev);

  void validate() const;  // throws config_error on bad parameters
  bool in_support(double x) const;
  double inverse_cdf(double u) const;  // u in (0,1)
};

enum class SampleMethod { MonteCarlo, LatinHypercube };

// Univariate polynomials orthonormal with respect to a Distribution,
// evaluated through the symmetric three-term recurrence
//   b[k+1] p[k+1](t) = t p[k](t) - b[k] p[k-1](t)
// on the standardized variable t. Legendre for uniform measures,
// probabilists' Hermite for normal measures.
class PolynomialFamily {
 public:
  PolynomialFamily(const Distribution& dist, int m_max);

  double eval(int degree, double x) const;  // throws config_error if degree > m_max
  int max_degree() const { return m_max_; }
  const Distribution& distribution() const { return dist_; }
  const std::vector<double>& recurrence_offdiag() const { return offdiag_; }

 private:
  double standardize(double x) const;

  Distribution dist_;
  int m_max_ = 0;
  std::vector<double> offdiag_;  // b[1..m_max]
};

PolynomialFamily family_for(const Distribution& dist, int m_max);

// n draws from dist, deterministic in seed. Latin hypercube stratifies
// [0,1] into n equal bins with one uniformly jittered point per bin.
std::vector<double> sample(const Distribution& dist, int n, std::uint64_t seed,
                           SampleMethod method);

// n x dims design, one independently sampled/stratified column per input.
Eigen::MatrixXd sample_design(const std::vector<Distribution>& dists, int n,
                              std::uint64_t seed, SampleMethod method);

// Standard normal quantile function, accurate to double precision.
double normal_quantile(double u);

}  // namespace pddgsa
