#include "pddgsa/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pddgsa/errors.hpp"

namespace pddgsa {

namespace {

// 53-bit uniform in (0,1); avoids the implementation-defined behavior of
// std::uniform_real_distribution so sequences are identical across platforms.
double uniform01(std::mt19937_64& gen) {
  double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-53;
}

}  // namespace

Distribution Distribution::uniform(double lower, double upper) {
  Distribution d{DistKind::Uniform, lower, upper};
  d.validate();
  return d;
}

Distribution Distribution::normal(double mean, double stddev) {
  Distribution d{DistKind::Normal, mean, stddev};
  d.validate();
  return d;
}

void Distribution::validate() const {
  if (!std::isfinite(p1) || !std::isfinite(p2)) {
    throw config_error("distribution parameters must be finite");
  }
  if (kind == DistKind::Uniform && !(p1 < p2)) {
    throw config_error("uniform distribution requires lower < upper");
  }
  if (kind == DistKind::Normal && !(p2 > 0.0)) {
    throw config_error("normal distribution requires std > 0");
  }
}

bool Distribution::in_support(double x) const {
  if (!std::isfinite(x)) return false;
  if (kind == DistKind::Uniform) return x >= p1 && x <= p2;
  return true;
}

double normal_quantile(double u) {
  // Acklam's rational approximation followed by one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  if (!(u > 0.0 && u < 1.0)) {
    throw config_error("normal_quantile requires u in (0,1)");
  }

  double x;
  if (u < p_low) {
    double q = std::sqrt(-2.0 * std::log(u));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (u <= 1.0 - p_low) {
    double q = u - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - u));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley step on e(x) = Phi(x) - u.
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
  double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  double w = e / pdf;
  return x - w / (1.0 + 0.5 * x * w);
}

double Distribution::inverse_cdf(double u) const {
  if (kind == DistKind::Uniform) return p1 + (p2 - p1) * u;
  return p1 + p2 * normal_quantile(u);
}

PolynomialFamily::PolynomialFamily(const Distribution& dist, int m_max)
    : dist_(dist), m_max_(m_max) {
  dist_.validate();
  if (m_max < 0) throw config_error("m_max must be non-negative");
  offdiag_.resize(static_cast<std::size_t>(m_max) + 1, 0.0);
  for (int k = 1; k <= m_max; ++k) {
    if (dist_.kind == DistKind::Uniform) {
      offdiag_[k] = k / std::sqrt(4.0 * k * k - 1.0);
    } else {
      offdiag_[k] = std::sqrt(static_cast<double>(k));
    }
  }
}

double PolynomialFamily::standardize(double x) const {
  if (dist_.kind == DistKind::Uniform) {
    return (2.0 * x - (dist_.p1 + dist_.p2)) / (dist_.p2 - dist_.p1);
  }
  return (x - dist_.p1) / dist_.p2;
}

double PolynomialFamily::eval(int degree, double x) const {
  if (degree < 0 || degree > m_max_) {
    throw config_error("polynomial degree exceeds family maximum");
  }
  if (degree == 0) return 1.0;
  double t = standardize(x);
  double prev = 1.0;
  double cur = t / offdiag_[1];
  for (int k = 1; k < degree; ++k) {
    double next = (t * cur - offdiag_[k] * prev) / offdiag_[k + 1];
    prev = cur;
    cur = next;
  }
  return cur;
}

PolynomialFamily family_for(const Distribution& dist, int m_max) {
  return PolynomialFamily(dist, m_max);
}

std::vector<double> sample(const Distribution& dist, int n, std::uint64_t seed,
                           SampleMethod method) {
  dist.validate();
  if (n < 1) throw config_error("sample count must be >= 1");
  std::mt19937_64 gen(seed);
  std::vector<double> out(static_cast<std::size_t>(n));
  if (method == SampleMethod::MonteCarlo) {
    for (auto& v : out) v = dist.inverse_cdf(uniform01(gen));
    return out;
  }
  // Latin hypercube: one jittered point per stratum, randomly permuted.
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), gen);
  for (int i = 0; i < n; ++i) {
    double u = (perm[static_cast<std::size_t>(i)] + uniform01(gen)) / n;
    out[static_cast<std::size_t>(i)] = dist.inverse_cdf(u);
  }
  return out;
}

Eigen::MatrixXd sample_design(const std::vector<Distribution>& dists, int n,
                              std::uint64_t seed, SampleMethod method) {
  if (dists.empty()) throw config_error("at least one distribution required");
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(dists.size()));
  for (std::size_t j = 0; j < dists.size(); ++j) {
    // Distinct stream per column so adding a dimension does not reshuffle
    // the previous columns.
    auto col = sample(dists[j], n, seed + 0x9e3779b97f4a7c15ULL * (j + 1), method);
    for (int i = 0; i < n; ++i) x(i, static_cast<Eigen::Index>(j)) = col[static_cast<std::size_t>(i)];
  }
  return x;
}

}  // namespace pddgsa
