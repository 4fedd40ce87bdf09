#include "pddgsa/regress.hpp"

#include <lapacke.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "pddgsa/errors.hpp"

namespace pddgsa {

namespace {

double auto_rank_tol(Eigen::Index rows, Eigen::Index cols) {
  return static_cast<double>(std::max(rows, cols)) *
         std::numeric_limits<double>::epsilon();
}

// Solve (E'F) x = rhs for an oblique projector block, guarding conditioning.
Eigen::VectorXd oblique_solve(const Eigen::MatrixXd& etf, const Eigen::VectorXd& rhs) {
  if (etf.rows() == 0) return Eigen::VectorXd();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(etf);
  double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    throw numeric_error("singular oblique projector block (rcond = " +
                        std::to_string(rc) + ")");
  }
  return lu.solve(rhs);
}

// Two-term homotopy limit from the full SVD of the projected weight matrix G:
//   F2 (E2'F2)^-1 E2' a0  +  F1 (E1'F1)^-1 T^-1 E1' pull
// with E = g.u, F = g.v partitioned at the numerical rank.
Eigen::VectorXd limit_from_full_svd(const SvdFactors& g, const Eigen::VectorXd& a0,
                                    const Eigen::VectorXd* pull) {
  const Eigen::Index n = g.v.rows();
  const Eigen::Index r = g.rank;
  Eigen::MatrixXd e2 = g.u.rightCols(n - r);
  Eigen::MatrixXd f2 = g.v.rightCols(n - r);
  Eigen::VectorXd c = f2 * oblique_solve(e2.transpose() * f2, e2.transpose() * a0);
  if (pull != nullptr && r > 0) {
    Eigen::MatrixXd e1 = g.u.leftCols(r);
    Eigen::MatrixXd f1 = g.v.leftCols(r);
    Eigen::VectorXd y =
        g.singular_values.head(r).cwiseInverse().asDiagonal() * (e1.transpose() * *pull);
    c += f1 * oblique_solve(e1.transpose() * f1, y);
  }
  return c;
}

Eigen::VectorXd apply_pinv(const SvdFactors& f, const Eigen::VectorXd& b) {
  const Eigen::Index r = f.rank;
  if (r == 0) return Eigen::VectorXd::Zero(f.v.rows());
  return f.v.leftCols(r) *
         (f.singular_values.head(r).cwiseInverse().asDiagonal() *
          (f.u.leftCols(r).transpose() * b));
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

SvdFactors svd_full(const Eigen::MatrixXd& a, double rank_tol) {
  if (!a.allFinite()) throw numeric_error("matrix contains non-finite entries");
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  SvdFactors f;
  f.u.resize(m, m);
  f.v.resize(n, n);
  f.singular_values.resize(std::min(m, n));
  if (m == 0 || n == 0) {
    f.u.setIdentity();
    f.v.setIdentity();
    f.rank = 0;
    return f;
  }
  Eigen::MatrixXd work = a;
  Eigen::MatrixXd vt(n, n);
  lapack_int info = LAPACKE_dgesdd(
      LAPACK_COL_MAJOR, 'A', static_cast<lapack_int>(m), static_cast<lapack_int>(n),
      work.data(), static_cast<lapack_int>(m), f.singular_values.data(), f.u.data(),
      static_cast<lapack_int>(m), vt.data(), static_cast<lapack_int>(n));
  if (info != 0) {
    // dgesdd occasionally fails to converge; dgesvd is slower but sturdier.
    work = a;
    Eigen::VectorXd superb(std::min(m, n));
    info = LAPACKE_dgesvd(LAPACK_COL_MAJOR, 'A', 'A', static_cast<lapack_int>(m),
                          static_cast<lapack_int>(n), work.data(),
                          static_cast<lapack_int>(m), f.singular_values.data(),
                          f.u.data(), static_cast<lapack_int>(m), vt.data(),
                          static_cast<lapack_int>(n), superb.data());
    if (info != 0) throw numeric_error("SVD failed to converge (info = " + std::to_string(info) + ")");
  }
  f.v = vt.transpose();
  double tol = (rank_tol > 0.0 ? rank_tol : auto_rank_tol(m, n));
  double cutoff = tol * f.singular_values(0);
  f.rank = 0;
  for (Eigen::Index i = 0; i < f.singular_values.size(); ++i) {
    if (f.singular_values(i) > cutoff) ++f.rank;
  }
  return f;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a, double rank_tol,
                              SvdFactors* factors) {
  SvdFactors f = svd_full(a, rank_tol);
  const Eigen::Index r = f.rank;
  Eigen::MatrixXd pinv;
  if (r == 0) {
    pinv = Eigen::MatrixXd::Zero(a.cols(), a.rows());
  } else {
    pinv = f.v.leftCols(r) * f.singular_values.head(r).cwiseInverse().asDiagonal() *
           f.u.leftCols(r).transpose();
  }
  if (factors != nullptr) *factors = std::move(f);
  return pinv;
}

Eigen::MatrixXd null_projector(const Eigen::MatrixXd& a, const Eigen::MatrixXd& pinv) {
  if (pinv.rows() != a.cols() || pinv.cols() != a.rows()) {
    throw config_error("pseudoinverse shape does not match matrix");
  }
  const Eigen::Index n = a.cols();
  return Eigen::MatrixXd::Identity(n, n) - pinv * a;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != b.size()) throw config_error("matrix/vector shape mismatch");
  SvdFactors f = svd_full(a);
  return apply_pinv(f, b);
}

LassoResult lasso(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double k,
                  int max_sweeps, double tol) {
  if (k < 0.0) throw config_error("lasso penalty must be non-negative");
  if (a.rows() != b.size()) throw config_error("matrix/vector shape mismatch");
  const Eigen::Index n = a.cols();
  Eigen::VectorXd colnorm2 = a.colwise().squaredNorm();
  LassoResult res;
  res.coefficients = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd resid = b;
  res.converged = false;
  for (res.sweeps = 0; res.sweeps < max_sweeps; ++res.sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (colnorm2(j) <= 0.0) continue;
      double cj = res.coefficients(j);
      double rho = a.col(j).dot(resid) + colnorm2(j) * cj;
      double cnew = soft_threshold(rho, 0.5 * k) / colnorm2(j);
      if (cnew != cj) {
        resid -= a.col(j) * (cnew - cj);
        res.coefficients(j) = cnew;
        max_change = std::max(max_change, std::abs(cnew - cj));
      }
    }
    if (max_change < tol) {
      res.converged = true;
      ++res.sweeps;
      break;
    }
  }
  return res;
}

std::vector<double> default_lasso_grid(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b, int grid_size) {
  if (grid_size < 1) throw config_error("grid size must be >= 1");
  double scale = (a.transpose() * b).cwiseAbs().maxCoeff();
  if (scale <= 0.0) scale = 1.0;
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  const double lo = std::log(1e-4), hi = std::log(1e+1);
  for (int i = 0; i < grid_size; ++i) {
    double f = grid_size == 1 ? 1.0 : static_cast<double>(i) / (grid_size - 1);
    grid[static_cast<std::size_t>(i)] = scale * std::exp(lo + f * (hi - lo));
  }
  return grid;
}

LassoCvResult lasso_cv(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const std::vector<double>& grid, int folds,
                       std::uint64_t seed) {
  if (grid.empty()) throw config_error("penalty grid must be non-empty");
  if (folds < 2) throw config_error("cross-validation requires folds >= 2");
  const Eigen::Index m = a.rows();
  if (m < folds) throw config_error("fewer samples than folds");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(seed);
  std::shuffle(order.begin(), order.end(), gen);

  std::vector<double> ks = grid;
  std::sort(ks.begin(), ks.end(), std::greater<>());

  std::vector<double> sse(ks.size(), 0.0);
  for (int fold = 0; fold < folds; ++fold) {
    Eigen::Index lo = m * fold / folds;
    Eigen::Index hi = m * (fold + 1) / folds;
    Eigen::Index ntest = hi - lo;
    Eigen::Index ntrain = m - ntest;
    Eigen::MatrixXd at(ntrain, a.cols()), av(ntest, a.cols());
    Eigen::VectorXd bt(ntrain), bv(ntest);
    Eigen::Index it = 0, iv = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::Index row = order[static_cast<std::size_t>(i)];
      if (i >= lo && i < hi) {
        av.row(iv) = a.row(row);
        bv(iv++) = b(row);
      } else {
        at.row(it) = a.row(row);
        bt(it++) = b(row);
      }
    }
    // Warm start along the descending penalty path.
    Eigen::VectorXd colnorm2 = at.colwise().squaredNorm();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(a.cols());
    Eigen::VectorXd resid = bt;
    for (std::size_t gi = 0; gi < ks.size(); ++gi) {
      const double half_k = 0.5 * ks[gi];
      for (int sweep = 0; sweep < 10000; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
          if (colnorm2(j) <= 0.0) continue;
          double cj = c(j);
          double rho = at.col(j).dot(resid) + colnorm2(j) * cj;
          double cnew = soft_threshold(rho, half_k) / colnorm2(j);
          if (cnew != cj) {
            resid -= at.col(j) * (cnew - cj);
            c(j) = cnew;
            max_change = std::max(max_change, std::abs(cnew - cj));
          }
        }
        if (max_change < 1e-8) break;
      }
      sse[gi] += (bv - av * c).squaredNorm();
    }
  }

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < ks.size(); ++gi) {
    if (sse[gi] < sse[best]) best = gi;
  }

  LassoCvResult res;
  res.penalty = ks[best];
  res.grid = ks;
  res.cv_errors.resize(ks.size());
  for (std::size_t gi = 0; gi < ks.size(); ++gi) {
    res.cv_errors[gi] = sse[gi] / static_cast<double>(m);
  }
  res.fit = lasso(a, b, res.penalty);
  return res;
}

Eigen::VectorXd dmorph_original(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& d, double rank_tol) {
  if (d.rows() != a.cols() || d.cols() != a.cols()) {
    throw config_error("weight matrix shape does not match coefficient count");
  }
  if (!d.isApprox(d.transpose(), 1e-10)) {
    throw config_error("weight matrix must be symmetric");
  }
  SvdFactors fa;
  Eigen::MatrixXd pinv = pseudoinverse(a, rank_tol, &fa);
  Eigen::VectorXd a0 = apply_pinv(fa, b);
  if (fa.rank == a.cols()) return a0;  // the manifold is a single point
  Eigen::MatrixXd phi = null_projector(a, pinv);
  SvdFactors g = svd_full(phi * d, rank_tol);
  return limit_from_full_svd(g, a0, nullptr);
}

Eigen::VectorXd dmorph_initial(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& c0, double rank_tol) {
  if (c0.size() != a.cols()) throw config_error("c0 length does not match coefficient count");
  SvdFactors fa;
  Eigen::MatrixXd pinv = pseudoinverse(a, rank_tol, &fa);
  Eigen::VectorXd a0 = apply_pinv(fa, b);
  if (fa.rank == a.cols()) return a0;
  Eigen::MatrixXd phi = null_projector(a, pinv);
  SvdFactors g = svd_full(phi, rank_tol);
  Eigen::VectorXd pull = phi * c0;
  return limit_from_full_svd(g, a0, &pull);
}

void DmorphConfig::validate() const {
  if (lambda < 0.0 || lambda > 1.0) throw config_error("lambda must lie in [0,1]");
  if (epsilon <= 0.0) throw config_error("epsilon must be positive");
  if (max_iterations < 0) throw config_error("max_iterations must be >= 0");
  if (convergence_tol < 0.0) throw config_error("convergence_tol must be >= 0");
  if (lasso.folds < 2) throw config_error("lasso folds must be >= 2");
  if (lasso.grid_size < 1) throw config_error("lasso grid size must be >= 1");
}

Eigen::VectorXd dmorph_sparse(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c0, const DmorphConfig& cfg,
                              FitDiagnostics* diag, std::vector<Eigen::VectorXd>* history) {
  cfg.validate();
  const Eigen::Index n = a.cols();
  if (c0.size() != n) throw config_error("c0 length does not match coefficient count");

  FitDiagnostics local;
  FitDiagnostics& dg = (diag != nullptr ? *diag : local);
  dg = FitDiagnostics{};
  dg.underdetermined = a.rows() < n;
  dg.basis_size = n;
  dg.sample_count = a.rows();

  SvdFactors fa = svd_full(a, cfg.rank_tol);
  const Eigen::Index ra = fa.rank;
  const Eigen::Index q = n - ra;
  Eigen::VectorXd a0 = apply_pinv(fa, b);

  auto enforce = [&](Eigen::VectorXd c) {
    if (cfg.enforce_fit) c += apply_pinv(fa, b - a * c);
    return c;
  };
  auto record = [&](const Eigen::VectorXd& c) {
    if (history != nullptr) history->push_back(enforce(c));
  };

  if (q == 0) {
    // Full column rank: the manifold is the single point A+ b.
    Eigen::VectorXd c = a0;
    record(c);
    for (int i = 0; i < cfg.max_iterations; ++i) record(c);
    dg.residual_norm = (a * c - b).norm();
    return c;
  }

  Eigen::MatrixXd v2 = fa.v.rightCols(q);

  // Iteration 0: projection of c0 onto the manifold (the SVD of the bare
  // projector has unit singular values with left/right vectors [v2 v1],
  // for which the two-term formula collapses to a0 + Phi c0).
  Eigen::VectorXd c_prev = a0 + v2 * (v2.transpose() * c0);
  record(c_prev);

  Eigen::VectorXd csum = c_prev;

  for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
    Eigen::VectorXd c1 = csum / static_cast<double>(iter);
    Eigen::VectorXd blend = cfg.lambda * c0 + (1.0 - cfg.lambda) * c1;

    // W = diag[0, 1/(|c|+eps), ...]; the constant coefficient is never
    // penalized toward zero.
    Eigen::VectorXd w(n);
    w(0) = 0.0;
    for (Eigen::Index j = 1; j < n; ++j) {
      w(j) = 1.0 / (std::abs(c_prev(j)) + cfg.epsilon);
    }

    // The homotopy limit for this weight is the manifold point minimizing
    // (c - blend)' W (c - blend). Writing c = a0 + v2 z reduces it to the
    // small symmetric system (v2' W v2) z = v2' W (blend - a0), which is
    // far better conditioned than the oblique-projector form of the same
    // solution when the weights span many decades.
    Eigen::MatrixXd wv2 = w.asDiagonal() * v2;  // n x q
    Eigen::MatrixXd gram = v2.transpose() * wv2;
    gram = 0.5 * (gram + gram.transpose());
    Eigen::VectorXd rhs = wv2.transpose() * (blend - a0);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    Eigen::VectorXd z = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !z.allFinite() ||
        (gram * z - rhs).norm() > 1e-8 * std::max(rhs.norm(), 1.0)) {
      // Semi-definite corner case (weights vanishing on a null direction):
      // fall back to a rank-revealing solve.
      z = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(gram).solve(rhs);
    }
    Eigen::VectorXd c_new = a0 + v2 * z;

    if (!c_new.allFinite()) {
      throw numeric_error("non-finite iterate at iteration " + std::to_string(iter));
    }

    auto cost_at = [&](const Eigen::VectorXd& x) {
      Eigen::VectorXd d0 = x - c0;
      Eigen::VectorXd d1 = x - c1;
      return 0.5 * cfg.lambda * d0.dot(w.asDiagonal() * d0) +
             0.5 * (1.0 - cfg.lambda) * d1.dot(w.asDiagonal() * d1);
    };
    dg.cost_at_start.push_back(cost_at(a0));
    dg.cost_history.push_back(cost_at(c_new));

    double denom = std::max(c_prev.norm(), 1e-300);
    double rel_change = (c_new - c_prev).norm() / denom;
    dg.coefficient_change.push_back(rel_change);

    record(c_new);
    csum += c_new;
    c_prev = c_new;
    dg.iterations = iter;

    if (rel_change < cfg.convergence_tol) break;
  }

  Eigen::VectorXd c = enforce(c_prev);
  dg.residual_norm = (a * c - b).norm();
  return c;
}

std::pair<PddModel, FitDiagnostics> fit(const TrainingSet& ts, const BasisSet& basis,
                                        const DmorphConfig& cfg, std::uint64_t cv_seed) {
  cfg.validate();
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  design_matrix(ts, basis, a, b);
  FitDiagnostics diag;
  Eigen::VectorXd c;
  if (a.rows() >= a.cols()) {
    c = least_squares(a, b);
    diag.underdetermined = false;
    diag.basis_size = a.cols();
    diag.sample_count = a.rows();
    diag.residual_norm = (a * c - b).norm();
  } else {
    auto grid = default_lasso_grid(a, b, cfg.lasso.grid_size);
    LassoCvResult cv = lasso_cv(a, b, grid, cfg.lasso.folds, cv_seed);
    c = dmorph_sparse(a, b, cv.fit.coefficients, cfg, &diag);
    diag.lasso_penalty = cv.penalty;
    diag.lasso_converged = cv.fit.converged;
  }
  return {PddModel(basis, std::move(c), ts.distributions), std::move(diag)};
}

}  // namespace pddgsa
