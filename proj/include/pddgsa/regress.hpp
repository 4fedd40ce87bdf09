#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pddgsa/pdd.hpp"

namespace pddgsa {

struct SvdFactors {
  Eigen::MatrixXd u;               // rows x rows
  Eigen::MatrixXd v;               // cols x cols
  Eigen::VectorXd singular_values;  // min(rows, cols), descending
  Eigen::Index rank = 0;
};

// Full SVD with numerical rank at threshold rank_tol * sigma_max.
// rank_tol <= 0 selects max(rows, cols) * machine epsilon.
SvdFactors svd_full(const Eigen::MatrixXd& a, double rank_tol = -1.0);

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& a, double rank_tol = -1.0,
                              SvdFactors* factors = nullptr);

// I - A+ A, the orthogonal projector onto null(A).
Eigen::MatrixXd null_projector(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& pinv);

// Minimum-norm least-squares solution A+ b.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

struct LassoResult {
  Eigen::VectorXd coefficients;
  int sweeps = 0;
  bool converged = true;
};

// Cyclic coordinate descent for (b-Ac)'(b-Ac) + k sum|c_i|.
LassoResult lasso(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double k,
                  int max_sweeps = 10000, double tol = 1e-8);

std::vector<double> default_lasso_grid(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b,
                                       int grid_size = 50);

struct LassoCvResult {
  double penalty = 0.0;
  LassoResult fit;
  std::vector<double> grid;
  std::vector<double> cv_errors;  // mean out-of-fold squared error per grid value
};

LassoCvResult lasso_cv(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       const std::vector<double>& grid, int folds,
                       std::uint64_t seed);

// Homotopy limit minimizing (1/2) c' D c over {c : Ac = b}.
Eigen::VectorXd dmorph_original(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& d, double rank_tol = -1.0);

// Manifold point closest to c0, computed from the SVD of the null projector.
Eigen::VectorXd dmorph_initial(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                               const Eigen::VectorXd& c0, double rank_tol = -1.0);

struct LassoConfig {
  int folds = 5;
  int grid_size = 50;
};

struct DmorphConfig {
  double lambda = 0.5;
  double epsilon = 1e-6;
  int max_iterations = 30;
  double convergence_tol = 1e-8;
  double rank_tol = -1.0;  // <= 0: automatic
  bool enforce_fit = true;
  LassoConfig lasso;

  void validate() const;
};

struct FitDiagnostics {
  double residual_norm = 0.0;
  int iterations = 0;
  std::vector<double> coefficient_change;  // relative change per iteration
  std::vector<double> cost_history;        // blended weighted cost at each iterate
  std::vector<double> cost_at_start;       // same cost evaluated at A+ b
  bool underdetermined = false;
  double lasso_penalty = 0.0;
  bool lasso_converged = true;
  Eigen::Index basis_size = 0;
  Eigen::Index sample_count = 0;
};

// Iteratively reweighted sparse homotopy around the Lasso solution c0.
// Optionally records every iterate (including iteration 0) in history.
Eigen::VectorXd dmorph_sparse(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const Eigen::VectorXd& c0, const DmorphConfig& cfg,
                              FitDiagnostics* diag = nullptr,
                              std::vector<Eigen::VectorXd>* history = nullptr);

// Full pipeline: least squares when M >= L, otherwise cross-validated Lasso
// followed by the sparse homotopy.
std::pair<PddModel, FitDiagnostics> fit(const TrainingSet& ts, const BasisSet& basis,
                                        const DmorphConfig& cfg,
                                        std::uint64_t cv_seed = 0);

}  // namespace pddgsa
