#pragma once

#include <cstddef>
#include <vector>

#include "specrec/types.hpp"

namespace specrec {

enum class StepRule { FixedLipschitz, Backtracking };

struct SolverConfig {
  double tv_lambda = 0.0;
  std::size_t max_iter = 500;
  double tol = 1e-10;  // KKT threshold (nnls) / relative objective decrease (nnls_tv)
  StepRule step_rule = StepRule::FixedLipschitz;
  bool record_trace = false;  // keep per-iterate objectives in the report

  void validate() const;
};

struct SolveReport {
  Spectrum x_hat;
  std::size_t iterations = 0;
  double final_objective = 0.0;
  bool converged = false;
  double wall_time_ms = 0.0;
  std::vector<double> objective_trace;  // accepted iterates, when recorded
};

// Exact proximal operator of w * sum |u_{j+1} - u_j| in 1/2 ||u - z||^2,
// computed by the taut-string construction in one pass. w >= 0.
std::vector<double> tv_prox_1d(const std::vector<double>& z, double w);

double tv_norm(const std::vector<double>& x);

// Moore-Penrose pseudoinverse applied to y, singular values below
// 1e-10 * sigma_max truncated. Output may carry negatives; it is a
// preprocessing feature, not a physical spectrum.
std::vector<double> pinv_preprocess(const ResponseMatrix& R, const EncodedSignal& y);

// Minimum-norm solution of min ||y - Rx||^2 (no sign constraint).
SolveReport least_squares(const ResponseMatrix& R, const EncodedSignal& y,
                          const WavelengthGrid& grid);

// Lawson-Hanson active-set method for min_{x>=0} ||y - Rx||^2. At
// convergence the KKT conditions hold to cfg.tol: passive gradients are
// zero, active gradients are non-negative.
SolveReport nnls(const ResponseMatrix& R, const EncodedSignal& y,
                 const WavelengthGrid& grid, const SolverConfig& cfg);

// Proximal gradient for min_{x>=0} ||y - Rx||^2 + lambda * TV(x): gradient
// step on the quadratic, then the TV prox composed with projection onto the
// non-negative orthant. Accepted iterates never increase the objective.
SolveReport nnls_tv(const ResponseMatrix& R, const EncodedSignal& y,
                    const WavelengthGrid& grid, const SolverConfig& cfg);

// Gradient of ||y - Rx||^2 at x, g = 2 R^T (Rx - y); used by tests and the
// KKT reporting path.
std::vector<double> nnls_gradient(const ResponseMatrix& R, const std::vector<double>& y,
                                  const std::vector<double>& x);

// Picks tv_lambda from multiplier * mean ||y||_2 candidates by mean RMSE
// against ground truth on a validation set.
double sweep_tv_lambda(const ResponseMatrix& R, const std::vector<LabeledPair>& val,
                       const SolverConfig& base,
                       const std::vector<double>& multipliers = {1e-4, 1e-3, 1e-2,
                                                                 1e-1, 1.0});

}  // namespace specrec
