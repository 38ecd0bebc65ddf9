#include "specrec/solvers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "specrec/errors.hpp"

namespace specrec {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Eigen::MatrixXd to_eigen(const ResponseMatrix& R) {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMat>(R.entries().data(),
                                  static_cast<Eigen::Index>(R.rows()),
                                  static_cast<Eigen::Index>(R.cols()));
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_dims(const ResponseMatrix& R, const EncodedSignal& y,
                const WavelengthGrid& grid, const char* op) {
  if (y.size() != R.rows())
    throw DimensionMismatch(std::string(op) + ": y has " + std::to_string(y.size()) +
                            " entries but R has " + std::to_string(R.rows()) + " rows");
  if (grid.count() != R.cols())
    throw DimensionMismatch(std::string(op) + ": grid count " +
                            std::to_string(grid.count()) + " != R columns " +
                            std::to_string(R.cols()));
}

constexpr double kPinvCutoffRatio = 1e-10;

Eigen::VectorXd pinv_apply(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return Eigen::VectorXd::Zero(A.cols());
  const double cutoff = kPinvCutoffRatio * s(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * (svd.matrixU().transpose() * b);
}

}  // namespace

void SolverConfig::validate() const {
  if (max_iter < 1) throw BadConfig("max_iter must be >= 1");
  if (!(tol > 0.0)) throw BadConfig("tol must be > 0");
  if (!(tv_lambda >= 0.0)) throw BadConfig("tv_lambda must be >= 0");
}

std::vector<double> pinv_preprocess(const ResponseMatrix& R, const EncodedSignal& y) {
  if (y.size() != R.rows())
    throw DimensionMismatch("pinv_preprocess: y has " + std::to_string(y.size()) +
                            " entries but R has " + std::to_string(R.rows()) + " rows");
  const Eigen::VectorXd x = pinv_apply(to_eigen(R), to_eigen(y.values()));
  return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> nnls_gradient(const ResponseMatrix& R, const std::vector<double>& y,
                                  const std::vector<double>& x) {
  const Eigen::MatrixXd A = to_eigen(R);
  const Eigen::VectorXd g =
      2.0 * A.transpose() * (A * to_eigen(x) - to_eigen(y));
  return std::vector<double>(g.data(), g.data() + g.size());
}

SolveReport least_squares(const ResponseMatrix& R, const EncodedSignal& y,
                          const WavelengthGrid& grid) {
  check_dims(R, y, grid, "least_squares");
  const auto t0 = Clock::now();
  const Eigen::MatrixXd A = to_eigen(R);
  const Eigen::VectorXd b = to_eigen(y.values());
  const Eigen::VectorXd x = pinv_apply(A, b);
  SolveReport rep{
      Spectrum::unchecked(grid, std::vector<double>(x.data(), x.data() + x.size())),
      1, (b - A * x).squaredNorm(), true, 0.0};
  rep.wall_time_ms = elapsed_ms(t0);
  return rep;
}

SolveReport nnls(const ResponseMatrix& R, const EncodedSignal& y,
                 const WavelengthGrid& grid, const SolverConfig& cfg) {
  check_dims(R, y, grid, "nnls");
  cfg.validate();
  const auto t0 = Clock::now();

  const Eigen::MatrixXd A = to_eigen(R);
  const Eigen::VectorXd b = to_eigen(y.values());
  const Eigen::Index n = A.cols();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  std::vector<Eigen::Index> pset;  // insertion-ordered passive columns
  pset.reserve(std::min<Eigen::Index>(A.rows(), n));

  // least-squares coefficients over the current passive set
  const auto solve_passive = [&](const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) Ap.col(c) = A.col(cols[c]);
    return Eigen::VectorXd(Ap.colPivHouseholderQr().solve(b));
  };

  SolveReport rep{Spectrum(grid, std::vector<double>(n, 0.0)), 0, b.squaredNorm(),
                  false, 0.0};

  std::size_t iter = 0;
  bool converged = false;
  while (iter < cfg.max_iter) {
    ++iter;
    const Eigen::VectorXd w = A.transpose() * (b - A * x);

    std::vector<bool> banned(n, false);
    Eigen::Index jstar = -1;
    Eigen::VectorXd z;
    // candidate scan: largest positive dual whose trial coefficient is
    // positive; rejected candidates are ineligible for this pass
    for (;;) {
      jstar = -1;
      double wmax = cfg.tol;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] || banned[j]) continue;
        if (w(j) > wmax) {  // strict: ties go to the lowest index
          wmax = w(j);
          jstar = j;
        }
      }
      if (jstar < 0) break;  // KKT satisfied
      std::vector<Eigen::Index> trial = pset;
      trial.push_back(jstar);
      z = solve_passive(trial);
      if (z(static_cast<Eigen::Index>(trial.size()) - 1) > 0.0) break;
      banned[jstar] = true;  // near-dependent column, try the next dual
    }
    if (jstar < 0) {
      converged = true;
      break;
    }

    passive[jstar] = true;
    pset.push_back(jstar);

    // inner feasibility loop: interpolate toward z and drop variables
    // pinned at zero until the passive solve is strictly positive
    for (;;) {
      bool all_positive = true;
      for (Eigen::Index c = 0; c < z.size(); ++c)
        if (z(c) <= 0.0) all_positive = false;
      if (all_positive) break;

      double alpha = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < pset.size(); ++c) {
        if (z(static_cast<Eigen::Index>(c)) <= 0.0) {
          const double xi = x(pset[c]);
          const double step = xi / (xi - z(static_cast<Eigen::Index>(c)));
          alpha = std::min(alpha, step);
        }
      }
      for (std::size_t c = 0; c < pset.size(); ++c) {
        const Eigen::Index j = pset[c];
        x(j) += alpha * (z(static_cast<Eigen::Index>(c)) - x(j));
      }
      // variables that hit the boundary leave the passive set
      const double tiny = 1e-12 * x.cwiseAbs().maxCoeff();
      std::vector<Eigen::Index> kept;
      for (const Eigen::Index j : pset) {
        if (x(j) <= tiny) {
          x(j) = 0.0;
          passive[j] = false;
        } else {
          kept.push_back(j);
        }
      }
      pset = std::move(kept);
      if (pset.empty()) {
        z.resize(0);
        break;
      }
      z = solve_passive(pset);
    }

    x.setZero();
    for (std::size_t c = 0; c < pset.size(); ++c)
      x(pset[c]) = z(static_cast<Eigen::Index>(c));
  }

  rep.converged = converged;
  rep.iterations = iter;
  rep.final_objective = (b - A * x).squaredNorm();
  std::vector<double> xs(x.data(), x.data() + x.size());
  for (auto& v : xs) v = std::max(0.0, v);
  rep.x_hat = Spectrum(grid, std::move(xs));
  rep.wall_time_ms = elapsed_ms(t0);
  return rep;
}

namespace {

double tv_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                    const Eigen::VectorXd& x, double lambda) {
  double tv = 0.0;
  for (Eigen::Index j = 1; j < x.size(); ++j) tv += std::abs(x(j) - x(j - 1));
  return (b - A * x).squaredNorm() + lambda * tv;
}

}  // namespace

SolveReport nnls_tv(const ResponseMatrix& R, const EncodedSignal& y,
                    const WavelengthGrid& grid, const SolverConfig& cfg) {
  check_dims(R, y, grid, "nnls_tv");
  cfg.validate();
  const auto t0 = Clock::now();

  const Eigen::MatrixXd A = to_eigen(R);
  const Eigen::VectorXd b = to_eigen(y.values());
  const Eigen::Index n = A.cols();
  const double lambda = cfg.tv_lambda;

  const double sigma_max =
      Eigen::JacobiSVD<Eigen::MatrixXd>(A).singularValues()(0);
  const double tau_lip = 1.0 / std::max(2.0 * sigma_max * sigma_max, 1e-300);

  // Monotone accelerated proximal gradient: the prox-gradient step is taken
  // at a momentum point, and the accepted iterate keeps the better of the
  // candidate and the incumbent, so the reported objective never increases.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x_prev = x;
  double fx = tv_objective(A, b, x, lambda);
  double t_mom = 1.0;

  std::vector<double> trace;
  if (cfg.record_trace) trace.push_back(fx);

  std::vector<double> step(n), proxed(n);
  std::size_t iter = 0;
  bool converged = false;
  double tau_bt = 4.0 * tau_lip;  // backtracking starts above the safe step
  int quiet_iters = 0;            // consecutive iterations with no real drop

  while (iter < cfg.max_iter) {
    ++iter;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    const double beta = (t_mom - 1.0) / t_next;
    Eigen::VectorXd w = x + beta * (x - x_prev);

    const Eigen::VectorXd g = 2.0 * (A.transpose() * (A * w - b));
    const double fw = (b - A * w).squaredNorm();

    double tau = (cfg.step_rule == StepRule::Backtracking) ? tau_bt : tau_lip;
    Eigen::VectorXd cand;
    for (int half = 0;; ++half) {
      for (Eigen::Index j = 0; j < n; ++j) step[j] = w(j) - tau * g(j);
      proxed = tv_prox_1d(step, tau * lambda);
      for (auto& v : proxed) v = std::max(0.0, v);
      cand = to_eigen(proxed);
      if (cfg.step_rule != StepRule::Backtracking || half >= 60) break;
      // majorization check at the momentum point
      const Eigen::VectorXd d = cand - w;
      const double quad =
          fw + g.dot(d) + d.squaredNorm() / (2.0 * tau);
      if ((b - A * cand).squaredNorm() <= quad + 1e-12 * std::max(1.0, quad)) break;
      tau *= 0.5;
    }
    if (cfg.step_rule == StepRule::Backtracking) tau_bt = 2.0 * tau;

    const double f_cand = tv_objective(A, b, cand, lambda);
    double drop = 0.0;
    if (f_cand <= fx) {  // accept the candidate, momentum carries on
      x_prev = x;
      drop = fx - f_cand;
      x = cand;
      fx = f_cand;
      t_mom = t_next;
    } else {  // keep the incumbent and restart the momentum
      x_prev = x;
      t_mom = 1.0;
    }

    if (cfg.record_trace) trace.push_back(fx);
    if (drop <= cfg.tol * std::max(fx, 1e-300)) {
      if (++quiet_iters >= 5) {
        converged = true;
        break;
      }
    } else {
      quiet_iters = 0;
    }
  }

  SolveReport rep{Spectrum(grid, std::vector<double>(x.data(), x.data() + x.size())),
                  iter, fx, converged, 0.0, std::move(trace)};
  rep.wall_time_ms = elapsed_ms(t0);
  return rep;
}

double sweep_tv_lambda(const ResponseMatrix& R, const std::vector<LabeledPair>& val,
                       const SolverConfig& base, const std::vector<double>& multipliers) {
  if (val.empty()) throw InvalidArgument("sweep_tv_lambda needs a validation set");
  double norm_sum = 0.0;
  for (const auto& p : val) {
    double s = 0.0;
    for (double v : p.y.values()) s += v * v;
    norm_sum += std::sqrt(s);
  }
  const double scale = norm_sum / static_cast<double>(val.size());

  double best_lambda = multipliers.front() * scale;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (double m : multipliers) {
    SolverConfig cfg = base;
    cfg.tv_lambda = m * scale;
    double mse_sum = 0.0;
    for (const auto& p : val) {
      const auto rep = nnls_tv(R, p.y, p.x.grid(), cfg);
      double mse = 0.0;
      for (std::size_t j = 0; j < p.x.size(); ++j) {
        const double d = rep.x_hat[j] - p.x[j];
        mse += d * d;
      }
      mse_sum += std::sqrt(mse / static_cast<double>(p.x.size()));
    }
    const double mean_rmse = mse_sum / static_cast<double>(val.size());
    if (mean_rmse < best_rmse) {
      best_rmse = mean_rmse;
      best_lambda = cfg.tv_lambda;
    }
  }
  return best_lambda;
}

}  // namespace specrec
