#pragma once

#include "smoothridge/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace smoothridge {

struct RidgeConfig {
  double lambda = 0.0;
  double tol = 1e-8;
  int max_iter = 500;
};

/// Thrown when the noise variance collapses below its floor, which happens
/// when the basis can interpolate the responses. Carries the last iterate.
class DegenerateFitError : public NumericalError {
 public:
  DegenerateFitError(const std::string& what, double alpha, Vector beta);
  double alpha() const { return alpha_; }
  const Vector& beta() const { return beta_; }

 private:
  double alpha_;
  Vector beta_;
};

/// Outcome of alternating alpha = RSS/n and the penalized normal equations.
struct AlternationResult {
  ModelParams params;
  int iterations = 0;
  bool converged = false;
};

/// Phi^T Phi and Phi^T y for repeated penalized solves. Holds references to
/// phi and ys, which must outlive it.
class NormalEquations {
 public:
  NormalEquations(const Matrix& phi, const Vector& ys);

  const Matrix& phi() const { return phi_; }
  const Vector& ys() const { return ys_; }
  const Matrix& gram() const { return gram_; }
  const Vector& phity() const { return phity_; }
  Eigen::Index n() const { return ys_.size(); }
  Eigen::Index m() const { return phi_.cols(); }
  double rss(const Vector& beta) const { return (ys_ - phi_ * beta).squaredNorm(); }

 private:
  const Matrix& phi_;
  const Vector& ys_;
  Matrix gram_;
  Vector phity_;
};

/// Minimizes n log(2 pi alpha) + RSS/alpha + n sum_j lambda_j beta_j^2 over
/// (alpha, beta) by alternating
///   beta  = (Phi^T Phi + n alpha diag(lambda))^{-1} Phi^T y,
///   alpha = RSS / n
/// until the relative change of both falls below tol. The first beta comes
/// from the same system with alpha replaced by `alpha_start` (var(y) when
/// absent). Shared by the ridge baseline and the weighted step of the
/// smoothly varying estimator.
AlternationResult alternate_alpha_beta(const NormalEquations& system, const Vector& lambda, double tol,
                                       int max_iter, std::optional<double> alpha_start = std::nullopt);

/// Variance floor below which a fit is reported as degenerate.
double alpha_floor(const Vector& ys);

/// -2 sum_i l_i(theta) = n log(2 pi alpha) + RSS / alpha.
double neg2_loglik(const Matrix& phi, const Vector& ys, const ModelParams& params);

/// Ridge loss -2 sum_i l_i + n lambda beta^T beta.
double ridge_objective(const Matrix& phi, const Vector& ys, const ModelParams& params, double lambda);

FitResult ridge_fit(const Matrix& phi, const Vector& ys, const RidgeConfig& config);

/// tr[(Phi^T Phi + n lambda alpha I)^{-1} Phi^T Phi].
double ridge_edf(const Matrix& phi, double lambda, double alpha);

/// Bias matrices of the information criterion for a Gaussian likelihood
/// with a per-observation penalty P(beta): J = E(-sum d psi_i / d theta^T)
/// and I = E(sum psi_i d l_i / d theta^T), theta = (alpha, beta).
struct GicMatrices {
  Matrix j;
  Matrix i;
};

/// Builds J and I at `params` from the gradient and Hessian of P. Expected
/// mode substitutes Gaussian moments of the residual; empirical mode sums
/// the per-observation terms.
GicMatrices gic_matrices(const Matrix& phi, const Vector& ys, const ModelParams& params,
                         const Vector& penalty_gradient, const Matrix& penalty_hessian, GicMode mode);

/// -2 loglik + 2 tr(J^{-1} I); throws NumericalError when J is singular.
GicReport assemble_gic(const Matrix& phi, const Vector& ys, const ModelParams& params,
                       const Vector& penalty_gradient, const Matrix& penalty_hessian, GicMode mode);

/// Criterion for a ridge fit (penalty lambda beta^T beta per observation).
GicReport ridge_gic(const Matrix& phi, const Vector& ys, const FitResult& fit, GicMode mode);

struct RidgeGridPoint {
  double lambda = 0.0;
  std::optional<double> gic;  ///< empty when the fit failed
  std::string error;
};

struct RidgeSelection {
  double lambda = 0.0;
  FitResult fit;
  std::vector<RidgeGridPoint> grid;
};

/// 25 points log-spaced over [1e-8, 1e2].
std::vector<double> default_lambda_grid();

/// Fits every grid point and returns the expected-mode GIC minimizer, ties
/// broken toward the larger lambda. `threads` = 0 uses every core.
RidgeSelection ridge_select(const Matrix& phi, const Vector& ys, const std::vector<double>& lambda_grid,
                            unsigned threads = 1);

/// `count` values log-spaced over [lo, hi], inclusive.
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace smoothridge
