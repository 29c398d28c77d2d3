#pragma once

#include "smoothridge/basis.hpp"
#include "smoothridge/core.hpp"
#include "smoothridge/svreg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace smoothridge {

/// Guards used by the plug-in lambda approximation.
struct TildeLimits {
  double beta_floor = 1e-8;  ///< |beta_j| floor before reciprocal squares
  double lambda_min = 1e-10;
  double lambda_max = 1e10;
};

/// Second derivatives of one plug-in value, stored on its support only.
struct HessianBlock {
  std::vector<int> support;  ///< ascending coefficient indices
  Matrix block;              ///< |support| x |support|

  /// Expands into a dense m x m matrix.
  Matrix dense(int m) const;
};

/// Plug-in approximation lambda~_j = gamma2 / den_j with
/// den_j = beta_j^2 - 2 gamma1 gamma2 (D w)_j, w = 1 / beta^2 and D the graph
/// Laplacian of the center adjacency.
struct LambdaTilde {
  Vector values;
  std::vector<bool> clamped_mask;  ///< true where a guard fired
  Vector denominators;
  Matrix jac;                      ///< jac(j, k) = d lambda~_j / d beta_k
  std::vector<HessianBlock> hess;  ///< hess[j] = d^2 lambda~_j / d beta d beta^T

  int clamped_count() const;
};

/// Values and clamp mask only (jac and hess left empty).
LambdaTilde lambda_tilde(const Vector& beta, double gamma1, double gamma2, const Adjacency& adjacency,
                         const TildeLimits& limits = {});

/// Values plus closed-form first and second derivatives. Rows belonging to
/// clamped entries are zero.
LambdaTilde lambda_tilde_derivatives(const Vector& beta, double gamma1, double gamma2, const Adjacency& adjacency,
                                     const TildeLimits& limits = {});

struct StuMatrices {
  Matrix s;
  Vector t;
  Vector u;
  Matrix d;
  bool regularized = false;  ///< inverse Jacobian needed the Tikhonov shift
  std::string warning;
};

/// S = 2 (jac^T)^{-1} diag(beta) + 2 diag(beta) jac^{-1} + 2 gamma1 D + gamma2 diag(lambda~)^{-2},
/// t = beta^2 + 2 gamma1 D lambda~ - gamma2 / lambda~,
/// u = beta^2 + 2 gamma1 D lambda~ + gamma2 / lambda~.
/// When jac is ill-conditioned (condition above 1e12) its inverse is taken
/// after adding 1e-12 ||jac|| to the diagonal and `regularized` is set.
StuMatrices assemble_stu(const Vector& beta, const LambdaTilde& lt, double gamma1, double gamma2,
                         const Adjacency& adjacency);

/// Gradient and Hessian of the per-observation penalty
/// P(beta) = sum_j lambda~_j beta_j^2 + gamma1 lambda~^T D lambda~ - gamma2 sum_j log lambda~_j
/// with lambda~ = lambda~(beta). The Hessian uses the expanded form of
/// jac^T S jac, which needs no inverse.
struct PenaltyDerivatives {
  Vector gradient;        ///< 2 diag(lambda~) beta + jac^T t
  Vector print_gradient;  ///< 2 diag(lambda~) beta + jac^T u (used by the empirical I matrix)
  Matrix hessian;
  int clamped = 0;
};

PenaltyDerivatives penalty_derivatives(const Vector& beta, double gamma1, double gamma2, const Adjacency& adjacency,
                                       const TildeLimits& limits = {});

/// Approximate criterion for a smoothly varying fit, with gamma taken from
/// the fit. Throws NumericalError when J is singular.
GicReport approx_gic(const DesignMatrix& design, const Vector& ys, const FitResult& fit, GicMode mode);

struct GammaGridPoint {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::optional<double> gic;  ///< empty when the fit or criterion failed
  bool converged = false;
  int clamped = 0;
  Vector beta;  ///< fitted coefficients, empty when the point failed
  std::string error;
};

struct GammaSelection {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  FitResult fit;
  std::vector<GammaGridPoint> grid;
  double ridge_lambda = 0.0;  ///< starting lambda shared by every grid point
};

/// Cartesian product of two axes, gamma1 outer.
std::vector<std::pair<double, double>> gamma_grid(const std::vector<double>& gamma1_axis,
                                                  const std::vector<double>& gamma2_axis);

/// 7 x 7 log-spaced over [1e-6, 1]^2.
std::vector<std::pair<double, double>> default_gamma_grid();

/// Fits every grid point (options supplies everything but gamma) and returns
/// the expected-mode approximate-GIC minimizer; ties go to the larger gamma1,
/// then the larger gamma2. When options.lambda_init is empty the ridge
/// optimum is computed once and shared by all grid points.
GammaSelection gamma_select(const DesignMatrix& design, const Vector& ys,
                            const std::vector<std::pair<double, double>>& grid, const SvrOptions& options,
                            unsigned threads = 1);

struct GapPoint {
  double scale = 0.0;
  double gap = 0.0;
  bool converged = false;
};

/// For each scale c fits with gamma1 = gamma2 = c and reports
/// max_j |lambda_hat_j - lambda~_j(beta_hat)| / max_j lambda_hat_j.
std::vector<GapPoint> approximation_gap(const DesignMatrix& design, const Vector& ys,
                                        const std::vector<double>& scales, const SvrOptions& options);

}  // namespace smoothridge
