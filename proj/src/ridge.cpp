#include "smoothridge/ridge.hpp"

#include "smoothridge/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace smoothridge {

namespace {

constexpr double kSingularRcond = 1e-13;

double relative_change(double before, double after) {
  return std::abs(after - before) / std::max(std::abs(after), std::numeric_limits<double>::min());
}

double relative_change(const Vector& before, const Vector& after) {
  const double scale = std::max(after.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (after - before).cwiseAbs().maxCoeff() / scale;
}

Vector solve_penalized(const NormalEquations& sys, const Vector& lambda, double alpha) {
  const double n = static_cast<double>(sys.n());
  Matrix a = sys.gram();
  a.diagonal() += n * alpha * lambda;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericalError("singular system: penalized normal equations are not positive definite");
  if (lambda.maxCoeff() == 0.0) {
    const double rc = llt.rcond();
    if (!(rc > kSingularRcond)) {
      std::ostringstream os;
      os << "singular system: design matrix is rank deficient at lambda = 0 (rcond " << rc << ")";
      throw NumericalError(os.str(), rc);
    }
  }
  return llt.solve(sys.phity());
}

double population_variance(const Vector& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().mean();
}

}  // namespace

DegenerateFitError::DegenerateFitError(const std::string& what, double alpha, Vector beta)
    : NumericalError(what), alpha_(alpha), beta_(std::move(beta)) {}

NormalEquations::NormalEquations(const Matrix& phi, const Vector& ys)
    : phi_(phi), ys_(ys), gram_(phi.transpose() * phi), phity_(phi.transpose() * ys) {
  if (phi.rows() != ys.size()) throw ConfigError("design matrix rows do not match responses");
  if (phi.cols() < 1) throw ConfigError("design matrix has no columns");
}

double alpha_floor(const Vector& ys) {
  const double scale = ys.squaredNorm() / static_cast<double>(ys.size());
  return 1e-12 * std::max(scale, std::numeric_limits<double>::min());
}

AlternationResult alternate_alpha_beta(const NormalEquations& sys, const Vector& lambda, double tol,
                                       int max_iter, std::optional<double> alpha_start) {
  if (lambda.size() != sys.m()) throw ConfigError("tuning parameter count does not match basis");
  if ((lambda.array() < 0.0).any() || !lambda.allFinite())
    throw ConfigError("tuning parameters must be finite and non-negative");
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");

  const double n = static_cast<double>(sys.n());
  const double floor = alpha_floor(sys.ys());
  auto check_floor = [&](double alpha, const Vector& beta) {
    if (!(alpha >= floor)) {
      std::ostringstream os;
      os << "noise variance collapsed below floor " << floor << " (degenerate interpolation)";
      throw DegenerateFitError(os.str(), alpha, beta);
    }
  };

  if (lambda.maxCoeff() == 0.0) {
    // alpha does not enter the unpenalized normal equations.
    Vector beta = solve_penalized(sys, lambda, 1.0);
    const double alpha = sys.rss(beta) / n;
    check_floor(alpha, beta);
    return {ModelParams(alpha, std::move(beta)), 1, true};
  }

  double start = alpha_start.value_or(0.0);
  if (!(start > 0.0)) {
    start = population_variance(sys.ys());
    if (!(start > 0.0)) start = std::max(sys.ys().squaredNorm() / n, 1.0);
  }
  Vector beta = solve_penalized(sys, lambda, start);
  double alpha = sys.rss(beta) / n;
  check_floor(alpha, beta);

  for (int it = 1; it <= max_iter; ++it) {
    Vector next_beta = solve_penalized(sys, lambda, alpha);
    const double next_alpha = sys.rss(next_beta) / n;
    check_floor(next_alpha, next_beta);
    const double change = std::max(relative_change(alpha, next_alpha), relative_change(beta, next_beta));
    beta = std::move(next_beta);
    alpha = next_alpha;
    if (change < tol) return {ModelParams(alpha, std::move(beta)), it, true};
  }
  return {ModelParams(alpha, std::move(beta)), max_iter, false};
}

double neg2_loglik(const Matrix& phi, const Vector& ys, const ModelParams& params) {
  const double n = static_cast<double>(ys.size());
  const double rss = (ys - phi * params.beta()).squaredNorm();
  return n * std::log(2.0 * std::numbers::pi * params.alpha()) + rss / params.alpha();
}

double ridge_objective(const Matrix& phi, const Vector& ys, const ModelParams& params, double lambda) {
  const double n = static_cast<double>(ys.size());
  return neg2_loglik(phi, ys, params) + n * lambda * params.beta().squaredNorm();
}

FitResult ridge_fit(const Matrix& phi, const Vector& ys, const RidgeConfig& config) {
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda))
    throw ConfigError("ridge lambda must be finite and non-negative");
  NormalEquations sys(phi, ys);
  const Vector lambda = Vector::Constant(phi.cols(), config.lambda);
  auto solved = alternate_alpha_beta(sys, lambda, config.tol, config.max_iter);
  const double objective = ridge_objective(phi, ys, solved.params, config.lambda);
  FitResult fit{std::move(solved.params), config.lambda, {objective}, solved.iterations, solved.converged,
                std::nullopt, {}, 0.0};
  if (!fit.converged) fit.warnings.push_back("ridge alternation reached max_iter before converging");
  return fit;
}

double ridge_edf(const Matrix& phi, double lambda, double alpha) {
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be non-negative");
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  const Matrix gram = phi.transpose() * phi;
  Matrix a = gram;
  a.diagonal().array() += static_cast<double>(phi.rows()) * lambda * alpha;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kSingularRcond))
    throw NumericalError("singular system in effective degrees of freedom", llt.rcond());
  return llt.solve(gram).trace();
}

GicMatrices gic_matrices(const Matrix& phi, const Vector& ys, const ModelParams& params,
                         const Vector& penalty_gradient, const Matrix& penalty_hessian, GicMode mode) {
  const Eigen::Index m = phi.cols();
  const double n = static_cast<double>(ys.size());
  const double a = params.alpha();
  const double a2 = a * a;
  const double a3 = a2 * a;
  GicMatrices out{Matrix::Zero(m + 1, m + 1), Matrix::Zero(m + 1, m + 1)};
  auto& jm = out.j;
  auto& im = out.i;

  if (mode == GicMode::expected) {
    // E eps = E eps^3 = 0, E eps^2 = alpha, E eps^4 = 3 alpha^2.
    const Matrix gram = phi.transpose() * phi;
    jm(0, 0) = n / a2;
    jm.bottomRightCorner(m, m) = (2.0 / a) * gram + n * penalty_hessian;
    im(0, 0) = 3.0 * n / (2.0 * a2) - n / (2.0 * a2);
    im.bottomRightCorner(m, m) = (2.0 / a2) * a * gram;
    return out;
  }

  const Vector eps = ys - phi * params.beta();
  Vector psi(m + 1);
  Vector dl(m + 1);
  for (Eigen::Index i = 0; i < phi.rows(); ++i) {
    const double e = eps(i);
    const auto row = phi.row(i).transpose();
    jm(0, 0) += 2.0 * e * e / a3 - 1.0 / a2;
    jm.block(0, 1, 1, m) += (2.0 * e / a2) * row.transpose();
    jm.block(1, 0, m, 1) += (2.0 * e / a2) * row;
    jm.bottomRightCorner(m, m).noalias() += (2.0 / a) * row * row.transpose();

    psi(0) = -1.0 / a + e * e / a2;
    psi.tail(m) = (2.0 * e / a) * row - penalty_gradient;
    dl(0) = 0.5 * (e * e / a2 - 1.0 / a);
    dl.tail(m) = (e / a) * row;
    im.noalias() += psi * dl.transpose();
  }
  jm.bottomRightCorner(m, m) += n * penalty_hessian;
  return out;
}

GicReport assemble_gic(const Matrix& phi, const Vector& ys, const ModelParams& params,
                       const Vector& penalty_gradient, const Matrix& penalty_hessian, GicMode mode) {
  const auto mats = gic_matrices(phi, ys, params, penalty_gradient, penalty_hessian, mode);
  if (!mats.j.allFinite() || !mats.i.allFinite()) throw NumericalError("non-finite bias matrices");
  // Symmetric equilibration: the alpha entry and heavily penalized
  // coefficients sit many orders of magnitude apart.
  const Vector scale = mats.j.diagonal().cwiseAbs().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
  const Matrix j_scaled = scale.asDiagonal() * mats.j * scale.asDiagonal();
  Eigen::PartialPivLU<Matrix> lu(j_scaled);
  const double rc = lu.rcond();
  if (!std::isfinite(rc) || !(rc > 1e-14)) {
    std::ostringstream os;
    os << "singular bias matrix J (rcond " << rc << ")";
    throw NumericalError(os.str(), rc);
  }
  // tr(J^{-1} I) = tr(Js^{-1} S I S) with J = S^{-1} Js S^{-1}.
  const Matrix i_scaled = scale.asDiagonal() * mats.i * scale.asDiagonal();
  const double trace = lu.solve(i_scaled).trace();
  return GicReport(neg2_loglik(phi, ys, params), 2.0 * trace, mode);
}

GicReport ridge_gic(const Matrix& phi, const Vector& ys, const FitResult& fit, GicMode mode) {
  if (!fit.is_ridge()) throw ConfigError("ridge_gic needs a ridge fit");
  if (!fit.converged) throw NumericalError("ridge fit did not converge");
  const double lambda = fit.ridge_lambda();
  const Eigen::Index m = phi.cols();
  const Vector gradient = 2.0 * lambda * fit.params.beta();
  const Matrix hessian = 2.0 * lambda * Matrix::Identity(m, m);
  return assemble_gic(phi, ys, fit.params, gradient, hessian, mode);
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw ConfigError("invalid log grid");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = std::pow(10.0, a + (b - a) * k / (count - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_lambda_grid() { return log_grid(1e-8, 1e2, 25); }

RidgeSelection ridge_select(const Matrix& phi, const Vector& ys, const std::vector<double>& lambda_grid,
                            unsigned threads) {
  if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");
  std::vector<RidgeGridPoint> points(lambda_grid.size());
  std::vector<std::optional<FitResult>> fits(lambda_grid.size());
  parallel_for(lambda_grid.size(), threads, [&](std::size_t k) {
    points[k].lambda = lambda_grid[k];
    try {
      FitResult fit = ridge_fit(phi, ys, RidgeConfig{lambda_grid[k]});
      GicReport report = ridge_gic(phi, ys, fit, GicMode::expected);
      if (!std::isfinite(report.total())) throw NumericalError("non-finite GIC");
      points[k].gic = report.total();
      fit.gic = report;
      fits[k] = std::move(fit);
    } catch (const Error& e) {
      points[k].error = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!points[k].gic) continue;
    if (!best) {
      best = k;
      continue;
    }
    const double g = *points[k].gic;
    const double b = *points[*best].gic;
    if (g < b || (g == b && points[k].lambda > points[*best].lambda)) best = k;
  }
  if (!best) throw NumericalError("every lambda grid point failed to fit");
  return RidgeSelection{points[*best].lambda, std::move(*fits[*best]), std::move(points)};
}

}  // namespace smoothridge
