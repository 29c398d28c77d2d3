#include "smoothridge/svreg.hpp"

#include "smoothridge/ridge.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace smoothridge {

namespace {

double relative_change(double before, double after) {
  return std::abs(after - before) / std::max(std::abs(after), std::numeric_limits<double>::min());
}

double relative_change(const Vector& before, const Vector& after) {
  const double scale = std::max(after.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (after - before).cwiseAbs().maxCoeff() / scale;
}

// Per-coordinate: lambda spans many orders of magnitude across centers.
double relative_change_positive(const Vector& before, const Vector& after) {
  return ((after - before).array().abs() / after.array()).maxCoeff();
}

Vector initial_lambda(const Matrix& phi, const Vector& ys, const SvrOptions& options) {
  const Eigen::Index m = phi.cols();
  if (const auto* scalar = std::get_if<double>(&options.lambda_init)) {
    if (!(*scalar > 0.0) || !std::isfinite(*scalar)) throw ConfigError("lambda_init must be positive");
    return Vector::Constant(m, *scalar);
  }
  if (const auto* vec = std::get_if<Vector>(&options.lambda_init)) {
    if (vec->size() != m) throw ConfigError("lambda_init length does not match basis");
    if (!((vec->array() > 0.0).all()) || !vec->allFinite()) throw ConfigError("lambda_init must be positive");
    return *vec;
  }
  return Vector::Constant(m, ridge_select(phi, ys, default_lambda_grid(), options.threads).lambda);
}

}  // namespace

std::string_view to_string(BoundaryMode mode) { return mode == BoundaryMode::paper ? "paper" : "exact"; }

BoundaryMode parse_boundary_mode(std::string_view text) {
  if (text == "paper") return BoundaryMode::paper;
  if (text == "exact") return BoundaryMode::exact;
  throw ConfigError("unknown boundary mode '" + std::string(text) + "'");
}

double svr_objective(const Matrix& phi, const Vector& ys, const ModelParams& params, const LambdaState& state,
                     const Adjacency& adjacency) {
  const Vector& lambda = state.lambda();
  const Vector& beta = params.beta();
  if (lambda.size() != beta.size() || adjacency.size() != beta.size())
    throw ConfigError("tuning parameter count does not match basis");
  const double n = static_cast<double>(ys.size());
  double coef = 0.0;
  double log_sum = 0.0;
  for (Eigen::Index j = 0; j < lambda.size(); ++j) {
    coef += lambda(j) * beta(j) * beta(j);
    log_sum += std::log(lambda(j));
  }
  double smooth = 0.0;
  for (const auto& [a, b] : adjacency.edges()) {
    const double d = lambda(a) - lambda(b);
    smooth += d * d;
  }
  const double penalty = coef + state.gamma1() * smooth - state.gamma2() * log_sum;
  return neg2_loglik(phi, ys, params) + n * penalty;
}

ModelParams weighted_ridge_step(const Matrix& phi, const Vector& ys, const Vector& lambda, double tol,
                                int max_iter, std::optional<double> alpha_start) {
  if ((lambda.array() <= 0.0).any()) throw ConfigError("tuning parameters must be positive");
  NormalEquations sys(phi, ys);
  return alternate_alpha_beta(sys, lambda, tol, max_iter, alpha_start).params;
}

double lambda_coordinate_update(double neighbor_sum, double r_beta, double gamma1, double gamma2, int degree) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw ConfigError("gamma1 and gamma2 must be positive");
  if (degree < 1) throw ConfigError("neighbor degree must be at least 1");
  const double d = static_cast<double>(degree);
  const double b = 2.0 * gamma1 * neighbor_sum - r_beta;
  const double disc = std::sqrt(b * b + 8.0 * d * gamma1 * gamma2);
  // Rationalized form avoids cancellation when b is large and negative.
  if (b >= 0.0) return (b + disc) / (4.0 * d * gamma1);
  return 2.0 * gamma2 / (disc - b);
}

double lambda_step_single(double lambda_prev, double lambda_next, double r_beta, double gamma1, double gamma2,
                          int degree) {
  return lambda_coordinate_update(lambda_prev + lambda_next, r_beta, gamma1, gamma2, degree);
}

Vector lambda_sweep(const Vector& lambda, const Vector& r_values, double gamma1, double gamma2,
                    const Adjacency& adjacency, BoundaryMode mode) {
  if (lambda.size() != r_values.size() || adjacency.size() != lambda.size())
    throw ConfigError("lambda sweep size mismatch");
  Vector out = lambda;
  const int padded = adjacency.lattice_degree();
  for (int j = 0; j < adjacency.size(); ++j) {
    double sum = 0.0;
    for (int k : adjacency.neighbors(j)) sum += out(k);
    // Phantom neighbors are zero, so only the degree changes in paper mode.
    const int degree = mode == BoundaryMode::paper ? padded : adjacency.degree(j);
    out(j) = lambda_coordinate_update(sum, r_values(j), gamma1, gamma2, std::max(degree, 1));
  }
  return out;
}

FitResult svr_fit(const DesignMatrix& design, const Vector& ys, const SvrOptions& options) {
  const Matrix& phi = design.phi;
  if (!(options.gamma1 > 0.0) || !(options.gamma2 > 0.0)) throw ConfigError("gamma1 and gamma2 must be positive");
  if (!(options.tol > 0.0) || options.max_iter < 1) throw ConfigError("invalid svr tolerance or max_iter");
  if (design.adjacency.size() != phi.cols()) throw ConfigError("adjacency does not match design matrix");

  NormalEquations sys(phi, ys);
  Vector lambda = initial_lambda(phi, ys, options);

  std::vector<double> trace;
  std::vector<std::string> warnings;
  std::optional<ModelParams> params;
  bool converged = false;
  int iterations = 0;

  for (int t = 1; t <= options.max_iter; ++t) {
    std::optional<double> warm;
    if (params) warm = params->alpha();
    AlternationResult step{ModelParams(1.0, Vector::Zero(phi.cols())), 0, false};
    try {
      step = alternate_alpha_beta(sys, lambda, options.inner_tol, options.inner_max_iter, warm);
    } catch (const DegenerateFitError& e) {
      const double floor = alpha_floor(ys);
      params = ModelParams(std::max(e.alpha(), floor), e.beta());
      warnings.push_back(std::string(e.what()) + "; returned iterate has alpha raised to the floor");
      iterations = t;
      break;
    }
    if (!step.converged && warnings.empty())
      warnings.push_back("inner (alpha, beta) alternation hit its iteration cap");

    Vector next_lambda = lambda_sweep(lambda, step.params.beta().cwiseAbs2(), options.gamma1, options.gamma2,
                                      design.adjacency, options.boundary);
    LambdaState state(next_lambda, options.gamma1, options.gamma2);
    trace.push_back(svr_objective(phi, ys, step.params, state, design.adjacency));

    double change = std::numeric_limits<double>::infinity();
    if (params) {
      change = std::max({relative_change(params->alpha(), step.params.alpha()),
                         relative_change(params->beta(), step.params.beta()),
                         relative_change_positive(lambda, next_lambda)});
    }
    params = std::move(step.params);
    lambda = std::move(next_lambda);
    iterations = t;
    if (change < options.tol) {
      converged = true;
      break;
    }
  }

  if (!converged && warnings.empty()) {
    std::ostringstream os;
    os << "did not converge within " << options.max_iter << " iterations";
    warnings.push_back(os.str());
  }
  FitResult fit{std::move(*params), LambdaState(lambda, options.gamma1, options.gamma2), std::move(trace),
                iterations, converged, std::nullopt, std::move(warnings), 0.0};
  return fit;
}

}  // namespace smoothridge
