#include "smoothridge/gic.hpp"

#include "smoothridge/parallel.hpp"
#include "smoothridge/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>
#include <sstream>

namespace smoothridge {

namespace {

constexpr double kJacobianCondition = 1e12;

void check_gammas(double gamma1, double gamma2) {
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0)) throw ConfigError("gamma1 and gamma2 must be positive");
}

struct Reciprocals {
  Vector w, dw, d2w;  // 1/beta^2 and its first two derivatives (zero where floored)
};

Reciprocals reciprocals(const Vector& beta, double floor) {
  const Eigen::Index m = beta.size();
  Reciprocals r{Vector(m), Vector::Zero(m), Vector::Zero(m)};
  for (Eigen::Index k = 0; k < m; ++k) {
    const double b = beta(k);
    if (std::abs(b) > floor) {
      r.w(k) = 1.0 / (b * b);
      r.dw(k) = -2.0 / (b * b * b);
      r.d2w(k) = 6.0 / (b * b * b * b);
    } else {
      r.w(k) = 1.0 / (floor * floor);
    }
  }
  return r;
}

std::vector<int> support_of(int j, const Adjacency& adjacency) {
  std::vector<int> s = adjacency.neighbors(j);
  s.push_back(j);
  std::sort(s.begin(), s.end());
  return s;
}

LambdaTilde evaluate(const Vector& beta, double gamma1, double gamma2, const Adjacency& adjacency,
                     const TildeLimits& limits, bool derivatives) {
  check_gammas(gamma1, gamma2);
  const int m = static_cast<int>(beta.size());
  if (adjacency.size() != m) throw ConfigError("adjacency does not match coefficient count");
  if (!beta.allFinite()) throw ConfigError("coefficients must be finite");
  const Reciprocals rec = reciprocals(beta, limits.beta_floor);
  const double c = 2.0 * gamma1 * gamma2;

  LambdaTilde lt;
  lt.values.resize(m);
  lt.denominators.resize(m);
  lt.clamped_mask.assign(static_cast<std::size_t>(m), false);
  for (int j = 0; j < m; ++j) {
    double dw = adjacency.degree(j) * rec.w(j);
    for (int k : adjacency.neighbors(j)) dw -= rec.w(k);
    const double den = beta(j) * beta(j) - c * dw;
    lt.denominators(j) = den;
    double value = den > 0.0 ? gamma2 / den : limits.lambda_max;
    bool clamped = !(den > 0.0);
    if (value > limits.lambda_max) value = limits.lambda_max, clamped = true;
    if (value < limits.lambda_min) value = limits.lambda_min, clamped = true;
    lt.values(j) = value;
    lt.clamped_mask[static_cast<std::size_t>(j)] = clamped;
  }
  if (!derivatives) return lt;

  lt.jac = Matrix::Zero(m, m);
  lt.hess.resize(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    auto& h = lt.hess[static_cast<std::size_t>(j)];
    h.support = support_of(j, adjacency);
    const auto s = static_cast<Eigen::Index>(h.support.size());
    h.block = Matrix::Zero(s, s);
    if (lt.clamped_mask[static_cast<std::size_t>(j)]) continue;

    // Laplacian row j restricted to the support, and the derivatives of den_j.
    Vector grad(s);
    Vector curv(s);
    for (Eigen::Index a = 0; a < s; ++a) {
      const int k = h.support[static_cast<std::size_t>(a)];
      const double lap = k == j ? static_cast<double>(adjacency.degree(j)) : -1.0;
      grad(a) = (k == j ? 2.0 * beta(j) : 0.0) - c * lap * rec.dw(k);
      curv(a) = (k == j ? 2.0 : 0.0) - c * lap * rec.d2w(k);
    }
    const double den = lt.denominators(j);
    const double f1 = -gamma2 / (den * den);
    const double f2 = 2.0 * gamma2 / (den * den * den);
    for (Eigen::Index a = 0; a < s; ++a) lt.jac(j, h.support[static_cast<std::size_t>(a)]) = f1 * grad(a);
    h.block = f2 * grad * grad.transpose();
    h.block.diagonal() += f1 * curv;
  }
  return lt;
}

Matrix inverse_with_guard(const Matrix& a, bool& regularized) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
  if (smin > 0.0 && smax / smin <= kJacobianCondition) return a.inverse();
  regularized = true;
  Matrix shifted = a;
  shifted.diagonal().array() += 1e-12 * std::max(a.norm(), std::numeric_limits<double>::min());
  return shifted.fullPivLu().inverse();
}

}  // namespace

Matrix HessianBlock::dense(int m) const {
  Matrix out = Matrix::Zero(m, m);
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = 0; b < support.size(); ++b)
      out(support[a], support[b]) = block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return out;
}

int LambdaTilde::clamped_count() const {
  return static_cast<int>(std::count(clamped_mask.begin(), clamped_mask.end(), true));
}

LambdaTilde lambda_tilde(const Vector& beta, double gamma1, double gamma2, const Adjacency& adjacency,
                         const TildeLimits& limits) {
  return evaluate(beta, gamma1, gamma2, adjacency, limits, false);
}

LambdaTilde lambda_tilde_derivatives(const Vector& beta, double gamma1, double gamma2, const Adjacency& adjacency,
                                     const TildeLimits& limits) {
  return evaluate(beta, gamma1, gamma2, adjacency, limits, true);
}

StuMatrices assemble_stu(const Vector& beta, const LambdaTilde& lt, double gamma1, double gamma2,
                         const Adjacency& adjacency) {
  check_gammas(gamma1, gamma2);
  if (lt.jac.rows() != beta.size()) throw ConfigError("assemble_stu needs lambda~ derivatives");
  StuMatrices out;
  out.d = adjacency.laplacian();
  const Vector dl = out.d * lt.values;
  const Vector inv = lt.values.cwiseInverse();
  out.t = beta.cwiseAbs2() + 2.0 * gamma1 * dl - gamma2 * inv;
  out.u = beta.cwiseAbs2() + 2.0 * gamma1 * dl + gamma2 * inv;

  const Matrix jac_inv = inverse_with_guard(lt.jac, out.regularized);
  const Matrix jac_t_inv = jac_inv.transpose();
  out.s = 2.0 * jac_t_inv * beta.asDiagonal();
  out.s += 2.0 * beta.asDiagonal() * jac_inv;
  out.s += 2.0 * gamma1 * out.d;
  out.s.diagonal() += gamma2 * inv.cwiseAbs2();
  if (out.regularized) out.warning = "ill-conditioned lambda~ Jacobian; regularized inverse used in S";
  return out;
}

PenaltyDerivatives penalty_derivatives(const Vector& beta, double gamma1, double gamma2, const Adjacency& adjacency,
                                       const TildeLimits& limits) {
  const LambdaTilde lt = lambda_tilde_derivatives(beta, gamma1, gamma2, adjacency, limits);
  const int m = static_cast<int>(beta.size());
  const Matrix d = adjacency.laplacian();
  const Vector dl = d * lt.values;
  const Vector inv = lt.values.cwiseInverse();
  const Vector t = beta.cwiseAbs2() + 2.0 * gamma1 * dl - gamma2 * inv;
  const Vector u = beta.cwiseAbs2() + 2.0 * gamma1 * dl + gamma2 * inv;
  const Vector shrink = 2.0 * lt.values.cwiseProduct(beta);

  PenaltyDerivatives out;
  out.clamped = lt.clamped_count();
  out.gradient = shrink + lt.jac.transpose() * t;
  out.print_gradient = shrink + lt.jac.transpose() * u;

  Matrix curvature = 2.0 * gamma1 * d;
  curvature.diagonal() += gamma2 * inv.cwiseAbs2();
  const Matrix cross = 2.0 * beta.asDiagonal() * lt.jac;
  Matrix h = cross + cross.transpose();
  h += lt.jac.transpose() * curvature * lt.jac;
  h.diagonal() += 2.0 * lt.values;
  for (int j = 0; j < m; ++j) {
    const auto& blk = lt.hess[static_cast<std::size_t>(j)];
    for (std::size_t a = 0; a < blk.support.size(); ++a)
      for (std::size_t b = 0; b < blk.support.size(); ++b)
        h(blk.support[a], blk.support[b]) +=
            t(j) * blk.block(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  out.hessian = 0.5 * (h + h.transpose());
  return out;
}

GicReport approx_gic(const DesignMatrix& design, const Vector& ys, const FitResult& fit, GicMode mode) {
  if (fit.is_ridge()) throw ConfigError("approx_gic needs a smoothly varying fit");
  const LambdaState& state = fit.svr_state();
  const auto pd = penalty_derivatives(fit.params.beta(), state.gamma1(), state.gamma2(), design.adjacency);
  if (!pd.hessian.allFinite()) throw NumericalError("non-finite penalty Hessian");
  const Vector& gradient = mode == GicMode::expected ? pd.gradient : pd.print_gradient;
  return assemble_gic(design.phi, ys, fit.params, gradient, pd.hessian, mode);
}

std::vector<std::pair<double, double>> gamma_grid(const std::vector<double>& gamma1_axis,
                                                  const std::vector<double>& gamma2_axis) {
  std::vector<std::pair<double, double>> out;
  out.reserve(gamma1_axis.size() * gamma2_axis.size());
  for (double g1 : gamma1_axis)
    for (double g2 : gamma2_axis) out.emplace_back(g1, g2);
  return out;
}

std::vector<std::pair<double, double>> default_gamma_grid() {
  return gamma_grid(log_grid(1e-6, 1.0, 7), log_grid(1e-6, 1.0, 7));
}

GammaSelection gamma_select(const DesignMatrix& design, const Vector& ys,
                            const std::vector<std::pair<double, double>>& grid, const SvrOptions& options,
                            unsigned threads) {
  if (grid.empty()) throw ConfigError("gamma grid is empty");
  for (const auto& [g1, g2] : grid) check_gammas(g1, g2);

  SvrOptions base = options;
  double ridge_lambda = 0.0;
  if (std::holds_alternative<std::monostate>(base.lambda_init)) {
    ridge_lambda = ridge_select(design.phi, ys, default_lambda_grid(), threads).lambda;
    base.lambda_init = ridge_lambda;
  } else if (const auto* scalar = std::get_if<double>(&base.lambda_init)) {
    ridge_lambda = *scalar;
  }
  base.threads = 1;

  std::vector<GammaGridPoint> points(grid.size());
  std::vector<std::optional<FitResult>> fits(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    auto& p = points[k];
    std::tie(p.gamma1, p.gamma2) = grid[k];
    SvrOptions opt = base;
    opt.gamma1 = p.gamma1;
    opt.gamma2 = p.gamma2;
    try {
      FitResult fit = svr_fit(design, ys, opt);
      p.converged = fit.converged;
      p.beta = fit.params.beta();
      p.clamped = lambda_tilde(fit.params.beta(), p.gamma1, p.gamma2, design.adjacency).clamped_count();
      GicReport report = approx_gic(design, ys, fit, GicMode::expected);
      if (!std::isfinite(report.total())) throw NumericalError("non-finite GIC");
      p.gic = report.total();
      if (p.clamped > 0) {
        std::ostringstream os;
        os << p.clamped << " lambda~ entries clamped";
        fit.warnings.push_back(os.str());
      }
      fit.gic = report;
      fits[k] = std::move(fit);
    } catch (const Error& e) {
      p.error = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!points[k].gic) continue;
    if (!best) {
      best = k;
      continue;
    }
    const auto& p = points[k];
    const auto& b = points[*best];
    if (*p.gic < *b.gic) {
      best = k;
    } else if (*p.gic == *b.gic) {
      if (p.gamma1 > b.gamma1 || (p.gamma1 == b.gamma1 && p.gamma2 > b.gamma2)) best = k;
    }
  }
  if (!best) throw NumericalError("every gamma grid point failed to fit");
  GammaSelection out{points[*best].gamma1, points[*best].gamma2, std::move(*fits[*best]), std::move(points),
                     ridge_lambda};
  return out;
}

std::vector<GapPoint> approximation_gap(const DesignMatrix& design, const Vector& ys,
                                        const std::vector<double>& scales, const SvrOptions& options) {
  if (scales.size() < 2) throw ConfigError("approximation_gap needs at least two scales");
  SvrOptions base = options;
  if (std::holds_alternative<std::monostate>(base.lambda_init))
    base.lambda_init = ridge_select(design.phi, ys, default_lambda_grid(), options.threads).lambda;
  std::vector<GapPoint> out;
  for (double c : scales) {
    SvrOptions opt = base;
    opt.gamma1 = c;
    opt.gamma2 = c;
    const FitResult fit = svr_fit(design, ys, opt);
    const Vector& fitted = fit.svr_state().lambda();
    const LambdaTilde lt = lambda_tilde(fit.params.beta(), c, c, design.adjacency);
    const double gap = (fitted - lt.values).cwiseAbs().maxCoeff() / fitted.maxCoeff();
    out.push_back(GapPoint{c, gap, fit.converged});
  }
  return out;
}

}  // namespace smoothridge
