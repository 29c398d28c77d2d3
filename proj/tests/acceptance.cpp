// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "oracles.hpp"
#include "smoothridge/basis.hpp"
#include "smoothridge/gic.hpp"
#include "smoothridge/ridge.hpp"
#include "smoothridge/simlab.hpp"
#include "smoothridge/svreg.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

using namespace smoothridge;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
  if (!pass) ++failures;
}

struct Bench {
  SimConfig config;
  SimReport report;
  double seconds = 0.0;
};

Bench bench(FunctionId f, int n, double alpha, int trials) {
  Bench b;
  b.config.function = f;
  b.config.n = n;
  b.config.alpha = alpha;
  b.config.trials = trials;
  b.config.threads = 0;
  const auto t0 = std::chrono::steady_clock::now();
  b.report = run_benchmark(b.config);
  b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "[" << to_string(f) << "] " << b.seconds << " s, svr " << b.report.method(Method::svr).mean_mse
            << ", ridge " << b.report.method(Method::ridge).mean_mse << std::endl;
  return b;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

void benchmark_direction(int id, const Bench& b, double budget, bool with_ratio) {
  const double svr = b.report.method(Method::svr).mean_mse;
  const double ridge = b.report.method(Method::ridge).mean_mse;
  bool pass = b.report.ok && std::isfinite(svr) && std::isfinite(ridge) && b.seconds <= budget;
  std::string detail = "svr=" + fmt(svr) + " ridge=" + fmt(ridge);
  if (with_ratio) {
    const double ratio = svr / ridge;
    pass = pass && ratio < 0.9 && svr >= 0.5e-2 && svr <= 2.0e-2;
    detail += " ratio=" + fmt(ratio) + " (need < 0.9, svr in [0.005, 0.02])";
  } else {
    pass = pass && svr < ridge;
    detail += " (need svr < ridge)";
  }
  detail += " runtime=" + fmt(b.seconds) + "s (budget " + fmt(budget) + "s)";
  if (!b.report.ok) detail += " too many failed trials";
  report(id, pass, detail);
}

void closed_form_oracles() {
  auto g = oracle::rng(20240601);
  double worst_step = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const double lp = std::exp(oracle::uniform(g, -4, 2));
    const double ln = std::exp(oracle::uniform(g, -4, 2));
    const double r = std::exp(oracle::uniform(g, -6, 2));
    const double g1 = std::exp(oracle::uniform(g, -4, 2));
    const double g2 = std::exp(oracle::uniform(g, -4, 2));
    auto f = [&](double x) { return x * r + g1 * ((x - lp) * (x - lp) + (ln - x) * (ln - x)) - g2 * std::log(x); };
    const double ours = lambda_step_single(lp, ln, r, g1, g2, 2);
    const double hi = 10.0 * (ours + lp + ln + 1.0);
    const double rough = oracle::golden_min(f, 1e-12, hi, 1e-15);
    auto slope = [&](double x) { return r + 2 * g1 * (2 * x - lp - ln) - g2 / x; };
    const double ref = oracle::bisect_root(slope, rough * 0.5, std::min(hi, rough * 2.0));
    worst_step = std::max(worst_step, std::abs(ours - ref) / std::max(1.0, ref));
  }

  double worst_ridge = 0.0, worst_weighted = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 15 + rep % 6, m = 3 + rep % 3;
    Matrix xs(n, 1);
    for (int i = 0; i < n; ++i) xs(i, 0) = oracle::uniform(g, 0, 1);
    const Matrix phi = design_matrix(make_grid_basis({{0.0, 1.0}}, m, 1.5), xs).phi;
    const Vector ys = phi * oracle::normal_vec(g, m) + oracle::normal_vec(g, n, 0.4);
    oracle::Vec start = oracle::Vec::Zero(m + 1);
    start(0) = std::log(ys.squaredNorm() / n);

    const double lambda = std::pow(10.0, oracle::uniform(g, -4, 0));
    const FitResult rf = ridge_fit(phi, ys, RidgeConfig{lambda, 1e-12, 5000});
    const Vector lam_const = Vector::Constant(m, lambda);
    auto ridge_obj = [&](const oracle::Vec& v) {
      return oracle::weighted_objective(phi, ys, std::exp(v(0)), v.tail(m), lam_const);
    };
    const double ridge_ref = ridge_obj(oracle::bfgs(ridge_obj, start));
    const double ridge_ours = ridge_objective(phi, ys, rf.params, lambda);
    worst_ridge = std::max(worst_ridge, std::abs(ridge_ours - ridge_ref) / std::max(1.0, std::abs(ridge_ref)));

    const Vector lam = (oracle::normal_vec(g, m) * 1.5).array().exp() * 0.01;
    const ModelParams w = weighted_ridge_step(phi, ys, lam, 1e-12, 5000);
    auto w_obj = [&](const oracle::Vec& v) { return oracle::weighted_objective(phi, ys, std::exp(v(0)), v.tail(m), lam); };
    const double w_ref = w_obj(oracle::bfgs(w_obj, start));
    const double w_ours = oracle::weighted_objective(phi, ys, w.alpha(), w.beta(), lam);
    worst_weighted = std::max(worst_weighted, std::abs(w_ours - w_ref) / std::max(1.0, std::abs(w_ref)));
  }
  const bool pass = worst_step <= 1e-8 && worst_ridge <= 1e-6 && worst_weighted <= 1e-6;
  report(4, pass,
         "lambda step max err=" + fmt(worst_step) + " (1e-8), ridge max rel=" + fmt(worst_ridge) +
             ", weighted max rel=" + fmt(worst_weighted) + " (1e-6)");
}

void derivative_suite() {
  auto g = oracle::rng(777);
  double worst = 0.0;
  int draws = 0;
  while (draws < 100) {
    const Adjacency adj = Adjacency::chain(8);
    Vector b(8);
    for (int j = 0; j < 8; ++j) b(j) = oracle::uniform(g, 0.8, 2.0) * (oracle::uniform(g, 0, 1) < 0.5 ? -1 : 1);
    const double g1 = std::pow(10.0, oracle::uniform(g, -4, -1));
    const double g2 = std::pow(10.0, oracle::uniform(g, -3, 0));
    const LambdaTilde lt = lambda_tilde_derivatives(b, g1, g2, adj);
    if (lt.clamped_count() > 0) continue;
    ++draws;
    for (int j = 0; j < 8; ++j) {
      auto value = [&](const oracle::Vec& x) { return lambda_tilde(x, g1, g2, adj).values(j); };
      const oracle::Vec fd = oracle::fd_gradient(value, b, 1e-5);
      worst = std::max(worst, (lt.jac.row(j).transpose() - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff());
      oracle::Mat fdh(8, 8);
      for (int k = 0; k < 8; ++k) {
        const double h = 1e-5 * std::max(1.0, std::abs(b(k)));
        Vector bp = b, bm = b;
        bp(k) += h;
        bm(k) -= h;
        fdh.col(k) = (lambda_tilde_derivatives(bp, g1, g2, adj).jac.row(j) -
                      lambda_tilde_derivatives(bm, g1, g2, adj).jac.row(j)).transpose() / (2 * h);
      }
      const Matrix h = lt.hess[static_cast<std::size_t>(j)].dense(8);
      worst = std::max(worst, (h - fdh).cwiseAbs().maxCoeff() / h.cwiseAbs().maxCoeff());
    }
  }
  report(5, worst <= 1e-6, "max relative deviation=" + fmt(worst) + " over 100 draws (1e-6)");
}

void gic_reduction() {
  auto g = oracle::rng(99);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 30, m = 4 + rep % 5;
    Matrix xs(n, 1);
    for (int i = 0; i < n; ++i) xs(i, 0) = oracle::uniform(g, 0, 1);
    const Matrix phi = design_matrix(make_grid_basis({{0.0, 1.0}}, m, 1.3), xs).phi;
    const Vector ys = oracle::normal_vec(g, n);
    const double lambda = std::pow(10.0, oracle::uniform(g, -6, 1));
    const double alpha = std::pow(10.0, oracle::uniform(g, -2, 0.5));
    const FitResult f{ModelParams(alpha, oracle::normal_vec(g, m)), lambda, {0.0}, 1, true, std::nullopt, {}, 0.0};
    const double bias = ridge_gic(phi, ys, f, GicMode::expected).bias_term();
    // trace formula evaluated directly
    const Matrix gram = phi.transpose() * phi;
    Matrix a = gram;
    a.diagonal().array() += n * lambda * alpha;
    const double edf = a.ldlt().solve(gram).trace();
    worst = std::max(worst, std::abs(bias - 2 * (1 + edf)) / (2 * (1 + edf)));
  }
  Matrix xs(40, 1);
  for (int i = 0; i < 40; ++i) xs(i, 0) = i / 39.0;
  const Matrix phi = design_matrix(make_grid_basis({{0.0, 1.0}}, 6), xs).phi;
  const Vector ys = oracle::normal_vec(g, 40);
  const FitResult f0 = ridge_fit(phi, ys, RidgeConfig{0.0});
  const double bias0 = ridge_gic(phi, ys, f0, GicMode::expected).bias_term();
  const double err0 = std::abs(bias0 - 2.0 * (6 + 1)) / 14.0;
  report(6, worst <= 1e-8 && err0 <= 1e-8,
         "max relative gap to 2(1+edf)=" + fmt(worst) + ", lambda=0 gap to 2(m+1)=" + fmt(err0) + " (1e-8)");
}

// Exact-mode refit at each trial's selected gamma; paper-mode convergence from the benchmark records.
void descent_property(const std::vector<const Bench*>& benches) {
  int instances = 0, descending = 0, paper_total = 0, paper_converged = 0;
  for (const Bench* b : benches) {
    const BasisSpec spec = simulation_basis(b->config);
    for (const auto& tr : b->report.method(Method::svr).trials) {
      ++paper_total;
      if (tr.failed) continue;
      if (tr.converged) ++paper_converged;
      const SimData d = generate(b->config, tr.trial);
      const DesignMatrix design = design_matrix(spec, d.data.xs());
      SvrOptions o;
      o.gamma1 = tr.gamma1;
      o.gamma2 = tr.gamma2;
      o.boundary = BoundaryMode::exact;
      o.lambda_init = tr.lambda;
      ++instances;
      try {
        const FitResult f = svr_fit(design, d.data.ys(), o);
        bool ok = true;
        for (std::size_t k = 1; k < f.objective_trace.size(); ++k)
          if (f.objective_trace[k] > f.objective_trace[k - 1] + 1e-10 * std::abs(f.objective_trace[k - 1])) ok = false;
        if (ok) ++descending;
      } catch (const std::exception& e) {
        std::cerr << "exact refit failed: " << e.what() << std::endl;
      }
    }
  }
  const double rate = paper_total ? static_cast<double>(paper_converged) / paper_total : 0.0;
  report(7, instances > 0 && descending == instances && rate >= 0.95,
         "exact-mode descending " + std::to_string(descending) + "/" + std::to_string(instances) +
             ", paper-mode converged " + std::to_string(paper_converged) + "/" + std::to_string(paper_total) +
             " (need all, >= 95%)");
}

void gap_property() {
  SimConfig cfg;
  const SimData d = generate(cfg, 0);
  const DesignMatrix design = design_matrix(simulation_basis(cfg), d.data.xs());
  const auto gaps = approximation_gap(design, d.data.ys(), {1e-1, 1e-2, 1e-3}, SvrOptions{});
  const bool pass = gaps.size() == 3 && gaps[1].gap < gaps[0].gap && gaps[2].gap < gaps[1].gap;
  std::string detail = "gap(1e-1, 1e-2, 1e-3) =";
  for (const auto& p : gaps) detail += " " + fmt(p.gap);
  report(8, pass, detail + " (need strictly decreasing)");
}

void adaptivity(const Bench& chirp) {
  const BasisSpec spec = simulation_basis(chirp.config);
  int hits = 0, total = 0;
  for (const auto& tr : chirp.report.method(Method::svr).trials) {
    ++total;
    if (tr.failed || tr.lambda_hat.size() != spec.size()) continue;
    double left = 0, right = 0;
    int nl = 0, nr = 0;
    for (int j = 0; j < spec.size(); ++j) {
      if (spec.centers()(j, 0) <= 0.5) left += tr.lambda_hat(j), ++nl;
      else right += tr.lambda_hat(j), ++nr;
    }
    if (left / nl > right / nr) ++hits;
  }
  report(9, total == 20 && hits >= 18, "smooth half larger in " + std::to_string(hits) + "/" + std::to_string(total) +
                                           " trials (need >= 18/20)");
}

}  // namespace

int main() {
  try {
    const Bench peak = bench(FunctionId::peak10, 100, 0.05, 20);
    benchmark_direction(1, peak, 600.0, true);
    const Bench chirp = bench(FunctionId::chirp11, 100, 0.05, 20);
    benchmark_direction(2, chirp, 600.0, false);
    const Bench surface = bench(FunctionId::surface13, 900, 0.1, 5);
    benchmark_direction(3, surface, 1800.0, false);
    closed_form_oracles();
    derivative_suite();
    gic_reduction();
    descent_property({&peak, &chirp, &surface});
    gap_property();
    adaptivity(chirp);
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 100;
  }
  return failures;
}
