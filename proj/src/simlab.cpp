#include "smoothridge/simlab.hpp"

#include "smoothridge/gic.hpp"
#include "smoothridge/parallel.hpp"
#include "smoothridge/ridge.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace smoothridge {

namespace {

double gauss_bump(const Vector& x, double cx, double cy, double rate) {
  const double dx = x(0) - cx;
  const double dy = x(1) - cy;
  return std::exp(-rate * (dx * dx + dy * dy));
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector axis(const Interval& iv, int count) {
  Vector v(count);
  if (count == 1) {
    v(0) = iv.lo;
    return v;
  }
  for (int k = 0; k < count; ++k) v(k) = iv.lo + iv.length() * static_cast<double>(k) / (count - 1);
  v(count - 1) = iv.hi;
  return v;
}

int exact_sqrt(int n) {
  int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  while (k * k > n) --k;
  while ((k + 1) * (k + 1) <= n) ++k;
  return k;
}

struct TrialOutcome {
  std::vector<TrialRecord> records;  // one per method
  std::vector<Vector> betas;         // empty vector when the method failed
};

}  // namespace

std::string_view to_string(FunctionId id) {
  switch (id) {
    case FunctionId::peak10: return "peak10";
    case FunctionId::chirp11: return "chirp11";
    case FunctionId::surface13: return "surface13";
  }
  return "unknown";
}

FunctionId parse_function_id(std::string_view text) {
  if (text == "peak10") return FunctionId::peak10;
  if (text == "chirp11") return FunctionId::chirp11;
  if (text == "surface13") return FunctionId::surface13;
  throw ConfigError("unknown function '" + std::string(text) + "' (peak10, chirp11, surface13)");
}

std::vector<Interval> function_domain(FunctionId id) {
  switch (id) {
    case FunctionId::peak10: return {Interval{-2.0, 2.0}};
    case FunctionId::chirp11: return {Interval{0.0, 1.0}};
    case FunctionId::surface13: return {Interval{0.0, 1.0}, Interval{0.0, 1.0}};
  }
  throw ConfigError("unknown function");
}

double true_function(FunctionId id, const Vector& x) {
  const auto domain = function_domain(id);
  if (static_cast<std::size_t>(x.size()) != domain.size()) throw ConfigError("point dimension mismatch");
  for (std::size_t k = 0; k < domain.size(); ++k)
    if (!domain[k].contains(x(static_cast<Eigen::Index>(k))))
      throw DataError("point outside the function domain");
  switch (id) {
    case FunctionId::peak10: return std::sin(x(0)) + 2.0 * std::exp(-30.0 * x(0) * x(0));
    case FunctionId::chirp11: {
      const double e = std::exp(x(0));
      return std::sin(32.0 * e * e * e);
    }
    case FunctionId::surface13:
      return gauss_bump(x, 0.25, 0.25, 30.0) + gauss_bump(x, 0.25, 0.75, 30.0) + gauss_bump(x, 0.75, 0.25, 30.0) +
             gauss_bump(x, 0.6, 0.6, 100.0) + gauss_bump(x, 0.6, 0.9, 100.0) + gauss_bump(x, 0.9, 0.6, 100.0) +
             gauss_bump(x, 0.9, 0.9, 100.0);
  }
  throw ConfigError("unknown function");
}

std::string_view to_string(Method method) { return method == Method::svr ? "svr" : "ridge"; }

Method parse_method(std::string_view text) {
  if (text == "svr") return Method::svr;
  if (text == "ridge") return Method::ridge;
  throw ConfigError("unknown method '" + std::string(text) + "' (svr, ridge)");
}

void SimConfig::validate() const {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (methods.empty()) throw ConfigError("no methods requested");
  if (m_per_dim && *m_per_dim < 2) throw ConfigError("need at least 2 centers per dimension");
  if (!(width_scale > 0.0)) throw ConfigError("width scale must be positive");
  if (function == FunctionId::surface13) {
    const int k = exact_sqrt(n);
    if (k * k != n) throw ConfigError("surface designs need a perfect-square n");
  }
}

BasisSpec simulation_basis(const SimConfig& config) {
  const auto domain = function_domain(config.function);
  return make_grid_basis(domain, config.m_per_dim.value_or(default_centers_per_dim(domain.size())),
                         config.width_scale);
}

std::uint64_t trial_seed(std::uint64_t seed, int trial) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(trial));
}

SimData generate(const SimConfig& config, int trial) {
  config.validate();
  if (trial < 0 || trial >= config.trials) throw ConfigError("trial index out of range");
  const auto domain = function_domain(config.function);
  Matrix xs;
  if (domain.size() == 1) {
    xs = axis(domain[0], config.n);
  } else {
    const int k = exact_sqrt(config.n);
    const Vector a = axis(domain[0], k);
    const Vector b = axis(domain[1], k);
    xs.resize(config.n, 2);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) xs.row(i * k + j) << a(i), b(j);
  }
  std::mt19937_64 rng(trial_seed(config.seed, trial));
  std::normal_distribution<double> noise(0.0, std::sqrt(config.alpha));
  Vector truth(config.n);
  Vector ys(config.n);
  for (int i = 0; i < config.n; ++i) {
    truth(i) = true_function(config.function, xs.row(i).transpose());
    ys(i) = truth(i) + noise(rng);
  }
  return SimData{Dataset(std::move(xs), std::move(ys), domain), std::move(truth)};
}

double mse(const FitResult& fit, const BasisSpec& spec, const Dataset& data, const Vector& truth) {
  if (truth.size() != static_cast<Eigen::Index>(data.size())) throw ConfigError("truth length mismatch");
  const Vector fitted = predict(spec, fit.params.beta(), data.xs()).array() + fit.response_offset;
  return (fitted - truth).squaredNorm() / static_cast<double>(truth.size());
}

std::pair<double, double> summarize(const std::vector<TrialRecord>& trials) {
  double sum = 0.0;
  int count = 0;
  for (const auto& t : trials)
    if (!t.failed) sum += t.mse, ++count;
  if (count == 0) return {std::nan(""), std::nan("")};
  const double mean = sum / count;
  double ss = 0.0;
  for (const auto& t : trials)
    if (!t.failed) ss += (t.mse - mean) * (t.mse - mean);
  return {mean, count > 1 ? std::sqrt(ss / (count - 1)) : 0.0};
}

Matrix evaluation_grid(const std::vector<Interval>& domain) {
  if (domain.size() == 1) return axis(domain[0], 512);
  if (domain.size() != 2) throw ConfigError("evaluation grid needs a 1D or 2D domain");
  constexpr int k = 64;
  const Vector a = axis(domain[0], k);
  const Vector b = axis(domain[1], k);
  Matrix out(k * k, 2);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) out.row(i * k + j) << a(i), b(j);
  return out;
}

const MethodReport& SimReport::method(Method m) const {
  for (const auto& r : methods)
    if (r.method == m) return r;
  throw ConfigError("method not present in report");
}

SimReport run_benchmark(const SimConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const BasisSpec spec = simulation_basis(config);
  const auto lambda_grid = config.lambda_grid.empty() ? default_lambda_grid() : config.lambda_grid;
  const auto gammas = config.gamma_grid.empty() ? default_gamma_grid() : config.gamma_grid;
  const std::size_t nm = config.methods.size();

  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
  parallel_for(outcomes.size(), config.threads, [&](std::size_t t) {
    const int trial = static_cast<int>(t);
    auto& out = outcomes[t];
    out.records.assign(nm, TrialRecord{});
    out.betas.assign(nm, Vector());
    std::optional<SimData> sim;
    std::optional<DesignMatrix> design;
    std::optional<double> ridge_lambda;
    try {
      sim = generate(config, trial);
      validate_compatibility(sim->data, spec);
      design = design_matrix(spec, sim->data.xs());
    } catch (const Error& e) {
      for (auto& r : out.records) r.trial = trial, r.failed = true, r.error = e.what();
      return;
    }
    const Vector& ys = sim->data.ys();
    for (std::size_t k = 0; k < nm; ++k) {
      auto& rec = out.records[k];
      rec.trial = trial;
      try {
        if (config.methods[k] == Method::ridge) {
          auto sel = ridge_select(design->phi, ys, lambda_grid, 1);
          ridge_lambda = sel.lambda;
          rec.lambda = sel.lambda;
          rec.converged = sel.fit.converged;
          rec.iterations = sel.fit.iterations;
          rec.objective_trace = sel.fit.objective_trace;
          rec.mse = mse(sel.fit, spec, sim->data, sim->truth);
          out.betas[k] = sel.fit.params.beta();
        } else {
          SvrOptions options;
          options.boundary = config.boundary;
          if (!ridge_lambda) ridge_lambda = ridge_select(design->phi, ys, lambda_grid, 1).lambda;
          options.lambda_init = *ridge_lambda;
          auto sel = gamma_select(*design, ys, gammas, options, 1);
          rec.gamma1 = sel.gamma1;
          rec.gamma2 = sel.gamma2;
          rec.lambda = *ridge_lambda;
          rec.lambda_hat = sel.fit.svr_state().lambda();
          rec.converged = sel.fit.converged;
          rec.iterations = sel.fit.iterations;
          rec.objective_trace = sel.fit.objective_trace;
          rec.mse = mse(sel.fit, spec, sim->data, sim->truth);
          out.betas[k] = sel.fit.params.beta();
        }
      } catch (const Error& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  });

  SimReport report;
  report.config = config;
  const Matrix grid = evaluation_grid(spec.domain());
  for (std::size_t k = 0; k < nm; ++k) {
    MethodReport mr;
    mr.method = config.methods[k];
    for (const auto& o : outcomes) {
      mr.trials.push_back(o.records[k]);
      if (o.records[k].failed) {
        mr.failed_trials.push_back(o.records[k].trial);
      } else if (!mr.first_curve) {
        mr.first_curve = std::make_pair(grid, predict(spec, o.betas[k], grid));
      }
    }
    std::tie(mr.mean_mse, mr.sd_mse) = summarize(mr.trials);
    if (!mr.failed_trials.empty()) {
      std::ostringstream os;
      os << to_string(mr.method) << ": " << mr.failed_trials.size() << " of " << config.trials
         << " trials failed and were excluded";
      report.warnings.push_back(os.str());
    }
    if (10 * mr.failed_trials.size() > static_cast<std::size_t>(config.trials)) report.ok = false;
    report.methods.push_back(std::move(mr));
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace smoothridge
