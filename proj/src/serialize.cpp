#include "smoothridge/serialize.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

namespace smoothridge {

using nlohmann::ordered_json;

namespace {

ordered_json vector_json(const Vector& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

Vector vector_from(const ordered_json& arr) {
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) v(static_cast<Eigen::Index>(k)) = arr[k].get<double>();
  return v;
}

ordered_json trial_json(const TrialRecord& t, Method method) {
  ordered_json j;
  j["trial"] = t.trial;
  j["failed"] = t.failed;
  if (t.failed) {
    j["error"] = t.error;
    return j;
  }
  j["mse"] = t.mse;
  if (method == Method::svr) {
    j["gamma1"] = t.gamma1;
    j["gamma2"] = t.gamma2;
    j["lambda_init"] = t.lambda;
    j["lambda"] = vector_json(t.lambda_hat);
  } else {
    j["lambda"] = t.lambda;
  }
  j["converged"] = t.converged;
  j["iterations"] = t.iterations;
  return j;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

ordered_json to_json(const GicReport& report) {
  ordered_json j;
  j["neg2_loglik"] = report.neg2_loglik();
  j["bias_term"] = report.bias_term();
  j["total"] = report.total();
  j["mode"] = std::string(to_string(report.mode()));
  return j;
}

ordered_json to_json(const FitResult& fit) {
  ordered_json j;
  j["params"] = {{"alpha", fit.params.alpha()}, {"beta", vector_json(fit.params.beta())}};
  if (fit.is_ridge()) {
    j["lambda_state"] = fit.ridge_lambda();
  } else {
    const auto& s = fit.svr_state();
    j["lambda_state"] = {{"lambda", vector_json(s.lambda())}, {"gamma1", s.gamma1()}, {"gamma2", s.gamma2()}};
  }
  j["objective_trace"] = fit.objective_trace;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["gic"] = fit.gic ? to_json(*fit.gic) : ordered_json(nullptr);
  j["warnings"] = fit.warnings;
  j["response_offset"] = fit.response_offset;
  return j;
}

ordered_json to_json(const SimConfig& c) {
  ordered_json j;
  j["function_id"] = std::string(to_string(c.function));
  j["n"] = c.n;
  j["alpha"] = c.alpha;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  ordered_json methods = ordered_json::array();
  for (Method m : c.methods) methods.push_back(std::string(to_string(m)));
  j["methods"] = methods;
  j["m_per_dim"] = c.m_per_dim ? ordered_json(*c.m_per_dim) : ordered_json(nullptr);
  j["width_scale"] = c.width_scale;
  j["boundary"] = std::string(to_string(c.boundary));
  ordered_json gg = ordered_json::array();
  for (const auto& [g1, g2] : c.gamma_grid) gg.push_back({g1, g2});
  j["gamma_grid"] = gg;
  j["lambda_grid"] = c.lambda_grid;
  return j;
}

ordered_json to_json(const SimReport& report, bool include_runtime) {
  ordered_json j;
  j["config"] = to_json(report.config);
  ordered_json methods = ordered_json::object();
  for (const auto& m : report.methods) {
    ordered_json mj;
    mj["mean_mse"] = m.mean_mse;
    mj["sd_mse"] = m.sd_mse;
    ordered_json per = ordered_json::array();
    for (const auto& t : m.trials) per.push_back(t.failed ? ordered_json(nullptr) : ordered_json(t.mse));
    mj["per_trial_mse"] = per;
    ordered_json trials = ordered_json::array();
    for (const auto& t : m.trials) trials.push_back(trial_json(t, m.method));
    mj["trials"] = trials;
    mj["failed_trials"] = m.failed_trials;
    methods[std::string(to_string(m.method))] = mj;
  }
  j["methods"] = methods;
  j["warnings"] = report.warnings;
  j["ok"] = report.ok;
  if (include_runtime) j["runtime_seconds"] = report.runtime_seconds;
  return j;
}

GicReport gic_report_from_json(const ordered_json& j) {
  return GicReport(j.at("neg2_loglik").get<double>(), j.at("bias_term").get<double>(),
                   parse_gic_mode(j.at("mode").get<std::string>()));
}

FitResult fit_result_from_json(const ordered_json& j) {
  const auto& p = j.at("params");
  ModelParams params(p.at("alpha").get<double>(), vector_from(p.at("beta")));
  const auto& ls = j.at("lambda_state");
  std::variant<double, LambdaState> state = 0.0;
  if (ls.is_number()) {
    state = ls.get<double>();
  } else {
    state = LambdaState(vector_from(ls.at("lambda")), ls.at("gamma1").get<double>(), ls.at("gamma2").get<double>());
  }
  FitResult fit{std::move(params), std::move(state), j.at("objective_trace").get<std::vector<double>>(),
                j.at("iterations").get<int>(), j.at("converged").get<bool>(), std::nullopt,
                j.value("warnings", std::vector<std::string>{}), j.value("response_offset", 0.0)};
  if (j.contains("gic") && !j.at("gic").is_null()) fit.gic = gic_report_from_json(j.at("gic"));
  return fit;
}

void write_json(std::ostream& out, const ordered_json& j) { out << j.dump(2) << '\n'; }

}  // namespace smoothridge
