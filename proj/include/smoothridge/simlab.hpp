#pragma once

#include "smoothridge/basis.hpp"
#include "smoothridge/core.hpp"
#include "smoothridge/svreg.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace smoothridge {

enum class FunctionId { peak10, chirp11, surface13 };

std::string_view to_string(FunctionId id);
FunctionId parse_function_id(std::string_view text);

/// Domain of each test function: [-2, 2], [0, 1] and [0, 1]^2.
std::vector<Interval> function_domain(FunctionId id);

/// Noise-free test function at one point (x.size() must match its dimension).
/// Throws DataError for points outside the function's domain.
double true_function(FunctionId id, const Vector& x);

enum class Method { svr, ridge };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct SimConfig {
  FunctionId function = FunctionId::peak10;
  int n = 100;
  double alpha = 0.05;
  int trials = 20;
  std::uint64_t seed = 42;
  std::vector<Method> methods{Method::svr, Method::ridge};
  /// Centers per dimension; default_centers_per_dim when absent.
  std::optional<int> m_per_dim;
  double width_scale = 1.0;
  std::vector<std::pair<double, double>> gamma_grid;  ///< empty: default grid
  std::vector<double> lambda_grid;                    ///< empty: default grid
  BoundaryMode boundary = BoundaryMode::paper;
  unsigned threads = 1;

  void validate() const;
};

/// Basis used for a configuration: grid centers on the function's domain.
BasisSpec simulation_basis(const SimConfig& config);

struct SimData {
  Dataset data;
  Vector truth;  ///< g(x_i) at the design points
};

/// Per-trial generator seed: a splitmix64 mix of (seed, trial).
std::uint64_t trial_seed(std::uint64_t seed, int trial);

/// Equally spaced design (sqrt(n) x sqrt(n) grid for surfaces) plus N(0, alpha)
/// noise drawn from the trial's own stream.
SimData generate(const SimConfig& config, int trial);

/// Mean of (beta^T phi(x_i) - g(x_i))^2 over the design points.
double mse(const FitResult& fit, const BasisSpec& spec, const Dataset& data, const Vector& truth);

struct TrialRecord {
  int trial = 0;
  bool failed = false;
  std::string error;
  double mse = 0.0;
  double gamma1 = 0.0;  ///< svr only
  double gamma2 = 0.0;  ///< svr only
  double lambda = 0.0;  ///< ridge: selected lambda; svr: starting lambda
  Vector lambda_hat;    ///< svr only
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;
};

struct MethodReport {
  Method method = Method::svr;
  double mean_mse = 0.0;
  double sd_mse = 0.0;  ///< n - 1 denominator; 0 with a single trial
  std::vector<TrialRecord> trials;
  std::vector<int> failed_trials;
  /// Fitted values on the evaluation grid for the first successful trial.
  std::optional<std::pair<Matrix, Vector>> first_curve;
};

struct SimReport {
  SimConfig config;
  std::vector<MethodReport> methods;
  double runtime_seconds = 0.0;
  std::vector<std::string> warnings;
  bool ok = true;  ///< false when more than 10% of trials failed for some method

  const MethodReport& method(Method m) const;
};

/// Recomputes mean and SD (n - 1) from the successful trials.
std::pair<double, double> summarize(const std::vector<TrialRecord>& trials);

/// Dense evaluation points: 512 in 1D, 64 x 64 in 2D.
Matrix evaluation_grid(const std::vector<Interval>& domain);

SimReport run_benchmark(const SimConfig& config);

}  // namespace smoothridge
