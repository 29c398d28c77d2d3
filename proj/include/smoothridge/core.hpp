#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace smoothridge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input data. Row is 1-based over data rows (0 when the
/// problem is not tied to a row); column is the header name when known.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t row = 0, std::string column = {});
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// Invalid configuration values (non-positive widths, empty grids, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra or convergence failure inside an estimator.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double condition = 0.0);
  /// Reciprocal condition estimate of the offending matrix, 0 when unknown.
  double condition() const { return condition_; }

 private:
  double condition_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
};

/// Design points (n x p) and responses. Immutable once constructed; every
/// invariant is checked by the constructor.
class Dataset {
 public:
  Dataset(Matrix xs, Vector ys, std::vector<Interval> domain);

  /// Domain set to the observed per-column min/max.
  static Dataset with_observed_domain(Matrix xs, Vector ys);

  std::size_t size() const { return static_cast<std::size_t>(ys_.size()); }
  std::size_t dims() const { return static_cast<std::size_t>(xs_.cols()); }
  const Matrix& xs() const { return xs_; }
  const Vector& ys() const { return ys_; }
  const std::vector<Interval>& domain() const { return domain_; }

 private:
  Matrix xs_;
  Vector ys_;
  std::vector<Interval> domain_;
};

/// theta = (alpha, beta): Gaussian noise variance and basis coefficients.
class ModelParams {
 public:
  ModelParams(double alpha, Vector beta);

  double alpha() const { return alpha_; }
  const Vector& beta() const { return beta_; }

 private:
  double alpha_;
  Vector beta_;
};

/// Per-coefficient tuning parameters plus the two hyper-tuning parameters.
class LambdaState {
 public:
  LambdaState(Vector lambda, double gamma1, double gamma2);

  const Vector& lambda() const { return lambda_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }

 private:
  Vector lambda_;
  double gamma1_;
  double gamma2_;
};

enum class GicMode { expected, empirical };

std::string_view to_string(GicMode mode);
GicMode parse_gic_mode(std::string_view text);

/// -2 log-likelihood plus twice the trace correction. `total` is computed by
/// the constructor, so total == neg2_loglik + bias_term holds exactly.
class GicReport {
 public:
  GicReport(double neg2_loglik, double bias_term, GicMode mode);

  double neg2_loglik() const { return neg2_loglik_; }
  double bias_term() const { return bias_term_; }
  double total() const { return total_; }
  GicMode mode() const { return mode_; }

 private:
  double neg2_loglik_;
  double bias_term_;
  double total_;
  GicMode mode_;
};

/// Result of either estimator. Ridge fits store their scalar lambda; the
/// smoothly varying fit stores the full LambdaState.
struct FitResult {
  ModelParams params;
  std::variant<double, LambdaState> lambda_state;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
  std::optional<GicReport> gic;
  /// Non-fatal conditions met while fitting (clamps, fallbacks, defaults).
  std::vector<std::string> warnings;
  /// Constant subtracted from the responses before fitting (0 unless the
  /// caller asked for centering).
  double response_offset = 0.0;

  bool is_ridge() const { return std::holds_alternative<double>(lambda_state); }
  const LambdaState& svr_state() const { return std::get<LambdaState>(lambda_state); }
  double ridge_lambda() const { return std::get<double>(lambda_state); }
};

// ---------------------------------------------------------------------------
// Tabular ingestion
// ---------------------------------------------------------------------------

/// Names of the design columns (in dimension order) and of the response.
struct Schema {
  std::vector<std::string> x_columns{"x1"};
  std::string y_column{"y"};
};

/// Picks x1..xp (contiguous, starting at x1) and y from a header line.
Schema infer_schema(std::string_view header_line);

/// Parses CSV text with a header row. Domain defaults to the observed range.
Dataset load_dataset(std::string_view text, const Schema& schema,
                     const std::optional<std::vector<Interval>>& domain = std::nullopt);

/// Reads a file; the schema is inferred from its header when not given.
Dataset load_dataset_file(const std::string& path,
                          const std::optional<Schema>& schema = std::nullopt,
                          const std::optional<std::vector<Interval>>& domain = std::nullopt);

/// Writes the dataset as CSV (x1..xp,y) with round-trip precision.
void write_dataset_csv(std::ostream& out, const Dataset& data);

class BasisSpec;

/// Throws ConfigError on dimension mismatch and DataError (with the offending
/// 1-based row) when a design point falls outside the basis domain.
void validate_compatibility(const Dataset& data, const BasisSpec& spec);

}  // namespace smoothridge
