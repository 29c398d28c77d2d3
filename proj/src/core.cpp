#include "smoothridge/core.hpp"

#include "smoothridge/basis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace smoothridge {

namespace {

std::string locate(const std::string& what, std::size_t row, const std::string& column) {
  std::ostringstream os;
  os << what;
  if (row > 0) os << " at row " << row;
  if (!column.empty()) os << (row > 0 ? ", column " : " at column ") << column;
  return os.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

DataError::DataError(const std::string& what, std::size_t row, std::string column)
    : Error(locate(what, row, column)), row_(row), column_(std::move(column)) {}

NumericalError::NumericalError(const std::string& what, double condition)
    : Error(what), condition_(condition) {}

Dataset::Dataset(Matrix xs, Vector ys, std::vector<Interval> domain)
    : xs_(std::move(xs)), ys_(std::move(ys)), domain_(std::move(domain)) {
  if (ys_.size() < 1) throw DataError("dataset has zero rows");
  if (xs_.rows() != ys_.size())
    throw DataError("design matrix and response lengths differ");
  if (xs_.cols() < 1) throw DataError("dataset has no design columns");
  if (domain_.size() != static_cast<std::size_t>(xs_.cols()))
    throw DataError("domain dimension does not match design columns");
  for (const auto& iv : domain_) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi)
      throw DataError("invalid domain interval");
  }
  for (Eigen::Index i = 0; i < xs_.rows(); ++i) {
    const auto row = static_cast<std::size_t>(i) + 1;
    if (!std::isfinite(ys_(i))) throw DataError("non-finite value", row, "y");
    for (Eigen::Index k = 0; k < xs_.cols(); ++k) {
      const auto col = "x" + std::to_string(k + 1);
      if (!std::isfinite(xs_(i, k))) throw DataError("non-finite value", row, col);
      if (!domain_[k].contains(xs_(i, k))) throw DataError("design point outside domain", row, col);
    }
  }
}

Dataset Dataset::with_observed_domain(Matrix xs, Vector ys) {
  if (!all_finite(xs)) throw DataError("non-finite design value");
  std::vector<Interval> domain;
  for (Eigen::Index k = 0; k < xs.cols(); ++k) {
    if (xs.rows() == 0) break;
    domain.push_back({xs.col(k).minCoeff(), xs.col(k).maxCoeff()});
  }
  return Dataset(std::move(xs), std::move(ys), std::move(domain));
}

ModelParams::ModelParams(double alpha, Vector beta) : alpha_(alpha), beta_(std::move(beta)) {
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_))
    throw NumericalError("noise variance must be positive and finite");
  if (!beta_.allFinite()) throw NumericalError("coefficients must be finite");
}

LambdaState::LambdaState(Vector lambda, double gamma1, double gamma2)
    : lambda_(std::move(lambda)), gamma1_(gamma1), gamma2_(gamma2) {
  if (!(gamma1_ > 0.0) || !std::isfinite(gamma1_)) throw ConfigError("gamma1 must be positive");
  if (!(gamma2_ > 0.0) || !std::isfinite(gamma2_)) throw ConfigError("gamma2 must be positive");
  for (Eigen::Index j = 0; j < lambda_.size(); ++j) {
    if (!(lambda_(j) > 0.0) || !std::isfinite(lambda_(j)))
      throw NumericalError("tuning parameter " + std::to_string(j + 1) + " is not positive");
  }
}

std::string_view to_string(GicMode mode) {
  return mode == GicMode::expected ? "expected" : "empirical";
}

GicMode parse_gic_mode(std::string_view text) {
  if (text == "expected") return GicMode::expected;
  if (text == "empirical") return GicMode::empirical;
  throw ConfigError("unknown GIC mode '" + std::string(text) + "'");
}

GicReport::GicReport(double neg2_loglik, double bias_term, GicMode mode)
    : neg2_loglik_(neg2_loglik),
      bias_term_(bias_term),
      total_(neg2_loglik + bias_term),
      mode_(mode) {}

Schema infer_schema(std::string_view header_line) {
  const auto names = split_fields(header_line);
  Schema schema;
  schema.x_columns.clear();
  for (int k = 1;; ++k) {
    const auto want = "x" + std::to_string(k);
    if (std::find(names.begin(), names.end(), want) == names.end()) break;
    schema.x_columns.push_back(want);
  }
  if (schema.x_columns.empty()) throw DataError("missing column", 0, "x1");
  return schema;
}

Dataset load_dataset(std::string_view text, const Schema& schema,
                     const std::optional<std::vector<Interval>>& domain) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError("missing header row");

  auto header = lines.front();
  if (header.size() >= 3 && header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
  const auto names = split_fields(header);
  auto column_of = [&](const std::string& name) {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw DataError("missing column", 0, name);
    return static_cast<std::size_t>(it - names.begin());
  };
  std::vector<std::size_t> x_idx;
  for (const auto& name : schema.x_columns) x_idx.push_back(column_of(name));
  const auto y_idx = column_of(schema.y_column);

  const std::size_t rows = lines.size() - 1;
  if (rows == 0) throw DataError("dataset has zero rows");
  Matrix xs(rows, x_idx.size());
  Vector ys(rows);
  auto read_cell = [&](const std::vector<std::string_view>& fields, std::size_t col,
                       std::size_t row, const std::string& name) {
    if (col >= fields.size()) throw DataError("missing cell", row, name);
    const auto value = parse_double(fields[col]);
    if (!value) throw DataError("non-numeric cell", row, name);
    if (!std::isfinite(*value)) throw DataError("non-finite value", row, name);
    return *value;
  };
  for (std::size_t r = 0; r < rows; ++r) {
    const auto fields = split_fields(lines[r + 1]);
    for (std::size_t k = 0; k < x_idx.size(); ++k)
      xs(r, k) = read_cell(fields, x_idx[k], r + 1, schema.x_columns[k]);
    ys(r) = read_cell(fields, y_idx, r + 1, schema.y_column);
  }
  if (domain) return Dataset(std::move(xs), std::move(ys), *domain);
  return Dataset::with_observed_domain(std::move(xs), std::move(ys));
}

Dataset load_dataset_file(const std::string& path, const std::optional<Schema>& schema,
                          const std::optional<std::vector<Interval>>& domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("dataset: not found");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const auto text = buffer.str();
  if (schema) return load_dataset(text, *schema, domain);
  const auto header = text.substr(0, text.find('\n'));
  return load_dataset(text, infer_schema(header), domain);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const auto p = data.dims();
  for (std::size_t k = 0; k < p; ++k) out << 'x' << (k + 1) << ',';
  out << "y\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::size_t k = 0; k < p; ++k) out << data.xs()(r, static_cast<Eigen::Index>(k)) << ',';
    out << data.ys()(r) << '\n';
  }
}

void validate_compatibility(const Dataset& data, const BasisSpec& spec) {
  if (data.dims() != spec.dims())
    throw ConfigError("dimension mismatch: dataset has " + std::to_string(data.dims()) +
                      " design columns, basis has " + std::to_string(spec.dims()));
  const auto& dom = spec.domain();
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t k = 0; k < data.dims(); ++k) {
      const double x = data.xs()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      if (!dom[k].contains(x))
        throw DataError("out-of-domain point (index " + std::to_string(i) + ")", i + 1,
                        "x" + std::to_string(k + 1));
    }
  }
}

}  // namespace smoothridge
