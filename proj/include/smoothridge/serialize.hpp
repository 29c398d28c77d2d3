#pragma once

#include "smoothridge/core.hpp"
#include "smoothridge/simlab.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace smoothridge {

nlohmann::ordered_json to_json(const GicReport& report);
nlohmann::ordered_json to_json(const FitResult& fit);
nlohmann::ordered_json to_json(const SimConfig& config);
/// Runtime is left out unless asked for, so identical configs give identical text.
nlohmann::ordered_json to_json(const SimReport& report, bool include_runtime = false);

GicReport gic_report_from_json(const nlohmann::ordered_json& j);
FitResult fit_result_from_json(const nlohmann::ordered_json& j);

/// Pretty-printed with a trailing newline.
void write_json(std::ostream& out, const nlohmann::ordered_json& j);

/// Shortest text that reads back to the same double.
std::string format_double(double value);

}  // namespace smoothridge
