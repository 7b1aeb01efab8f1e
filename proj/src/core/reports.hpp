#ifndef QRECT_CORE_REPORTS_HPP
#define QRECT_CORE_REPORTS_HPP

#include <json.hpp>
#include <optional>
#include <string>

#include "core/generators.hpp"
#include "core/types.hpp"

namespace qrect {

using json = nlohmann::ordered_json;

/// Parses a generator spec; unknown keys or bad values throw InvalidArgument.
GeneratorSpec parse_generator_spec(const json& spec);

json cloud_info_json(const PointCloud& cloud, const std::optional<GroundTruth>& truth);

/// Dispatches one analysis command ("content", "beta", "tst", "pbp",
/// "dimension", "bjcheck") and returns the full report (envelope with the
/// resolved config). Throws NumericError if any reported value is non-finite.
json run_analysis(const PointCloud& cloud, const std::string& command, const json& params);

/// Capacity report from scalar inputs (no cloud).
json run_capacity(const json& params);

/// Throws NumericError if the document contains a non-finite number.
void ensure_finite(const json& j);

}  // namespace qrect

#endif
