#pragma once

#include <string>

#include <json.hpp>

#include "blimp/control.hpp"
#include "blimp/feasibility.hpp"
#include "blimp/performance.hpp"
#include "blimp/session.hpp"

namespace blimp {

// Plain-text reports shared by the CLI and tests.
std::string format_feasibility(const DesignSpec& design, const FeasibilityReport& report);
std::string format_payload(const DesignSpec& design, const FeasibilityReport& report);
std::string format_performance(const MaxPerformance& perf);
/// Parsed command as a key-value document.
std::string format_command(const control::MappingCommand& command);

using json = nlohmann::json;

json to_json(const Vec3& v);
json to_json(const PrimitiveCertificate& c);
json to_json(const FeasibilityReport& r);
json to_json(const PerformanceReport& r);
json to_json(const MaxPerformance& p);
json to_json(const SimState& s);
json to_json(const control::Verdicts& v);
json to_json(const control::MappingCommand& c);
json to_json(const SessionSnapshot& s);

} // namespace blimp
