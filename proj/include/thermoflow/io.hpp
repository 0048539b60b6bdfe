#pragma once

// JSON descriptors for contexts and states.
//
//   { "representation": "energy" | "entropy", "beta": x, "intensive": [{"label": s, "value": x}],
//     "operators": [{"label": s, "eigenvalues": [..]}], "r": [..],
//     "nonstate": [{"label": s, "eigenvalues": [..]}] }
//
// A context file holds only the first three keys. A state file may embed its
// context; unknown keys are ignored. A bare system description may omit "r"
// when it lists at least one operator.

#include "thermoflow/convertibility.hpp"
#include "thermoflow/lorenz.hpp"
#include "thermoflow/oneshot.hpp"
#include "thermoflow/theory.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace thermoflow::io {

using json = nlohmann::json;

struct StateFile {
  std::optional<TheoryContext<double>> context;
  QuasiclassicalState<double> state;
};

/// Parses text, mapping every JSON failure to ErrorCode::ParseError.
json parse_json(const std::string& text, const std::string& origin = "<input>");
json read_json_file(const std::filesystem::path& path);

TheoryContext<double> context_from_json(const json& j);
/// The embedded context of a state descriptor, if it names a representation.
std::optional<TheoryContext<double>> embedded_context(const json& j);
SystemSpec<double> spec_from_json(const json& j);
/// The raw probability list, without normalization checks.
Vector<double> probabilities_from_json(const json& j);
QuasiclassicalState<double> state_from_json(const json& j);

StateFile load_state_file(const std::filesystem::path& path);
TheoryContext<double> load_context_file(const std::filesystem::path& path);

json to_json(const TheoryContext<double>& ctx);
/// Full state descriptor; the context is embedded when given.
json to_json(const QuasiclassicalState<double>& state, const std::optional<TheoryContext<double>>& ctx = std::nullopt);
json to_json(const WorkReport<double>& report);
json to_json(const WitnessMatrix<double>& witness);
json to_json(const LorenzCurve<double>& curve);

/// Decimal rendering with 17 significant digits.
std::string format_number(double value);

}  // namespace thermoflow::io
