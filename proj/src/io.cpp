#include "thermoflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace thermoflow::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + " must be a number");
  return j.get<double>();
}

Vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + " must be an array of numbers");
  Vector<double> v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = number(j[k], where);
  return v;
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where + " must be a string");
  return j.get<std::string>();
}

std::vector<OperatorSpectrum<double>> spectra(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where + " must be an array");
  std::vector<OperatorSpectrum<double>> out;
  for (const auto& entry : j) {
    out.push_back({text(require(entry, "label"), where + ".label"),
                   number_list(require(entry, "eigenvalues"), where + ".eigenvalues")});
  }
  return out;
}

json spectra_json(const std::vector<OperatorSpectrum<double>>& ops) {
  json out = json::array();
  for (const auto& op : ops) {
    json values = json::array();
    for (Index k = 0; k < op.eigenvalues.size(); ++k) values.push_back(op.eigenvalues(k));
    out.push_back({{"label", op.label}, {"eigenvalues", std::move(values)}});
  }
  return out;
}

json vector_json(const Vector<double>& v) {
  json out = json::array();
  for (Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

}  // namespace

json parse_json(const std::string& content, const std::string& origin) {
  try {
    return json::parse(content);
  } catch (const json::exception& e) {
    fail(origin + ": " + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path.string());
}

TheoryContext<double> context_from_json(const json& j) {
  const std::string rep = text(require(j, "representation"), "representation");
  if (rep != "energy" && rep != "entropy") fail("representation must be \"energy\" or \"entropy\"");
  std::optional<double> beta;
  if (j.contains("beta") && !j.at("beta").is_null()) beta = number(j.at("beta"), "beta");
  std::vector<Intensive<double>> intensive;
  if (j.contains("intensive")) {
    const auto& list = j.at("intensive");
    if (!list.is_array()) fail("intensive must be an array");
    for (const auto& entry : list) {
      intensive.push_back({text(require(entry, "label"), "intensive.label"),
                           number(require(entry, "value"), "intensive.value")});
    }
  }
  return make_context<double>(rep == "energy" ? Representation::energy : Representation::entropy, beta,
                              std::move(intensive));
}

std::optional<TheoryContext<double>> embedded_context(const json& j) {
  if (!j.is_object() || !j.contains("representation")) return std::nullopt;
  return context_from_json(j);
}

SystemSpec<double> spec_from_json(const json& j) {
  auto ops = spectra(require(j, "operators"), "operators");
  std::vector<OperatorSpectrum<double>> nonstate;
  if (j.contains("nonstate") && !j.at("nonstate").is_null()) nonstate = spectra(j.at("nonstate"), "nonstate");
  // Without "r" the dimension comes from the eigenvalue tables.
  const Index dim = j.contains("r") || ops.empty() ? probabilities_from_json(j).size() : ops.front().eigenvalues.size();
  return SystemSpec<double>(dim, std::move(ops), std::move(nonstate));
}

Vector<double> probabilities_from_json(const json& j) { return number_list(require(j, "r"), "r"); }

QuasiclassicalState<double> state_from_json(const json& j) {
  return QuasiclassicalState<double>(spec_from_json(j), probabilities_from_json(j));
}

StateFile load_state_file(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  return {embedded_context(j), state_from_json(j)};
}

TheoryContext<double> load_context_file(const std::filesystem::path& path) {
  return context_from_json(read_json_file(path));
}

json to_json(const TheoryContext<double>& ctx) {
  json out;
  if (ctx.is_entropy()) {
    out["representation"] = "entropy";
    out["intensive"] = json::array();
    return out;
  }
  out["representation"] = "energy";
  out["beta"] = *ctx.beta();
  json intensive = json::array();
  for (const auto& p : ctx.intensive()) intensive.push_back({{"label", p.label}, {"value", p.value}});
  out["intensive"] = std::move(intensive);
  return out;
}

json to_json(const QuasiclassicalState<double>& state, const std::optional<TheoryContext<double>>& ctx) {
  json out = ctx ? to_json(*ctx) : json::object();
  out["operators"] = spectra_json(state.spec().operators());
  out["r"] = vector_json(state.r());
  if (!state.spec().nonstate().empty()) out["nonstate"] = spectra_json(state.spec().nonstate());
  return out;
}

json to_json(const WorkReport<double>& report) {
  json out;
  out["epsilon"] = report.epsilon;
  out["w_gain"] = report.w_gain;
  out["w_cost_lower"] = report.w_cost_lower ? json(*report.w_cost_lower) : json(nullptr);
  out["w_cost_upper"] = report.w_cost_upper ? json(*report.w_cost_upper) : json(nullptr);
  return out;
}

json to_json(const WitnessMatrix<double>& witness) {
  const auto& m = witness.entries;
  json entries = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

json to_json(const LorenzCurve<double>& curve) {
  json points = json::array();
  for (Index k = 0; k < curve.x.size(); ++k) points.push_back({curve.x(k), curve.y(k)});
  return {{"width", curve.width()}, {"points", std::move(points)}, {"source_order", curve.source_order}};
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace thermoflow::io
