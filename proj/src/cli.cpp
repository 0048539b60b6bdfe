#include "thermoflow/cli.hpp"

#include "thermoflow/asymptotics.hpp"
#include "thermoflow/convertibility.hpp"
#include "thermoflow/io.hpp"
#include "thermoflow/lorenz.hpp"
#include "thermoflow/oneshot.hpp"
#include "thermoflow/theory.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace thermoflow::cli {

namespace {

using io::json;
using Context = TheoryContext<double>;
using State = QuasiclassicalState<double>;

enum class Command { gibbs, lorenz, convert, work, rate, aep, validate };

struct ContextFlags {
  std::string path;
  std::optional<double> beta;
  std::optional<double> mu;
  std::vector<std::string> intensive;
  bool entropy = false;

  bool inline_given() const { return beta || mu || !intensive.empty() || entropy; }
};

struct RunConfig {
  Command command = Command::gibbs;
  std::vector<std::string> inputs;
  ContextFlags ctx;
  std::optional<double> epsilon;
  std::string n_list;
  std::string out_path;
  std::string format;
  std::string witness_path;
};

void add_context_flags(CLI::App* sub, ContextFlags& flags) {
  sub->add_option("--ctx", flags.path, "Context JSON file (wins over inline flags)");
  sub->add_option("--beta", flags.beta, "Inverse temperature (energy representation)");
  sub->add_option("--mu", flags.mu, "Chemical potential, appended as intensive variable 'mu'");
  sub->add_option("--intensive", flags.intensive, "Energy intensive variable as label=value (repeatable)");
  sub->add_flag("--entropy", flags.entropy, "Use the entropy theory");
}

Context inline_context(const ContextFlags& flags) {
  if (flags.entropy) {
    if (flags.beta || flags.mu || !flags.intensive.empty()) {
      throw Error(ErrorCode::IntensivesInEntropyTheory, "--entropy cannot be combined with --beta/--mu/--intensive");
    }
    return Context();
  }
  if (!flags.beta) throw Error(ErrorCode::MissingParameter, "inline context needs --beta");
  std::vector<Intensive<double>> intensive;
  if (flags.mu) intensive.push_back({"mu", *flags.mu});
  for (const auto& item : flags.intensive) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::ParseError, "--intensive expects label=value, got '" + item + "'");
    }
    std::size_t used = 0;
    double value = 0;
    try {
      value = std::stod(item.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() - eq - 1) {
      throw Error(ErrorCode::ParseError, "--intensive value is not a number in '" + item + "'");
    }
    intensive.push_back({item.substr(0, eq), value});
  }
  return make_context<double>(Representation::energy, flags.beta, std::move(intensive));
}

/// --ctx file, then inline flags, then the context embedded in the first state file.
Context resolve_context(const ContextFlags& flags, const std::optional<Context>& embedded, std::ostream& err) {
  if (!flags.path.empty()) {
    if (flags.inline_given()) err << "warning: --ctx " << flags.path << " overrides inline context flags\n";
    return io::load_context_file(flags.path);
  }
  if (flags.inline_given()) return inline_context(flags);
  if (embedded) return *embedded;
  throw Error(ErrorCode::MissingParameter, "no theory context: pass --ctx, inline flags, or embed one in the state file");
}

std::vector<int> parse_n_list(const std::string& list) {
  std::vector<int> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || value < 1 || value > 1'000'000) {
      throw Error(ErrorCode::ParseError, "--n expects a comma-separated list of positive integers");
    }
    out.push_back(static_cast<int>(value));
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, "--n is empty");
  return out;
}

OracleLimits oracle_limits() {
  OracleLimits limits;
  if (const char* env = std::getenv("THERMOFLOW_MAX_DIM")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 1) {
      throw Error(ErrorCode::ParseError, "THERMOFLOW_MAX_DIM must be a positive integer");
    }
    limits.max_side_dim = value;
  }
  return limits;
}

double require_epsilon(const RunConfig& cfg, bool open_interval) {
  if (!cfg.epsilon) throw Error(ErrorCode::MissingParameter, "--epsilon is required");
  const double eps = *cfg.epsilon;
  const bool ok = open_interval ? (eps > 0 && eps < 1) : (eps >= 0 && eps < 1);
  if (!ok) throw Error(ErrorCode::EpsilonOutOfRange, open_interval ? "--epsilon must lie in (0, 1)" : "--epsilon must lie in [0, 1)");
  return eps;
}

std::string require_format(const RunConfig& cfg, std::string fallback) {
  const std::string format = cfg.format.empty() ? fallback : cfg.format;
  if (format != "json" && format != "csv") throw Error(ErrorCode::ParseError, "--format must be json or csv");
  return format;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::ParseError, "cannot write " + path);
  file << content;
}

struct Outcome {
  std::string text;
  int code = kExitSuccess;
};

Outcome cmd_gibbs(const RunConfig& cfg, std::ostream& err) {
  // Only the system is needed; "r" may be absent.
  const io::json descriptor = io::read_json_file(cfg.inputs.at(0));
  const auto spec = io::spec_from_json(descriptor);
  const Context ctx = resolve_context(cfg.ctx, io::embedded_context(descriptor), err);
  const auto g = gibbs_state(spec, ctx);
  const double log_z = log_partition_function(spec, ctx);
  if (require_format(cfg, "json") == "csv") {
    std::string out = "index,g\n";
    for (Index k = 0; k < g.dim(); ++k) out += std::to_string(k) + "," + io::format_number(g.r()(k)) + "\n";
    return {out};
  }
  json j = io::to_json(g, ctx);
  j["partition_function"] = std::exp(log_z);
  j["log_partition_function"] = log_z;
  return {j.dump(2) + "\n"};
}

Outcome cmd_lorenz(const RunConfig& cfg, std::ostream& err) {
  const auto loaded = io::load_state_file(cfg.inputs.at(0));
  const Context ctx = resolve_context(cfg.ctx, loaded.context, err);
  const auto curve = build_curve(loaded.state, ctx);
  if (require_format(cfg, "csv") == "json") return {io::to_json(curve).dump(2) + "\n"};
  std::ostringstream os;
  write_csv(os, curve);
  return {os.str()};
}

Outcome cmd_convert(const RunConfig& cfg, std::ostream& err) {
  const auto source = io::load_state_file(cfg.inputs.at(0));
  const auto target = io::load_state_file(cfg.inputs.at(1));
  const Context ctx = resolve_context(cfg.ctx, source.context, err);
  const ConversionQuery<double> query{source.state, target.state, ctx};
  const bool convertible = can_convert(query);
  if (!cfg.witness_path.empty() && convertible) {
    const auto witness = feasibility_oracle(query, oracle_limits());
    if (!witness) {
      err << "warning: Lorenz test and linear-feasibility oracle disagree; no witness written\n";
    } else {
      write_file(cfg.witness_path, io::to_json(*witness).dump(2) + "\n");
    }
  }
  return {convertible ? "convertible\n" : "not convertible\n", convertible ? kExitSuccess : kExitNegative};
}

Outcome cmd_work(const RunConfig& cfg, std::ostream& err) {
  const auto loaded = io::load_state_file(cfg.inputs.at(0));
  const Context ctx = resolve_context(cfg.ctx, loaded.context, err);
  const double eps = require_epsilon(cfg, false);
  return {io::to_json(work_report(loaded.state, ctx, eps)).dump(2) + "\n"};
}

Outcome cmd_rate(const RunConfig& cfg, std::ostream& err) {
  const auto source = io::load_state_file(cfg.inputs.at(0));
  const auto target = io::load_state_file(cfg.inputs.at(1));
  const Context ctx = resolve_context(cfg.ctx, source.context, err);
  return {io::format_number(conversion_rate(source.state, target.state, ctx)) + "\n"};
}

Outcome cmd_aep(const RunConfig& cfg, std::ostream& err) {
  const auto loaded = io::load_state_file(cfg.inputs.at(0));
  const Context ctx = resolve_context(cfg.ctx, loaded.context, err);
  const double eps = require_epsilon(cfg, true);
  if (cfg.n_list.empty()) throw Error(ErrorCode::MissingParameter, "--n is required");
  const auto sweep = aep_sweep(loaded.state, ctx, eps, parse_n_list(cfg.n_list));
  if (require_format(cfg, "csv") == "json") {
    json rows = json::array();
    for (const auto& row : sweep.rows) rows.push_back({{"n", row.n}, {"per_copy_dh", row.per_copy_dh}});
    return {json{{"epsilon", sweep.epsilon}, {"limit", sweep.limit}, {"rows", std::move(rows)}}.dump(2) + "\n"};
  }
  std::string out = "n,per_copy_dh,limit\n";
  for (const auto& row : sweep.rows) {
    out += std::to_string(row.n) + "," + io::format_number(row.per_copy_dh) + "," + io::format_number(sweep.limit) + "\n";
  }
  return {out};
}

Outcome cmd_validate(const RunConfig& cfg, std::ostream& err) {
  const json j = io::read_json_file(cfg.inputs.at(0));
  const Vector<double> r = io::probabilities_from_json(j);
  const auto spec = io::spec_from_json(j);
  json report;
  report["dimension"] = spec.dim();
  report["sum"] = r.sum();
  const bool nonnegative = r.allFinite() && (r.array() >= 0).all();
  const bool normalized = nonnegative && std::abs(r.sum() - 1) <= Tolerance<double>::renormalize;
  report["nonnegative"] = nonnegative;
  report["normalized"] = normalized;
  bool valid = normalized;
  if (normalized) {
    const bool fixed = validate_fixed_eigensubspace(State(spec, r));
    report["fixed_eigensubspace"] = fixed;
    valid = valid && fixed;
  } else {
    report["fixed_eigensubspace"] = nullptr;
  }
  const bool has_context = !cfg.ctx.path.empty() || cfg.ctx.inline_given() || j.contains("representation");
  if (has_context) {
    const Context ctx = resolve_context(cfg.ctx, io::embedded_context(j), err);
    bool compatible = true;
    try {
      spec.require_compatible(ctx);
    } catch (const Error&) {
      compatible = false;
    }
    report["context_compatible"] = compatible;
    valid = valid && compatible;
  }
  report["valid"] = valid;
  return {report.dump(2) + "\n", valid ? kExitSuccess : kExitNegative};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"thermoflow: thermodynamic resource theories for quasiclassical states"};
  app.require_subcommand(1);

  struct Spec {
    Command command;
    const char* name;
    const char* help;
    int inputs;
  };
  const Spec specs[] = {
      {Command::gibbs, "gibbs", "Print the free state and partition function of a system", 1},
      {Command::lorenz, "lorenz", "Emit the rescaled Lorenz curve breakpoints", 1},
      {Command::convert, "convert", "Decide single-shot convertibility of source into target", 2},
      {Command::work, "work", "Report one-shot work yield and work-cost bounds", 1},
      {Command::rate, "rate", "Print the asymptotic conversion rate", 2},
      {Command::aep, "aep", "Sweep per-copy hypothesis-testing entropies over n", 1},
      {Command::validate, "validate", "Check normalization and the fixed-eigensubspace condition", 1},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& spec : specs) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.help);
    sub->add_option("inputs", cfg.inputs, "State JSON file(s)")->required()->expected(spec.inputs);
    add_context_flags(sub, cfg.ctx);
    sub->add_option("--out", cfg.out_path, "Write the result to a file instead of stdout");
    if (spec.command == Command::work || spec.command == Command::aep) {
      sub->add_option("--epsilon", cfg.epsilon, "Failure tolerance");
    }
    if (spec.command == Command::aep) sub->add_option("--n", cfg.n_list, "Comma-separated copy numbers");
    if (spec.command == Command::gibbs || spec.command == Command::lorenz || spec.command == Command::aep) {
      sub->add_option("--format", cfg.format, "json or csv");
    }
    if (spec.command == Command::convert) {
      sub->add_option("--witness", cfg.witness_path, "Write a witness matrix (row-major JSON) when convertible");
    }
    subs.emplace_back(sub, spec.command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  for (const auto& [sub, command] : subs) {
    if (sub->parsed()) cfg.command = command;
  }

  try {
    Outcome outcome;
    switch (cfg.command) {
      case Command::gibbs: outcome = cmd_gibbs(cfg, err); break;
      case Command::lorenz: outcome = cmd_lorenz(cfg, err); break;
      case Command::convert: outcome = cmd_convert(cfg, err); break;
      case Command::work: outcome = cmd_work(cfg, err); break;
      case Command::rate: outcome = cmd_rate(cfg, err); break;
      case Command::aep: outcome = cmd_aep(cfg, err); break;
      case Command::validate: outcome = cmd_validate(cfg, err); break;
    }
    if (cfg.out_path.empty()) {
      out << outcome.text;
    } else {
      write_file(cfg.out_path, outcome.text);
    }
    return outcome.code;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace thermoflow::cli
