#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

#include "thermoflow/cli.hpp"
#include "thermoflow/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace thermoflow;
using namespace thermoflow::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "thermoflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("thermoflow_io_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return {std::istreambuf_iterator<char>(in), {}};
  }

 private:
  fs::path dir_;
};

const char* kTwoLevel = R"({"operators": [{"label": "H", "eigenvalues": [0, 0.6931471805599453]}], "r": [1, 0]})";
const char* kHelmholtz = R"({"representation": "energy", "beta": 1})";

}  // namespace

TEST_CASE("state and context round trip") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const auto theory = random_theory(rng, trial);
    const Index d = 1 + trial % 6;
    const State state(random_spec(rng, theory.labels, d), random_distribution(rng, d, 0.2));
    const auto text = io::to_json(state, theory.ctx).dump();
    const auto j = io::parse_json(text);
    const auto back = io::state_from_json(j);
    CHECK(back.spec() == state.spec());
    CHECK(max_abs_diff(back.r(), state.r()) <= 1e-12);
    const auto ctx = io::embedded_context(j);
    REQUIRE(ctx.has_value());
    CHECK(*ctx->beta() == *theory.ctx.beta());
    CHECK(ctx->intensive().size() == theory.ctx.intensive().size());
    CHECK(io::context_from_json(io::to_json(theory.ctx)).intensive().size() == theory.ctx.intensive().size());
  }

  const auto entropy = io::context_from_json(io::parse_json(R"({"representation": "entropy"})"));
  CHECK(entropy.is_entropy());
  CHECK_THROWS_AS(io::context_from_json(io::parse_json(R"({"representation": "entropy", "beta": 1})")), Error);
  CHECK_THROWS_AS(io::context_from_json(io::parse_json(R"({"representation": "energy", "beta": -1})")), Error);
  CHECK(io::format_number(2.0 / 3.0) == "0.66666666666666663");
}

TEST_CASE("malformed input is a parse error") {
  try {
    io::parse_json("{\"r\": [1,");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
  CHECK_THROWS_AS(io::state_from_json(io::parse_json(R"({"r": "abc"})")), Error);
  CHECK_THROWS_AS(io::state_from_json(io::parse_json(R"({"operators": [], "r": [0.5, 0.2]})")), Error);
}

TEST_CASE("lorenz command") {
  Scratch s;
  const auto pure = s.write("pure2.json", R"({"operators": [], "r": [1, 0]})");
  const auto ctx = s.write("entropy.json", R"({"representation": "entropy"})");
  const auto run = invoke({"lorenz", pure, "--ctx", ctx});
  CHECK(run.code == 0);
  CHECK(run.out == "x,y\n0,0\n1,1\n2,1\n");
  CHECK(invoke({"lorenz", pure, "--entropy"}).out == run.out);

  const auto js = invoke({"lorenz", pure, "--entropy", "--format", "json"});
  CHECK(js.code == 0);
  CHECK(io::parse_json(js.out)["width"] == 2.0);
}

TEST_CASE("convert command") {
  Scratch s;
  const auto a = s.write("a.json", kTwoLevel);
  const auto ctx = s.write("ctx.json", kHelmholtz);
  const auto gibbs = invoke({"gibbs", a, "--ctx", ctx});
  REQUIRE(gibbs.code == 0);
  const auto g = s.write("g.json", gibbs.out);

  const auto forward = invoke({"convert", a, g, "--ctx", ctx, "--witness", s.path("w.json")});
  CHECK(forward.code == 0);
  CHECK(forward.out == "convertible\n");
  const auto w = io::parse_json(s.read("w.json"));
  CHECK(w["rows"] == 2);
  CHECK(w["cols"] == 2);
  Matrix<double> m(2, 2);
  for (Index k = 0; k < 4; ++k) m(k / 2, k % 2) = w["entries"][static_cast<std::size_t>(k)].get<double>();
  const auto left = io::load_state_file(a).state;
  const auto right = io::load_state_file(g).state;
  CHECK(is_valid_witness(m, equimajorization_problem(ConversionQuery<double>{left, right, helmholtz(1.0)})));

  const auto back = invoke({"convert", g, a, "--ctx", ctx, "--witness", s.path("none.json")});
  CHECK(back.code == 1);
  CHECK(back.out == "not convertible\n");
  CHECK_FALSE(fs::exists(s.path("none.json")));

  ::setenv("THERMOFLOW_MAX_DIM", "1", 1);
  CHECK(invoke({"convert", a, g, "--ctx", ctx, "--witness", s.path("w2.json")}).code == 2);
  ::setenv("THERMOFLOW_MAX_DIM", "zero", 1);
  CHECK(invoke({"convert", a, g, "--ctx", ctx, "--witness", s.path("w2.json")}).code == 2);
  ::unsetenv("THERMOFLOW_MAX_DIM");
}

TEST_CASE("gibbs output re-ingests") {
  Scratch s;
  const auto a = s.write("a.json", kTwoLevel);
  const auto run = invoke({"gibbs", a, "--beta", "1"});
  REQUIRE(run.code == 0);
  const auto j = io::parse_json(run.out);
  CHECK(j["partition_function"].get<double>() == doctest::Approx(1.5).epsilon(1e-15));
  const auto g = s.write("g.json", run.out);
  const auto loaded = io::load_state_file(g);
  REQUIRE(loaded.context.has_value());
  CHECK(max_abs_diff(loaded.state.r(), vec({2.0 / 3, 1.0 / 3})) <= 1e-15);
  const auto check = invoke({"validate", g});
  CHECK(check.code == 0);
  CHECK(io::parse_json(check.out)["valid"] == true);

  const auto csv = invoke({"gibbs", a, "--beta", "1", "--format", "csv"});
  CHECK(csv.out.rfind("index,g\n0,0.6666666666666666", 0) == 0);

  // A bare system description suffices.
  const auto system = s.write("sys.json", R"({"operators": [{"label": "H", "eigenvalues": [0, 0.6931471805599453]}]})");
  CHECK(invoke({"gibbs", system, "--beta", "1"}).out == run.out);
}

TEST_CASE("work, rate and aep commands") {
  Scratch s;
  const auto a = s.write("a.json", kTwoLevel);
  const auto ctx = s.write("ctx.json", kHelmholtz);
  const auto g = s.write("g.json", invoke({"gibbs", a, "--ctx", ctx}).out);

  const auto zero = invoke({"work", g, "--ctx", ctx, "--epsilon", "0"});
  CHECK(zero.code == 0);
  const auto report = io::parse_json(zero.out);
  CHECK(std::abs(report["w_gain"].get<double>()) <= 1e-12);
  CHECK(report["w_cost_upper"].is_null());
  CHECK(zero.out.find("-0") == std::string::npos);

  const auto gain = io::parse_json(invoke({"work", a, "--ctx", ctx, "--epsilon", "0"}).out);
  CHECK(gain["w_gain"].get<double>() == doctest::Approx(std::log(1.5)).epsilon(1e-12));
  const auto costed = io::parse_json(invoke({"work", a, "--ctx", ctx, "--epsilon", "0.1"}).out);
  CHECK(costed["w_cost_lower"].get<double>() <= costed["w_cost_upper"].get<double>());

  const auto pure2 = s.write("pure2.json", R"({"operators": [], "r": [1, 0]})");
  const auto pure4 = s.write("pure4.json", R"({"operators": [], "r": [1, 0, 0, 0]})");
  const auto rate = invoke({"rate", pure2, pure4, "--entropy"});
  CHECK(rate.code == 0);
  CHECK(rate.out == "0.5\n");
  CHECK(invoke({"rate", pure2, s.write("u.json", R"({"operators": [], "r": [0.5, 0.5]})"), "--entropy"}).code == 2);

  const auto aep = invoke({"aep", a, "--ctx", ctx, "--epsilon", "0.1", "--n", "10,1"});
  CHECK(aep.code == 0);
  CHECK(aep.out.rfind("n,per_copy_dh,limit\n1,", 0) == 0);
  CHECK(aep.out.find("\n10,") != std::string::npos);
}

TEST_CASE("context resolution") {
  Scratch s;
  const auto a = s.write("a.json", kTwoLevel);
  const auto ctx = s.write("ctx.json", kHelmholtz);
  const auto both = invoke({"work", a, "--ctx", ctx, "--beta", "2", "--epsilon", "0"});
  CHECK(both.code == 0);
  CHECK(both.err.find("warning") != std::string::npos);
  CHECK(both.out == invoke({"work", a, "--ctx", ctx, "--epsilon", "0"}).out);

  const auto missing = invoke({"work", a, "--epsilon", "0"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("MissingParameter") != std::string::npos);

  const auto grand = s.write("n.json", R"({"operators": [{"label": "H", "eigenvalues": [0, 1]},
      {"label": "N", "eigenvalues": [0, 1]}], "r": [0, 1]})");
  const auto mu = invoke({"work", grand, "--beta", "1", "--mu", "0.5", "--epsilon", "0"});
  const auto labeled = invoke({"work", grand, "--beta", "1", "--intensive", "mu=0.5", "--epsilon", "0"});
  CHECK(mu.code == 0);
  CHECK(mu.out == labeled.out);
  CHECK(invoke({"work", grand, "--beta", "1", "--intensive", "mu", "--epsilon", "0"}).code == 2);
}

TEST_CASE("errors exit with status 2") {
  Scratch s;
  const auto bad = s.write("bad.json", "{\"r\": [1,");
  const auto ctx = s.write("ctx.json", kHelmholtz);
  const auto a = s.write("a.json", kTwoLevel);
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"work", bad, "--ctx", ctx, "--epsilon", "0"},
           {"lorenz", s.path("absent.json"), "--ctx", ctx},
           {"work", a, "--ctx", ctx, "--epsilon", "1"},
           {"work", a, "--ctx", bad, "--epsilon", "0"},
           {"convert", a, "--ctx", ctx},
           {"frobnicate"},
           {}}) {
    const auto run = invoke(args);
    CHECK(run.code == 2);
    CHECK_FALSE(run.err.empty());
  }

  const auto unnormalized = s.write("un.json", R"({"operators": [], "r": [0.5, 0.2]})");
  const auto report = invoke({"validate", unnormalized});
  CHECK(report.code == 1);
  CHECK(io::parse_json(report.out)["normalized"] == false);
}

TEST_CASE("output goes to --out when given") {
  Scratch s;
  const auto a = s.write("a.json", kTwoLevel);
  const auto run = invoke({"lorenz", a, "--beta", "1", "--out", s.path("curve.csv")});
  CHECK(run.code == 0);
  CHECK(run.out.empty());
  CHECK(s.read("curve.csv").rfind("x,y\n0,0\n", 0) == 0);
}
