#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "symdyn/cli/commands.hpp"
#include "symdyn/error.hpp"

using namespace symdyn;
using namespace symdyn::cli;

namespace {

const std::filesystem::path kConfigs = SYMDYN_CONFIG_DIR;

ExperimentConfig config(const std::string& name) { return load_config(kConfigs / (name + ".json")); }

std::vector<std::vector<std::string>> rows(const std::string& tsv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(tsv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

std::string file(const RunResult& r, const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "symdyn_cli_probe";
  std::filesystem::remove_all(dir);
  emit(r, RunOptions{dir, {}, {}, false});
  std::ifstream in(dir / name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli pressure series ends at the closed form") {
  const RunResult r = run_subcommand("pressure", config("f1_f2"), {});
  CHECK(r.verdict == "PASS");
  const auto t = rows(file(r, "pressure.tsv"));
  REQUIRE(t.size() == 13);
  CHECK(t[0] == std::vector<std::string>{"n", "estimate", "lo", "hi"});
  for (std::size_t i = 1; i < t.size(); ++i) CHECK(std::abs(std::stod(t[i][1]) - std::log(6.0)) <= 1e-12);
  const auto plot = rows(file(r, "pressure_plot.tsv"));
  CHECK(plot[0].size() == 2);
  CHECK(r.report["summary"]["markov"]["value"].get<double>() == doctest::Approx(std::log(6.0)).epsilon(1e-9));
}

TEST_CASE("cli factor-gibbs reports a flat ratio envelope") {
  const RunResult r = run_subcommand("factor-gibbs", config("f1_f2"), {});
  CHECK(r.verdict == "PASS");
  const auto env = rows(file(r, "ratio_envelope.tsv"));
  CHECK(env[0] == std::vector<std::string>{"n", "min", "max"});
  for (std::size_t i = 1; i < env.size(); ++i) {
    CHECK(std::abs(std::stod(env[i][1]) - 1.0) <= 1e-10);
    CHECK(std::abs(std::stod(env[i][2]) - 1.0) <= 1e-10);
  }
  const auto dump = rows(file(r, "image_potential.tsv"));
  CHECK(dump[0] == std::vector<std::string>{"y_word", "log_g_lo", "log_g_hi"});
  CHECK(dump.size() == 1 + 1024);
  for (const auto& c : r.report["checks"]) CHECK(c["pass"].get<bool>());
}

TEST_CASE("cli u-converge series decreases") {
  const RunResult r = run_subcommand("u-converge", config("f1_window2"), {});
  CHECK(r.verdict == "PASS");
  const auto t = rows(file(r, "u_converge.tsv"));
  CHECK(t[0].size() == 3);
  for (std::size_t i = 2; i < t.size(); ++i) {
    CHECK(std::stod(t[i][1]) < std::stod(t[i - 1][1]));
    CHECK(std::stod(t[i][2]) < std::stod(t[i - 1][2]));
  }
}

TEST_CASE("cli verdicts follow the module reports") {
  const RunResult growing = run_subcommand("ratio-criterion", config("f1_f2"), {});
  CHECK(growing.verdict == "FAIL-trend");
  CHECK(growing.exit == ExitCode::Fail);
  CHECK(run_subcommand("ratio-criterion", config("f1_fiber_constant"), {}).verdict == "PASS-trend");
  const RunResult refused = run_subcommand("preimage", config("monotone_switch"), {});
  CHECK(refused.verdict == "REFUSED");
  CHECK(refused.exit == ExitCode::Refused);
  CHECK(run_subcommand("condition-a", config("monotone_switch"), {}).exit == ExitCode::Fail);
  CHECK(run_subcommand("preimage", config("f1_preimage"), {}).verdict == "PASS");
  CHECK(run_subcommand("preimage", config("f3_preimage"), {}).verdict == "PASS");
  CHECK(run_subcommand("compensation", config("f1_f2"), {}).verdict == "PASS");
  CHECK(run_subcommand("oracle", config("golden_mean"), {}).verdict == "PASS");
  CHECK(run_subcommand("relative-pressure", config("f1_window2"), {}).verdict == "PASS");
}

TEST_CASE("cli budget refuses exponential runs unless forced") {
  RunOptions opts;
  opts.n_max = 30;
  const RunResult r = run_subcommand("pressure", config("f1_f2"), opts);
  CHECK(r.verdict == "REFUSED");
  CHECK(r.exit == ExitCode::Budget);
  CHECK(r.report["summary"]["reason"].get<std::string>().find("estimated cost") != std::string::npos);
}

TEST_CASE("cli reruns reproduce every byte") {
  RunOptions a, b;
  a.out_dir = std::filesystem::temp_directory_path() / "symdyn_det_a";
  b.out_dir = std::filesystem::temp_directory_path() / "symdyn_det_b";
  a.seed = b.seed = 11;
  for (const char* sub : {"pressure", "factor-gibbs", "u-converge"}) {
    std::filesystem::remove_all(a.out_dir);
    std::filesystem::remove_all(b.out_dir);
    const ExperimentConfig cfg = config("f1_window2");
    const RunResult ra = run_subcommand(sub, cfg, a);
    const RunResult rb = run_subcommand(sub, config("f1_window2"), b);
    emit(ra, a);
    emit(rb, b);
    for (const auto& entry : std::filesystem::directory_iterator(a.out_dir)) {
      std::ifstream fa(entry.path()), fb(b.out_dir / entry.path().filename());
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      CHECK(sa.str() == sb.str());
      CHECK(entry.path().string().find(".tmp.") == std::string::npos);
    }
  }
}

TEST_CASE("config schema errors list every offending field") {
  try {
    load_config(kConfigs / "invalid.json");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
    const std::string what = e.what();
    CHECK(what.find("spec_version") != std::string::npos);
    CHECK(what.find("shifts.Bad") != std::string::npos);
    CHECK(what.find("run.potential") != std::string::npos);
    CHECK(what.find("run.n_max") != std::string::npos);
  }
  const auto doc = nlohmann::json::parse(R"({"spec_version": 1,
    "shifts": {"X": {"kind": "full", "alphabet": ["a", "b"]}},
    "potentials": {"P": {"shift": "X", "window": 2, "log_values": {"aa": 0, "ab": 1}},
                   "Q": {"derived": {"kind": "tilt", "potential": "Q", "per_step": 1}}},
    "run": {"bogus": 1}})");
  try {
    parse_config(doc);
    FAIL("expected a schema error");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("potentials.P") != std::string::npos);
    CHECK(what.find("circular") != std::string::npos);
    CHECK(what.find("run.bogus") != std::string::npos);
  }
}

TEST_CASE("config words, points and derived potentials") {
  const ExperimentConfig cfg = config("f1_preimage");
  const NamedShift& y = cfg.shifts.at("Y");
  CHECK(parse_word(y, nlohmann::json("ABBA"), "w") == Word{0, 1, 1, 0});
  CHECK(parse_word(y, nlohmann::json::parse(R"(["B", 0])"), "w") == Word{1, 0});
  CHECK_THROWS_AS(parse_word(y, nlohmann::json("AC"), "w"), Error);
  const Point p = parse_point(y, nlohmann::json::parse(R"({"prefix": "A", "cycle": "B"})"), "p");
  CHECK(y.text(p) == "A(B)");
  const auto& lift = cfg.potentials.at("PsiLift");
  CHECK(lift.shift == "X");
  CHECK(lift.potential.envelope(Word{2}).hi == doctest::Approx(std::log(5.0)));
  NamedShift named{"Z", build_full_shift(2), {"up", "down"}};
  CHECK(parse_word(named, nlohmann::json("down up"), "w") == Word{1, 0});
  CHECK(named.text(Word{0, 1}) == "up down");
}

TEST_CASE("numbers and tables are written losslessly") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(std::log(6.0))) == std::log(6.0));
  CHECK(format_number(-INFINITY) == "-inf");
  Tsv t({"a", "b"});
  t.comment("level=2");
  t.row({"1", "2"});
  CHECK(t.str() == "# level=2\na\tb\n1\t2\n");
  CHECK_THROWS_AS(t.row({"1"}), Error);
}
