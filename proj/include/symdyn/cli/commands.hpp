#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symdyn/cli/config.hpp"
#include "symdyn/cli/output.hpp"

namespace symdyn::cli {

inline constexpr double kBudget = 1e8;

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::size_t> n_max;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

enum class ExitCode : int { Pass = 0, Fail = 1, Usage = 2, Refused = 3, Budget = 4 };

struct RunResult {
  std::string verdict;  // PASS, FAIL, PASS-trend, FAIL-trend, REFUSED
  ExitCode exit = ExitCode::Pass;
  nlohmann::json report;
  OutputSet files;
};

const std::vector<std::string>& subcommand_names();

/// Runs one subcommand; the report and data files are returned, not written.
RunResult run_subcommand(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts);

/// Writes every file plus report.json into opts.out_dir.
void emit(const RunResult& result, const RunOptions& opts);

}  // namespace symdyn::cli
