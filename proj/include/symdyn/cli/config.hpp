#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "symdyn/factor_map.hpp"
#include "symdyn/potential.hpp"
#include "symdyn/subshift.hpp"

namespace symdyn::cli {

inline constexpr int kSchemaVersion = 1;

/// A shift together with the printable names of its symbols.
struct NamedShift {
  std::string name;
  Subshift shift;
  std::vector<std::string> symbols;

  /// Single-character names are written back to back; longer ones space-separated.
  bool compact() const;
  std::string text(WordView w) const;
  std::string text(const Point& p) const;
  std::optional<Symbol> symbol(const std::string& name) const;
};

struct NamedPotential {
  Potential potential;
  std::string shift;  // name of the shift it lives on
};

struct NamedMap {
  FactorMap map;
  std::string domain;
  std::string codomain;
};

/// Parameters of the `run` table; absent fields fall back to per-subcommand defaults.
struct RunParams {
  std::optional<std::string> potential;
  std::optional<std::string> map;
  std::optional<std::string> shift;
  std::optional<std::size_t> n_max;
  std::optional<std::size_t> n_min;
  std::optional<std::size_t> n_check;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  nlohmann::json point;  // resolved against the relevant shift by the subcommand
  nlohmann::json tails;
  std::optional<std::size_t> markov_order;
  std::size_t markov_steps = 400;
  std::size_t markov_restarts = 4;
  std::optional<std::size_t> gap;
  std::optional<std::size_t> stored_level;
  std::optional<std::size_t> dump_level;
  nlohmann::json measure;  // null, or {kind: bernoulli|markov, ...}
};

struct ExperimentConfig {
  int spec_version = kSchemaVersion;
  std::map<std::string, NamedShift> shifts;
  std::map<std::string, NamedMap> maps;
  std::map<std::string, NamedPotential> potentials;
  RunParams run;
};

/// A word given as a string of symbol names or as an array of names or indices.
Word parse_word(const NamedShift& shift, const nlohmann::json& value, const std::string& field);
/// {"prefix": word, "cycle": word}; a bare word is a pure cycle.
Point parse_point(const NamedShift& shift, const nlohmann::json& value, const std::string& field);

/// Throws Error(Schema) listing every offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace symdyn::cli
