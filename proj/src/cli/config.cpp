#include "symdyn/cli/config.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "symdyn/error.hpp"

namespace symdyn::cli {

using nlohmann::json;

namespace {

/// Accumulates schema problems so a single error can list all of them.
class Problems {
 public:
  void add(const std::string& field, const std::string& what) { items_.push_back(field + ": " + what); }
  bool empty() const { return items_.empty(); }
  [[noreturn]] void raise() const {
    std::ostringstream os;
    os << "invalid config (" << items_.size() << " problem" << (items_.size() == 1 ? "" : "s") << ")";
    for (const auto& s : items_) os << "\n  " << s;
    throw Error(ErrorKind::Schema, os.str());
  }
  void raise_if_any() const {
    if (!empty()) raise();
  }

 private:
  std::vector<std::string> items_;
};

std::vector<std::string> default_symbols(std::size_t q) {
  std::vector<std::string> names(q);
  for (std::size_t i = 0; i < q; ++i) names[i] = q <= 26 ? std::string(1, static_cast<char>('a' + i)) : std::to_string(i);
  return names;
}

std::optional<std::size_t> get_size(const json& obj, const char* key, const std::string& field, Problems& errs) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    errs.add(field + "." + key, "expected a non-negative integer");
    return std::nullopt;
  }
  return v.get<std::size_t>();
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& field, Problems& errs) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) errs.add(field + "." + it.key(), "unknown field");
}

Symbol parse_symbol(const NamedShift& shift, const json& v, const std::string& field) {
  if (v.is_number_integer()) {
    const long long s = v.get<long long>();
    if (s < 0 || static_cast<std::size_t>(s) >= shift.symbols.size())
      throw Error(ErrorKind::Schema, field + ": symbol index out of range for shift " + shift.name);
    return static_cast<Symbol>(s);
  }
  if (v.is_string()) {
    if (auto s = shift.symbol(v.get<std::string>())) return *s;
    throw Error(ErrorKind::Schema, field + ": unknown symbol '" + v.get<std::string>() + "' for shift " + shift.name);
  }
  throw Error(ErrorKind::Schema, field + ": expected a symbol name or index");
}

std::optional<NamedShift> parse_shift(const std::string& name, const json& spec, const std::string& field,
                                     Problems& errs) {
  if (!spec.is_object()) {
    errs.add(field, "expected an object");
    return std::nullopt;
  }
  check_keys(spec, {"alphabet", "kind", "transition_matrix", "labeled_graph"}, field, errs);
  std::vector<std::string> symbols;
  if (!spec.contains("alphabet")) {
    errs.add(field + ".alphabet", "missing");
  } else if (spec["alphabet"].is_number_unsigned()) {
    symbols = default_symbols(spec["alphabet"].get<std::size_t>());
  } else if (spec["alphabet"].is_array()) {
    for (const auto& s : spec["alphabet"]) {
      if (!s.is_string() || s.get<std::string>().empty()) {
        errs.add(field + ".alphabet", "symbol names must be non-empty strings");
        return std::nullopt;
      }
      symbols.push_back(s.get<std::string>());
    }
    if (std::set<std::string>(symbols.begin(), symbols.end()).size() != symbols.size())
      errs.add(field + ".alphabet", "symbol names must be distinct");
  } else {
    errs.add(field + ".alphabet", "expected an integer or a list of names");
  }
  const std::string kind = spec.value("kind", std::string());
  if (kind != "full" && kind != "sft" && kind != "sofic") errs.add(field + ".kind", "expected one of full, sft, sofic");
  if (kind == "sft" && !spec.contains("transition_matrix")) errs.add(field + ".transition_matrix", "missing for an sft");
  if (kind == "sofic" && !spec.contains("labeled_graph")) errs.add(field + ".labeled_graph", "missing for a sofic shift");
  if (symbols.empty() || (kind != "full" && kind != "sft" && kind != "sofic") ||
      (kind == "sft" && !spec.contains("transition_matrix")) || (kind == "sofic" && !spec.contains("labeled_graph")))
    return std::nullopt;
  NamedShift out{name, build_full_shift(1), symbols};
  try {
    if (kind == "full") {
      out.shift = build_full_shift(symbols.size());
    } else if (kind == "sft") {
      const auto t = spec["transition_matrix"].get<std::vector<std::vector<int>>>();
      if (t.size() != symbols.size()) {
        errs.add(field + ".transition_matrix", "size must match the alphabet");
        return std::nullopt;
      }
      out.shift = build_sft(t);
    } else {
      const json& g = spec["labeled_graph"];
      LabeledGraph graph;
      graph.states = g.at("states").get<int>();
      for (const auto& e : g.at("edges"))
        graph.edges.push_back(LabeledEdge{e.at("from").get<int>(), e.at("to").get<int>(),
                                          parse_symbol(out, e.at("label"), field + ".labeled_graph.edges")});
      out.shift = build_sofic(symbols.size(), graph);
    }
  } catch (const json::exception& e) {
    errs.add(field, e.what());
    return std::nullopt;
  } catch (const Error& e) {
    errs.add(field, e.what());
    return std::nullopt;
  }
  return out;
}

}  // namespace

bool NamedShift::compact() const {
  return std::all_of(symbols.begin(), symbols.end(), [](const std::string& s) { return s.size() == 1; });
}

std::string NamedShift::text(WordView w) const {
  std::string out;
  const bool tight = compact();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!tight && i) out += ' ';
    out += symbols[static_cast<std::size_t>(w[i])];
  }
  return out;
}

std::string NamedShift::text(const Point& p) const { return text(p.prefix) + "(" + text(p.cycle) + ")"; }

std::optional<Symbol> NamedShift::symbol(const std::string& name) const {
  for (std::size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i] == name) return static_cast<Symbol>(i);
  return std::nullopt;
}

Word parse_word(const NamedShift& shift, const json& value, const std::string& field) {
  Word w;
  if (value.is_array()) {
    for (const auto& v : value) w.push_back(parse_symbol(shift, v, field));
  } else if (value.is_string()) {
    const std::string s = value.get<std::string>();
    if (shift.compact()) {
      for (char c : s) w.push_back(parse_symbol(shift, json(std::string(1, c)), field));
    } else {
      std::istringstream is(s);
      std::string tok;
      while (is >> tok) w.push_back(parse_symbol(shift, json(tok), field));
    }
  } else {
    throw Error(ErrorKind::Schema, field + ": expected a word (string or array)");
  }
  return w;
}

Point parse_point(const NamedShift& shift, const json& value, const std::string& field) {
  Point p;
  if (value.is_object()) {
    if (value.contains("prefix")) p.prefix = parse_word(shift, value["prefix"], field + ".prefix");
    if (!value.contains("cycle")) throw Error(ErrorKind::Schema, field + ".cycle: missing");
    p.cycle = parse_word(shift, value["cycle"], field + ".cycle");
  } else {
    p.cycle = parse_word(shift, value, field);
  }
  if (p.cycle.empty()) throw Error(ErrorKind::Schema, field + ": cycle must be non-empty");
  if (!shift.shift.admissible(p.take(p.phase_count() + 2 * p.cycle.size())))
    throw Error(ErrorKind::Schema, field + ": point is not in shift " + shift.name);
  return p;
}

ExperimentConfig parse_config(const json& doc) {
  Problems errs;
  if (!doc.is_object()) {
    errs.add("<root>", "expected an object");
    errs.raise();
  }
  check_keys(doc, {"spec_version", "shifts", "maps", "potentials", "run", "description"}, "<root>", errs);
  ExperimentConfig cfg;
  if (!doc.contains("spec_version") || !doc["spec_version"].is_number_integer())
    errs.add("spec_version", "missing or not an integer");
  else if (doc["spec_version"].get<int>() != kSchemaVersion)
    errs.add("spec_version", "unsupported version " + doc["spec_version"].dump() + " (expected 1)");

  if (!doc.contains("shifts") || !doc["shifts"].is_object() || doc["shifts"].empty()) {
    errs.add("shifts", "expected a non-empty table");
    errs.raise();
  }
  for (auto it = doc["shifts"].begin(); it != doc["shifts"].end(); ++it) {
    if (auto sh = parse_shift(it.key(), it.value(), "shifts." + it.key(), errs)) cfg.shifts.emplace(it.key(), std::move(*sh));
  }

  for (const char* key : {"maps", "potentials", "run"})
    if (doc.contains(key) && !doc[key].is_object()) errs.add(key, "expected a table");

  if (doc.contains("maps") && doc["maps"].is_object()) {
    for (auto it = doc["maps"].begin(); it != doc["maps"].end(); ++it) {
      const std::string field = "maps." + it.key();
      const json& m = it.value();
      check_keys(m, {"domain", "codomain", "symbol_map", "verify_length"}, field, errs);
      const std::string dom = m.value("domain", std::string()), cod = m.value("codomain", std::string());
      if (!cfg.shifts.count(dom)) errs.add(field + ".domain", "unknown shift '" + dom + "'");
      if (!cfg.shifts.count(cod)) errs.add(field + ".codomain", "unknown shift '" + cod + "'");
      if (!m.contains("symbol_map")) errs.add(field + ".symbol_map", "missing");
      if (!cfg.shifts.count(dom) || !cfg.shifts.count(cod) || !m.contains("symbol_map")) continue;
      const NamedShift& x = cfg.shifts.at(dom);
      const NamedShift& y = cfg.shifts.at(cod);
      try {
        std::vector<Symbol> table(x.symbols.size(), -1);
        auto assign = [&](const json& from, const json& to) {
          const Symbol a = parse_symbol(x, from, field + ".symbol_map");
          if (table[static_cast<std::size_t>(a)] != -1)
            throw Error(ErrorKind::Schema, field + ".symbol_map: symbol " + x.symbols[a] + " mapped twice");
          table[static_cast<std::size_t>(a)] = parse_symbol(y, to, field + ".symbol_map");
        };
        const json& sm = m["symbol_map"];
        if (sm.is_object()) {
          for (auto e = sm.begin(); e != sm.end(); ++e) assign(json(e.key()), e.value());
        } else {
          for (const auto& pair : sm) {
            if (!pair.is_array() || pair.size() != 2)
              throw Error(ErrorKind::Schema, field + ".symbol_map: expected [x, y] pairs");
            assign(pair[0], pair[1]);
          }
        }
        for (std::size_t a = 0; a < table.size(); ++a)
          if (table[a] == -1) throw Error(ErrorKind::Schema, field + ".symbol_map: symbol " + x.symbols[a] + " unmapped");
        const std::size_t verify = m.value("verify_length", std::size_t{8});
        cfg.maps.emplace(it.key(), NamedMap{FactorMap(x.shift, y.shift, table, verify), dom, cod});
      } catch (const Error& e) {
        errs.add(field, e.what());
      } catch (const json::exception& e) {
        errs.add(field, e.what());
      }
    }
  }

  if (doc.contains("potentials") && doc["potentials"].is_object()) {
    const json& table = doc["potentials"];
    std::set<std::string> visiting;
    std::function<const NamedPotential*(const std::string&, const std::string&)> resolve;
    resolve = [&](const std::string& name, const std::string& from) -> const NamedPotential* {
      if (auto it = cfg.potentials.find(name); it != cfg.potentials.end()) return &it->second;
      if (!table.contains(name)) {
        errs.add(from, "unknown potential '" + name + "'");
        return nullptr;
      }
      if (visiting.count(name)) {
        errs.add("potentials." + name, "circular derivation");
        return nullptr;
      }
      visiting.insert(name);
      const std::string field = "potentials." + name;
      const json& spec = table[name];
      std::optional<NamedPotential> built;
      try {
        if (spec.contains("derived")) {
          check_keys(spec, {"derived", "description"}, field, errs);
          const json& d = spec["derived"];
          const std::string kind = d.value("kind", std::string());
          auto map_of = [&](const char* key) -> const NamedMap* {
            const std::string mname = d.value(key, std::string());
            auto it = cfg.maps.find(mname);
            if (it == cfg.maps.end()) {
              errs.add(field + ".derived." + key, "unknown map '" + mname + "'");
              return nullptr;
            }
            return &it->second;
          };
          auto base_of = [&]() -> const NamedPotential* {
            return resolve(d.value("potential", std::string()), field + ".derived.potential");
          };
          if (kind == "zero") {
            const std::string s = d.value("shift", std::string());
            if (!cfg.shifts.count(s)) errs.add(field + ".derived.shift", "unknown shift '" + s + "'");
            else built = NamedPotential{zero_potential(cfg.shifts.at(s).shift), s};
          } else if (kind == "compose") {
            const NamedMap* m = map_of("map");
            const NamedPotential* b = base_of();
            if (m && b) {
              if (b->shift != m->codomain) errs.add(field, "composed potential must live on the map's codomain");
              else built = NamedPotential{compose_with_factor(b->potential, m->map), m->domain};
            }
          } else if (kind == "quotient") {
            const NamedMap* m = map_of("map");
            const NamedPotential* b = base_of();
            if (m && b)
              built = NamedPotential{quotient_by_count(b->potential, m->map, d.value("n_check", std::size_t{8})), m->domain};
          } else if (kind == "tilt") {
            const NamedPotential* b = base_of();
            if (!d.contains("per_step") || !d["per_step"].is_number()) errs.add(field + ".derived.per_step", "expected a number");
            else if (b) built = NamedPotential{tilt(b->potential, d["per_step"].get<double>()), b->shift};
          } else {
            errs.add(field + ".derived.kind", "expected one of zero, compose, quotient, tilt");
          }
        } else {
          check_keys(spec, {"shift", "window", "log_values", "description"}, field, errs);
          const std::string s = spec.value("shift", std::string());
          auto window = get_size(spec, "window", field, errs);
          if (!cfg.shifts.count(s)) errs.add(field + ".shift", "unknown shift '" + s + "'");
          else if (!window || *window == 0) errs.add(field + ".window", "expected a positive integer");
          else if (!spec.contains("log_values")) errs.add(field + ".log_values", "missing");
          else {
            const NamedShift& sh = cfg.shifts.at(s);
            const json& lv = spec["log_values"];
            if (lv.is_array()) {
              built = NamedPotential{from_single_function(sh.shift, *window, lv.get<std::vector<double>>()), s};
            } else if (lv.is_object()) {
              std::map<Word, double> values;
              for (auto e = lv.begin(); e != lv.end(); ++e) {
                const Word w = parse_word(sh, json(e.key()), field + ".log_values");
                if (w.size() != *window || !sh.shift.admissible(w))
                  errs.add(field + ".log_values." + e.key(), "not an admissible block of the window length");
                else values[w] = e.value().get<double>();
              }
              built = NamedPotential{from_single_function(sh.shift, *window, values), s};
            } else {
              errs.add(field + ".log_values", "expected an array or a table keyed by words");
            }
          }
        }
      } catch (const Error& e) {
        errs.add(field, e.what());
      } catch (const json::exception& e) {
        errs.add(field, e.what());
      }
      visiting.erase(name);
      if (!built) return nullptr;
      return &cfg.potentials.emplace(name, std::move(*built)).first->second;
    };
    for (auto it = table.begin(); it != table.end(); ++it) resolve(it.key(), "potentials");
  }

  if (doc.contains("run") && doc["run"].is_object()) {
    const json& r = doc["run"];
    const std::string field = "run";
    check_keys(r, {"potential", "map", "shift", "n_max", "n_min", "n_check", "tolerance", "seed", "point", "tails",
                   "markov_order", "markov_steps", "markov_restarts", "gap", "stored_level", "dump_level", "measure"},
               field, errs);
    RunParams& p = cfg.run;
    auto name_ref = [&](const char* key, auto& registry, std::optional<std::string>& slot) {
      if (!r.contains(key)) return;
      if (!r[key].is_string() || !registry.count(r[key].template get<std::string>()))
        errs.add(field + "." + key, "unknown reference " + r[key].dump());
      else slot = r[key].template get<std::string>();
    };
    name_ref("potential", cfg.potentials, p.potential);
    name_ref("map", cfg.maps, p.map);
    name_ref("shift", cfg.shifts, p.shift);
    p.n_max = get_size(r, "n_max", field, errs);
    p.n_min = get_size(r, "n_min", field, errs);
    p.n_check = get_size(r, "n_check", field, errs);
    p.markov_order = get_size(r, "markov_order", field, errs);
    p.gap = get_size(r, "gap", field, errs);
    p.stored_level = get_size(r, "stored_level", field, errs);
    p.dump_level = get_size(r, "dump_level", field, errs);
    if (auto v = get_size(r, "markov_steps", field, errs)) p.markov_steps = *v;
    if (auto v = get_size(r, "markov_restarts", field, errs)) p.markov_restarts = *v;
    if (auto v = get_size(r, "seed", field, errs)) p.seed = *v;
    if (r.contains("tolerance")) {
      if (!r["tolerance"].is_number() || r["tolerance"].get<double>() < 0.0) errs.add(field + ".tolerance", "expected a non-negative number");
      else p.tolerance = r["tolerance"].get<double>();
    }
    if (r.contains("point")) p.point = r["point"];
    if (r.contains("tails")) {
      if (!r["tails"].is_array() || r["tails"].empty()) errs.add(field + ".tails", "expected a non-empty list");
      else p.tails = r["tails"];
    }
    if (r.contains("measure")) {
      const json& m = r["measure"];
      const std::string kind = m.is_object() ? m.value("kind", std::string()) : std::string();
      if (kind != "bernoulli" && kind != "markov") errs.add(field + ".measure.kind", "expected bernoulli or markov");
      else p.measure = m;
    }
  }
  errs.raise_if_any();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Schema, "cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Schema, path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace symdyn::cli
