#include "symdyn/cli/commands.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

#include "symdyn/error.hpp"
#include "symdyn/factor_transfer.hpp"
#include "symdyn/gibbs.hpp"
#include "symdyn/pressure.hpp"

namespace symdyn::cli {

using nlohmann::json;

namespace {

std::string fnum(double v) { return format_number(v); }

/// Everything a subcommand needs besides the config: resolved defaults and the
/// report under construction.
struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  const std::string& name;
  RunResult result;
  std::vector<CheckRecord> checks;
  json summary = json::object();
  json parameters = json::object();

  std::size_t n_max(std::size_t fallback) {
    const std::size_t n = opts.n_max.value_or(cfg.run.n_max.value_or(fallback));
    if (n == 0) throw Error(ErrorKind::Schema, "run.n_max: must be positive");
    parameters["n_max"] = n;
    return n;
  }
  double tolerance(double fallback) {
    const double t = cfg.run.tolerance.value_or(fallback);
    parameters["tolerance"] = t;
    return t;
  }
  std::uint64_t seed() {
    const std::uint64_t s = opts.seed.value_or(cfg.run.seed.value_or(1));
    parameters["seed"] = s;
    return s;
  }

  const NamedPotential& potential() {
    if (!cfg.run.potential) throw Error(ErrorKind::Schema, "run.potential: required for " + name);
    parameters["potential"] = *cfg.run.potential;
    return cfg.potentials.at(*cfg.run.potential);
  }
  const NamedMap& map() {
    if (!cfg.run.map) throw Error(ErrorKind::Schema, "run.map: required for " + name);
    parameters["map"] = *cfg.run.map;
    return cfg.maps.at(*cfg.run.map);
  }
  const NamedShift& shift(const std::string& s) const { return cfg.shifts.at(s); }

  void require_on(const NamedPotential& p, const std::string& shift_name, const char* role) const {
    if (p.shift != shift_name)
      throw Error(ErrorKind::Schema, "run.potential: must live on the map's " + std::string(role) + " (" + shift_name + ")");
  }

  void budget(double cost) {
    parameters["estimated_cost"] = cost;
    if (cost > kBudget && !opts.force) {
      std::ostringstream os;
      os << "estimated cost " << cost << " exceeds the budget of " << kBudget << "; rerun with --force";
      throw Error(ErrorKind::Budget, os.str());
    }
  }

  void add_checks(const std::vector<CheckRecord>& cs) { checks.insert(checks.end(), cs.begin(), cs.end()); }
  void file(const std::string& fname, const Tsv& t) { result.files.add(fname, t.str()); }
};

double power(std::size_t q, std::size_t n) { return std::pow(static_cast<double>(q), static_cast<double>(n)); }

std::shared_ptr<CylinderMeasure> oracle_measure(const Potential& p, double& pressure, std::string& provenance) {
  const WindowTable* t = p.window_table();
  if (t != nullptr && t->window == 1) {
    RpfOracle o = rpf_oracle(p);
    pressure = o.pressure;
    provenance = "rpf-oracle";
    return std::make_shared<MarkovMeasure>(std::move(o.gibbs));
  }
  BlockOracle o = block_rpf_oracle(p);
  pressure = o.pressure;
  provenance = "block-rpf-oracle";
  return std::make_shared<HiddenMarkovMeasure>(std::move(o.gibbs));
}

MarkovMeasure parse_measure(const json& m, std::size_t q, const std::string& field) {
  auto vec = [&](const json& v, const std::string& f) {
    const auto x = v.get<std::vector<double>>();
    if (x.size() != q) throw Error(ErrorKind::Schema, f + ": expected " + std::to_string(q) + " entries");
    double s = 0.0;
    for (double e : x) {
      if (e < 0.0) throw Error(ErrorKind::Schema, f + ": entries must be non-negative");
      s += e;
    }
    if (std::abs(s - 1.0) > 1e-9) throw Error(ErrorKind::Schema, f + ": entries must sum to 1");
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(q)).eval();
  };
  const auto qi = static_cast<Eigen::Index>(q);
  if (m.is_null()) {
    Eigen::VectorXd u = Eigen::VectorXd::Constant(qi, 1.0 / static_cast<double>(q));
    return MarkovMeasure(u, u.transpose().replicate(qi, 1));
  }
  try {
    if (m["kind"] == "bernoulli") {
      const Eigen::VectorXd w = vec(m.at("weights"), field + ".weights");
      return MarkovMeasure(w, w.transpose().replicate(qi, 1));
    }
    const Eigen::VectorXd init = vec(m.at("initial"), field + ".initial");
    const json& rows = m.at("transition");
    if (rows.size() != q) throw Error(ErrorKind::Schema, field + ".transition: expected " + std::to_string(q) + " rows");
    Eigen::MatrixXd t(qi, qi);
    for (std::size_t i = 0; i < q; ++i) t.row(static_cast<Eigen::Index>(i)) = vec(rows[i], field + ".transition").transpose();
    MarkovMeasure mm(init, t);
    if (mm.stationarity_defect() > 1e-9) throw Error(ErrorKind::Schema, field + ": initial vector is not stationary");
    return mm;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, field + ": " + e.what());
  }
}

Tsv distribution_dump(const CylinderDistribution& d, const NamedShift& s) {
  Tsv t({"word", "weight"});
  t.comment("level=" + std::to_string(d.level));
  t.comment("shift=" + s.name + " " + s.shift.describe());
  t.comment("provenance=" + d.provenance);
  const WordList& ws = s.shift.words(d.level);
  for (std::size_t i = 0; i < ws.size(); ++i) t.row({s.text(ws[i]), fnum(d.weights[i])});
  return t;
}

void cmd_pressure(Context& c) {
  const NamedPotential& np = c.potential();
  const NamedShift& sh = c.shift(np.shift);
  const std::size_t n_max = c.n_max(12);
  c.budget(power(sh.shift.alphabet_size(), n_max));
  BracketOptions bo;
  bo.gap = c.cfg.run.gap;
  Tsv table({"n", "estimate", "lo", "hi"});
  Tsv plot({"n", "estimate"});
  PressureBracket last;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double est = pressure_estimate(np.potential, n);
    last = pressure_bracket(np.potential, n, bo);
    table.row({std::to_string(n), fnum(est), fnum(last.lo), fnum(last.hi)});
    plot.row({std::to_string(n), fnum(est)});
    c.checks.push_back(CheckRecord{"bracket-contains-estimate", n, last.lo, last.hi, last.contains(est)});
  }
  c.file("pressure.tsv", table);
  c.file("pressure_plot.tsv", plot);
  c.summary["estimate"] = last.s_n_log / static_cast<double>(n_max);
  c.summary["lo"] = last.lo;
  c.summary["hi"] = last.hi;
  c.summary["C"] = last.C;
  c.summary["M"] = last.M;
  c.summary["C_source"] = to_string(last.C_source);
  c.summary["M_source"] = to_string(last.M_source);
  c.summary["gap"] = last.gap ? json(*last.gap) : json(nullptr);
  if (c.cfg.run.markov_order) {
    const MarkovBound mb = markov_lower_bound(np.potential, *c.cfg.run.markov_order, c.cfg.run.markov_steps, c.seed(),
                                              c.cfg.run.markov_restarts);
    c.summary["markov"] = {{"order", mb.params.order}, {"value", mb.value}, {"entropy", mb.entropy},
                           {"energy", mb.energy}, {"best_restart", mb.best_restart}};
    c.checks.push_back(CheckRecord{"markov-below-hi", n_max, mb.value, last.hi, mb.value <= last.hi + 1e-12});
  }
}

void cmd_relative_pressure(Context& c) {
  const NamedMap& nm = c.map();
  const NamedPotential& np = c.potential();
  c.require_on(np, nm.domain, "domain");
  const NamedShift& y_shift = c.shift(nm.codomain);
  if (c.cfg.run.point.is_null()) throw Error(ErrorKind::Schema, "run.point: required for relative-pressure");
  const Point y = parse_point(y_shift, c.cfg.run.point, "run.point");
  c.parameters["point"] = y_shift.text(y);
  const std::size_t n_max = c.n_max(10);
  c.budget(power(nm.map.domain().alphabet_size(), n_max));
  const RelativePressureSeries s = relative_pressure_series(nm.map, np.potential, y, n_max);
  const bool full = nm.map.domain().kind() == ShiftKind::Full && nm.map.codomain().kind() == ShiftKind::Full;
  Tsv table(full ? std::vector<std::string>{"n", "term", "running_max", "image_term"}
                 : std::vector<std::string>{"n", "term", "running_max"});
  for (std::size_t n = 1; n <= n_max; ++n) {
    std::vector<std::string> row{std::to_string(n), fnum(s.terms[n - 1]), fnum(s.running_max[n - 1])};
    if (full) {
      const double g = image_potential(nm.map, np.potential, n, ImageRoute::Enumerate).hi(y.take(n));
      row.push_back(fnum(g / static_cast<double>(n)));
    }
    table.row(std::move(row));
  }
  c.file("relative_pressure.tsv", table);
  c.summary["last"] = s.last;
  c.summary["max"] = s.max;
  if (full) {
    const double tol = c.tolerance(1e-12);
    const double gap = relative_vs_image_gap(nm.map, np.potential, y, n_max);
    c.checks.push_back(CheckRecord{"image-identity", n_max, gap, tol, gap <= tol});
  }
}

void cmd_factor_gibbs(Context& c) {
  const NamedMap& nm = c.map();
  const NamedPotential& np = c.potential();
  c.require_on(np, nm.domain, "domain");
  const NamedShift& y_shift = c.shift(nm.codomain);
  const std::size_t n_max = c.n_max(10);
  const std::size_t n_min = std::min(c.cfg.run.n_min.value_or(1), n_max);
  c.parameters["n_min"] = n_min;
  c.budget(power(nm.map.domain().alphabet_size(), n_max));
  double pressure = 0.0;
  std::string provenance;
  const auto mu = oracle_measure(np.potential, pressure, provenance);

  const PressureEqualityReport pe = verify_pressure_equality(nm.map, np.potential, n_max);
  const ImageGibbsReport ig = verify_image_gibbs(nm.map, *mu, np.potential, pressure, n_max, n_min);
  const SubadditivityReport sub = check_image_subadditivity(nm.map, np.potential, std::min<std::size_t>(n_max, 8));
  c.add_checks(pe.checks);
  c.add_checks(ig.checks);
  c.add_checks(sub.checks);

  Tsv eq({"n", "log_G", "log_N_lo", "log_N_hi", "log_M", "x_lo", "x_hi", "y_lo", "y_hi"});
  for (const auto& r : pe.rows)
    eq.row({std::to_string(r.n), fnum(r.log_G), fnum(r.log_N_lo), fnum(r.log_N_hi), fnum(r.log_M), fnum(r.x_lo),
            fnum(r.x_hi), fnum(r.y_lo), fnum(r.y_hi)});
  Tsv gib({"n", "min_ratio", "max_ratio", "C1", "M"});
  Tsv env({"n", "min", "max"});
  for (const auto& r : ig.rows) {
    gib.row({std::to_string(r.n), fnum(r.min_ratio), fnum(r.max_ratio), fnum(r.C1), fnum(r.M)});
    env.row({std::to_string(r.n), fnum(r.min_ratio), fnum(r.max_ratio)});
  }
  const std::size_t level = std::min(c.cfg.run.dump_level.value_or(n_max), n_max);
  const ImagePotentialTable t = image_potential(nm.map, np.potential, level);
  Tsv dump({"y_word", "log_g_lo", "log_g_hi"});
  dump.comment("level=" + std::to_string(level));
  const WordList& ys = nm.map.codomain().words(level);
  for (std::size_t i = 0; i < ys.size(); ++i) dump.row({y_shift.text(ys[i]), fnum(t.log_g_lo[i]), fnum(t.log_g_hi[i])});
  c.file("pressure_equality.tsv", eq);
  c.file("image_gibbs.tsv", gib);
  c.file("ratio_envelope.tsv", env);
  c.file("image_potential.tsv", dump);
  c.summary["pressure"] = pressure;
  c.summary["measure"] = provenance;
  c.summary["C1"] = ig.C1;
  c.summary["subadditivity_max_defect"] = sub.max_defect;
  if (!pe.pass) c.summary["sandwich_witness"] = y_shift.text(pe.witness);
}

void cmd_preimage(Context& c) {
  const NamedMap& nm = c.map();
  const NamedPotential& np = c.potential();
  c.require_on(np, nm.codomain, "codomain");
  const NamedShift& x_shift = c.shift(nm.domain);
  const std::size_t n_max = c.n_max(8);
  const std::size_t n_check = c.cfg.run.n_check.value_or(10);
  c.parameters["n_check"] = n_check;
  const double tol = c.tolerance(1e-8);
  c.budget(power(nm.map.domain().alphabet_size(), std::max(n_max, n_check)));
  const PreimageGibbs pg = preimage_gibbs(nm.map, np.potential, n_max, n_check);
  c.checks.push_back(CheckRecord{"pushforward-agreement", pg.check.n_max, pg.check.max_abs_diff, tol,
                                 pg.check.max_abs_diff <= tol});
  const std::size_t level = std::min(c.cfg.run.dump_level.value_or(4), pg.mu1 ? n_check : n_max);
  const CylinderDistribution d = pg.mu1 ? cylinder_distribution(*pg.mu1, nm.map.domain(), level, pg.provenance)
                                        : marginalize(*pg.mu1_approx, level);
  c.file("preimage_distribution.tsv", distribution_dump(d, x_shift));
  c.summary["provenance"] = pg.provenance;
  c.summary["phi1"] = pg.phi1.describe();
  c.summary["phi1_flavor"] = to_string(pg.phi1.flavor());
  c.summary["phi1_C"] = pg.phi1.C().value;
  c.summary["condition_best_D"] = pg.condition.best_D;
  c.summary["condition_decay_ratio"] = pg.condition.decay_ratio;
  c.summary["max_abs_diff"] = pg.check.max_abs_diff;
  c.summary["max_rel_diff"] = pg.check.max_rel_diff;
  c.summary["warnings"] = pg.phi1.warnings();
}

void cmd_condition_a(Context& c) {
  const NamedMap& nm = c.map();
  const NamedShift& y_shift = c.shift(nm.codomain);
  const std::size_t n_max = c.n_max(12);
  c.budget(power(nm.map.codomain().alphabet_size(), n_max));
  const ConditionAReport r = check_condition_A(nm.map, n_max);
  Tsv table({"n", "D"});
  for (std::size_t n = 2; n <= n_max; ++n) table.row({std::to_string(n), fnum(r.per_length_D[n])});
  c.file("condition_a.tsv", table);
  c.checks.push_back(CheckRecord{"condition-a-holds", n_max, r.best_D, 0.0, r.holds_up_to_n_max});
  c.checks.push_back(CheckRecord{"count-trend-stable", n_max, r.decay_ratio, 0.8, !r.trend_decaying});
  c.summary["best_D"] = r.best_D;
  c.summary["decay_ratio"] = r.decay_ratio;
  c.summary["trend_decaying"] = r.trend_decaying;
  c.summary["witness"] = y_shift.text(r.witness);
  c.summary["witness_split"] = r.witness_split;
}

void cmd_ratio_criterion(Context& c) {
  const NamedMap& nm = c.map();
  const NamedPotential& np = c.potential();
  c.require_on(np, nm.domain, "domain");
  const std::size_t n_max = c.n_max(10);
  c.budget(power(nm.map.domain().alphabet_size(), n_max));
  const RatioCriterion rc = equality_criterion_ratio(nm.map, np.potential, n_max);
  Tsv table({"n", "A_n"});
  for (std::size_t n = 1; n <= n_max; ++n) table.row({std::to_string(n), fnum(rc.per_n[n])});
  c.file("ratio_criterion.tsv", table);
  c.summary["A_hat"] = rc.A_hat;
  c.summary["growing"] = rc.growing;
  c.summary["witness"] = c.shift(nm.domain).text(rc.witness);
  c.result.verdict = rc.growing ? "FAIL-trend" : "PASS-trend";
  c.result.exit = rc.growing ? ExitCode::Fail : ExitCode::Pass;
}

void cmd_u_converge(Context& c) {
  const NamedMap& nm = c.map();
  const NamedPotential& np = c.potential();
  c.require_on(np, nm.domain, "domain");
  const NamedShift& x_shift = c.shift(nm.domain);
  const NamedShift& y_shift = c.shift(nm.codomain);
  const std::size_t n_max = c.n_max(20);
  std::vector<Point> tails;
  if (c.cfg.run.tails.is_null()) {
    const auto q = static_cast<Symbol>(x_shift.symbols.size());
    tails = {Point{{}, {0}}, Point{{}, {static_cast<Symbol>(q - 1)}}};
  } else {
    for (std::size_t i = 0; i < c.cfg.run.tails.size(); ++i)
      tails.push_back(parse_point(x_shift, c.cfg.run.tails[i], "run.tails[" + std::to_string(i) + "]"));
  }
  json tail_text = json::array();
  for (const Point& t : tails) tail_text.push_back(x_shift.text(t));
  c.parameters["tails"] = tail_text;
  const std::size_t stored = std::min(c.cfg.run.stored_level.value_or(4), n_max);
  c.parameters["stored_level"] = stored;
  const WindowTable* wt = np.potential.window_table();
  const std::size_t k = wt ? wt->window : 1;
  c.budget(power(y_shift.symbols.size(), n_max + 1) * power(x_shift.symbols.size(), k - 1) *
           static_cast<double>(tails.size()));
  const KemptonReport r = kempton_u(nm.map, np.potential, tails, n_max, stored);
  Tsv conv({"n", "sup_diff", "w_sensitivity"});
  for (std::size_t n = 1; n < n_max; ++n) conv.row({std::to_string(n), fnum(r.sup_diffs[n]), fnum(r.w_sensitivity[n])});
  Tsv table({"tail", "n", "y_word", "u"});
  const std::size_t qy = y_shift.symbols.size();
  for (std::size_t t = 0; t < tails.size(); ++t)
    for (std::size_t n = 1; n <= stored; ++n)
      for (std::size_t z = 0; z < r.u_tables[t][n].size(); ++z) {
        Word w(n + 1);
        std::size_t code = z;
        for (std::size_t i = n + 1; i-- > 0;) {
          w[i] = static_cast<Symbol>(code % qy);
          code /= qy;
        }
        table.row({x_shift.text(tails[t]), std::to_string(n), y_shift.text(w), fnum(r.u_tables[t][n][z])});
      }
  c.file("u_converge.tsv", conv);
  c.file("u_table.tsv", table);
  c.checks.push_back(CheckRecord{"u-bound", n_max, static_cast<double>(r.bound_violations), 0.0, r.bound_violations == 0});
  c.checks.push_back(CheckRecord{"sup-diffs-decreasing", n_max, r.geometric_ratio, 1.0, r.sup_diffs_decreasing});
  c.summary["geometric_ratio"] = r.geometric_ratio;
  c.summary["w_sensitivity_last"] = r.w_sensitivity[n_max];
  c.summary["min_u"] = r.min_u;
  c.summary["max_u_over_bound"] = r.max_u_over_bound;
  c.summary["bound_violations"] = r.bound_violations;
}

void cmd_compensation(Context& c) {
  const NamedMap& nm = c.map();
  const NamedShift& y_shift = c.shift(nm.codomain);
  const std::size_t n_max = c.n_max(10);
  const double tol = c.tolerance(1e-12);
  c.budget(power(y_shift.symbols.size(), n_max));
  const MarkovMeasure m = parse_measure(c.cfg.run.measure, y_shift.symbols.size(), "run.measure");
  c.parameters["measure"] = c.cfg.run.measure.is_null() ? json("uniform") : c.cfg.run.measure;
  const Potential g = compensation_function_full_shift(nm.map);
  Tsv gtab({"symbol", "g"});
  for (std::size_t b = 0; b < y_shift.symbols.size(); ++b) gtab.row({y_shift.symbols[b], fnum(g.window_table()->log_values[b])});
  Tsv table({"n", "mean_log_count", "integral_g", "abs_diff"});
  for (std::size_t n = 1; n <= n_max; ++n) {
    const CompensationCheck cc = compensation_check(nm.map, m, n);
    table.row({std::to_string(n), fnum(cc.mean_log_count), fnum(cc.integral_g), fnum(cc.abs_diff)});
    c.checks.push_back(CheckRecord{"compensation-identity", n, cc.abs_diff, tol, cc.abs_diff <= tol});
  }
  c.file("compensation_function.tsv", gtab);
  c.file("compensation.tsv", table);
}

void cmd_oracle(Context& c) {
  const NamedPotential& np = c.potential();
  const NamedShift& sh = c.shift(np.shift);
  const std::size_t n_max = c.n_max(4);
  const double tol = c.tolerance(1e-12);
  c.budget(power(sh.symbols.size(), n_max));
  double pressure = 0.0;
  std::string provenance;
  const auto mu = oracle_measure(np.potential, pressure, provenance);
  const CylinderDistribution d = cylinder_distribution(*mu, sh.shift, n_max, provenance);
  c.file("oracle_distribution.tsv", distribution_dump(d, sh));
  const double defect = invariance_defect(d);
  const double mass = std::abs(d.total() - 1.0);
  c.checks.push_back(CheckRecord{"invariance-defect", n_max, defect, tol, defect <= tol});
  c.checks.push_back(CheckRecord{"total-mass", n_max, mass, tol, mass <= tol});
  c.summary["pressure"] = pressure;
  c.summary["provenance"] = provenance;
}

const std::vector<std::pair<std::string, std::function<void(Context&)>>>& table() {
  static const std::vector<std::pair<std::string, std::function<void(Context&)>>> t{
      {"pressure", cmd_pressure},           {"relative-pressure", cmd_relative_pressure},
      {"factor-gibbs", cmd_factor_gibbs},   {"preimage", cmd_preimage},
      {"condition-a", cmd_condition_a},     {"ratio-criterion", cmd_ratio_criterion},
      {"u-converge", cmd_u_converge},       {"compensation", cmd_compensation},
      {"oracle", cmd_oracle}};
  return t;
}

json checks_json(const std::vector<CheckRecord>& checks) {
  json out = json::array();
  for (const auto& r : checks) out.push_back({{"check", r.check}, {"n", r.n}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"pass", r.pass}});
  return out;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, _] : table()) v.push_back(n);
    return v;
  }();
  return names;
}

RunResult run_subcommand(const std::string& name, const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto& t = table();
  auto it = std::find_if(t.begin(), t.end(), [&](const auto& e) { return e.first == name; });
  if (it == t.end()) throw Error(ErrorKind::Schema, "unknown subcommand '" + name + "'");
  Context c{cfg, opts, name, {}, {}, json::object(), json::object()};
  try {
    it->second(c);
    if (c.result.verdict.empty()) {
      const bool ok = all_pass(c.checks);
      c.result.verdict = ok ? "PASS" : "FAIL";
      c.result.exit = ok ? ExitCode::Pass : ExitCode::Fail;
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Refused && e.kind() != ErrorKind::Budget) throw;
    c.result = RunResult{};
    c.checks.clear();
    c.summary = {{"reason", e.what()}};
    c.result.verdict = "REFUSED";
    c.result.exit = e.kind() == ErrorKind::Budget ? ExitCode::Budget : ExitCode::Refused;
  }
  json files = json::array();
  for (const auto& f : c.result.files.names()) files.push_back(f);
  files.push_back("report.json");
  c.result.report = {{"subcommand", name},       {"spec_version", cfg.spec_version}, {"verdict", c.result.verdict},
                     {"parameters", c.parameters}, {"checks", checks_json(c.checks)},  {"summary", c.summary},
                     {"files", files}};
  return std::move(c.result);
}

void emit(const RunResult& result, const RunOptions& opts) {
  OutputSet all = result.files;
  all.add("report.json", result.report.dump(2) + "\n");
  all.write(opts.out_dir);
}

}  // namespace symdyn::cli
