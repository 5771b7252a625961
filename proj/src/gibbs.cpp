#include "symdyn/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "symdyn/error.hpp"
#include "symdyn/numeric.hpp"

namespace symdyn {

namespace {

bool has_wildcard(WordView pattern) {
  return std::any_of(pattern.begin(), pattern.end(), [](Symbol s) { return s == kWildcard; });
}

/// Scaled forward pass; `mask(i, h)` says whether hidden state h is consistent
/// with pattern position i.
template <typename Mask>
double scaled_forward(const Eigen::VectorXd& initial, const Eigen::MatrixXd& transition, std::size_t length,
                      Mask mask) {
  if (length == 0) return 0.0;
  const Eigen::Index hs = initial.size();
  Eigen::RowVectorXd alpha(hs);
  for (Eigen::Index h = 0; h < hs; ++h) alpha(h) = mask(0, h) ? initial(h) : 0.0;
  double log_scale = 0.0;
  for (std::size_t i = 0;; ++i) {
    const double c = alpha.sum();
    if (c <= 0.0) return kNegInf;
    log_scale += std::log(c);
    alpha /= c;
    if (i + 1 == length) break;
    Eigen::RowVectorXd next = alpha * transition;
    for (Eigen::Index h = 0; h < hs; ++h)
      if (!mask(i + 1, h)) next(h) = 0.0;
    alpha = std::move(next);
  }
  return log_scale;
}

}  // namespace

HiddenMarkovMeasure::HiddenMarkovMeasure(Eigen::VectorXd initial, Eigen::MatrixXd transition,
                                         std::vector<Symbol> emission, std::size_t alphabet_size)
    : initial_(std::move(initial)),
      transition_(std::move(transition)),
      emission_(std::move(emission)),
      alphabet_(alphabet_size) {
  if (transition_.rows() != initial_.size() || transition_.cols() != initial_.size() ||
      emission_.size() != static_cast<std::size_t>(initial_.size()))
    throw Error(ErrorKind::Domain, "hidden Markov measure: inconsistent dimensions");
}

double HiddenMarkovMeasure::log_pattern_prob(WordView pattern) const {
  return scaled_forward(initial_, transition_, pattern.size(), [&](std::size_t i, Eigen::Index h) {
    return pattern[i] == kWildcard || emission_[static_cast<std::size_t>(h)] == pattern[i];
  });
}

MarkovMeasure::MarkovMeasure(Eigen::VectorXd initial, Eigen::MatrixXd transition)
    : initial_(std::move(initial)), transition_(std::move(transition)) {
  if (transition_.rows() != initial_.size() || transition_.cols() != initial_.size())
    throw Error(ErrorKind::Domain, "Markov measure: inconsistent dimensions");
}

double MarkovMeasure::log_pattern_prob(WordView pattern) const {
  if (pattern.empty()) return 0.0;
  if (!has_wildcard(pattern)) {
    double lp = std::log(initial_(pattern[0]));
    for (std::size_t i = 1; i < pattern.size(); ++i) lp += std::log(transition_(pattern[i - 1], pattern[i]));
    return lp;
  }
  return scaled_forward(initial_, transition_, pattern.size(), [&](std::size_t i, Eigen::Index h) {
    return pattern[i] == kWildcard || pattern[i] == static_cast<Symbol>(h);
  });
}

HiddenMarkovMeasure MarkovMeasure::as_hidden() const {
  std::vector<Symbol> emission(static_cast<std::size_t>(initial_.size()));
  for (std::size_t i = 0; i < emission.size(); ++i) emission[i] = static_cast<Symbol>(i);
  return HiddenMarkovMeasure(initial_, transition_, emission, emission.size());
}

double MarkovMeasure::stationarity_defect() const {
  const Eigen::RowVectorXd moved = initial_.transpose() * transition_;
  return (moved - initial_.transpose()).cwiseAbs().maxCoeff();
}

double CylinderDistribution::weight(WordView w) const {
  const WordList& ws = shift.words(level);
  const std::size_t i = ws.index_of(w);
  return i == ws.size() ? 0.0 : weights[i];
}

double CylinderDistribution::total() const { return pairwise_sum(weights); }

double FiniteLevelMeasure::log_pattern_prob(WordView pattern) const {
  if (pattern.size() > dist_.level)
    throw Error(ErrorKind::Precondition, "pattern is longer than the distribution level");
  const WordList& ws = dist_.shift.words(dist_.level);
  std::vector<double> hits;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < pattern.size() && match; ++j)
      match = pattern[j] == kWildcard || pattern[j] == ws[i][j];
    if (match) hits.push_back(dist_.weights[i]);
  }
  const double s = pairwise_sum(hits);
  return s > 0.0 ? std::log(s) : kNegInf;
}

PerronData perron(const Eigen::MatrixXd& m, double tol, std::size_t max_iter) {
  const Eigen::Index n = m.rows();
  PerronData out;
  auto iterate = [&](const Eigen::MatrixXd& a, Eigen::VectorXd& v) {
    v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
      Eigen::VectorXd w = a * v;
      // Averaging with the previous iterate keeps periodic parts from cycling.
      w = 0.5 * (w / w.sum() + v);
      const double delta = (w - v).cwiseAbs().maxCoeff();
      v = w;
      if (delta < tol) break;
    }
    return it;
  };
  out.iterations = iterate(m, out.right);
  iterate(m.transpose(), out.left);
  out.eigenvalue = (m * out.right).sum() / out.right.sum();
  out.left /= out.left.dot(out.right);
  return out;
}

RpfOracle rpf_oracle(const Potential& p) {
  const WindowTable* table = p.window_table();
  if (table == nullptr || table->window != 1)
    throw Error(ErrorKind::Unsupported, "rpf_oracle needs an additive window-1 potential");
  const Subshift& x = p.shift();
  if (x.kind() == ShiftKind::Sofic) throw Error(ErrorKind::Unsupported, "rpf_oracle needs a full shift or SFT");
  if (!x.is_primitive()) throw Error(ErrorKind::Unsupported, "rpf_oracle needs an irreducible aperiodic shift");
  const std::size_t q = x.alphabet_size();
  const auto& t = x.transition_matrix();
  Eigen::MatrixXd l(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::exp(table->log_values[i]) * t[i][j];
  PerronData pd = perron(l, 1e-16, 200000);
  const double lambda = pd.eigenvalue;
  Eigen::MatrixXd trans(l.rows(), l.cols());
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    for (Eigen::Index j = 0; j < l.cols(); ++j) trans(i, j) = l(i, j) * pd.right(j) / (lambda * pd.right(i));
    trans.row(i) /= trans.row(i).sum();
  }
  Eigen::VectorXd pi = pd.left.cwiseProduct(pd.right);
  pi /= pi.sum();
  return RpfOracle{std::log(lambda), MarkovMeasure(pi, trans), pd};
}

BlockOracle block_rpf_oracle(const Potential& p) {
  const WindowTable* table = p.window_table();
  if (table == nullptr) throw Error(ErrorKind::Unsupported, "block_rpf_oracle needs an additive potential");
  const Subshift& x = p.shift();
  const HigherBlock hb = higher_block(x, table->window);
  const Potential lifted = from_single_function(hb.shift, 1, table->log_values);
  RpfOracle inner = rpf_oracle(lifted);
  std::vector<Symbol> emission(hb.blocks.size());
  for (std::size_t i = 0; i < emission.size(); ++i) emission[i] = hb.blocks[i][0];
  HiddenMarkovMeasure mu(inner.gibbs.initial(), inner.gibbs.transition(), emission, x.alphabet_size());
  return BlockOracle{inner.pressure, std::move(mu), hb.blocks};
}

CylinderDistribution cylinder_distribution(const CylinderMeasure& mu, const Subshift& shift, std::size_t n,
                                           std::string provenance) {
  if (mu.alphabet_size() != shift.alphabet_size())
    throw Error(ErrorKind::Domain, "measure and shift alphabets differ");
  const WordList& ws = shift.words(n);
  CylinderDistribution d{shift, n, std::vector<double>(ws.size()), std::move(provenance)};
  for (std::size_t i = 0; i < ws.size(); ++i) d.weights[i] = std::exp(mu.log_prob(ws[i]));
  return d;
}

CylinderDistribution gibbs_approximant(const Potential& p, std::size_t n, double pressure) {
  if (n == 0) throw Error(ErrorKind::Domain, "gibbs_approximant needs n >= 1");
  const auto envs = p.level_envelopes(n);
  std::vector<double> logs(envs.size());
  for (std::size_t i = 0; i < envs.size(); ++i) logs[i] = envs[i].hi - static_cast<double>(n) * pressure;
  const double norm = log_sum_exp(logs);
  CylinderDistribution d{p.shift(), n, std::vector<double>(envs.size()), "gibbs-approximant"};
  for (std::size_t i = 0; i < logs.size(); ++i) d.weights[i] = std::exp(logs[i] - norm);
  return d;
}

CylinderDistribution marginalize(const CylinderDistribution& d, std::size_t m, std::size_t offset) {
  if (m + offset > d.level) throw Error(ErrorKind::Domain, "marginal window exceeds the distribution level");
  const WordList& src = d.shift.words(d.level);
  const WordList& dst = d.shift.words(m);
  CylinderDistribution out{d.shift, m, std::vector<double>(dst.size(), 0.0), d.provenance};
  std::vector<std::vector<double>> buckets(dst.size());
  for (std::size_t i = 0; i < src.size(); ++i) buckets[dst.index_of(src[i].subspan(offset, m))].push_back(d.weights[i]);
  for (std::size_t j = 0; j < dst.size(); ++j) out.weights[j] = pairwise_sum(buckets[j]);
  return out;
}

std::vector<CylinderDistribution> shifted_marginals(const CylinderDistribution& d, std::size_t m,
                                                    std::size_t count) {
  std::vector<CylinderDistribution> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(marginalize(d, m, i));
  return out;
}

CylinderDistribution cesaro_average(const std::vector<CylinderDistribution>& dists) {
  if (dists.empty()) throw Error(ErrorKind::Domain, "cesaro_average of an empty family");
  CylinderDistribution out = dists.front();
  for (const auto& d : dists) {
    if (d.level != out.level || !d.shift.same_as(out.shift))
      throw Error(ErrorKind::Domain, "cesaro_average: levels or shifts differ");
  }
  for (std::size_t j = 0; j < out.weights.size(); ++j) {
    std::vector<double> col(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i) col[i] = dists[i].weights[j];
    out.weights[j] = pairwise_sum(col) / static_cast<double>(dists.size());
  }
  out.provenance = "cesaro(" + out.provenance + ")";
  return out;
}

double invariance_defect(const CylinderDistribution& d) {
  if (d.level < 2) return 0.0;
  const CylinderDistribution a = marginalize(d, d.level - 1, 0);
  const CylinderDistribution b = marginalize(d, d.level - 1, 1);
  double s = 0.0;
  for (std::size_t i = 0; i < a.weights.size(); ++i) s += std::abs(a.weights[i] - b.weights[i]);
  return s;
}

double GibbsRatioEnvelope::constant() const {
  if (min_ratio <= 0.0) return std::numeric_limits<double>::infinity();
  return std::max(max_ratio, 1.0 / min_ratio);
}

GibbsRatioEnvelope gibbs_ratio_envelope(const CylinderDistribution& d, const Potential& p, double pressure) {
  if (!d.shift.same_as(p.shift())) throw Error(ErrorKind::Domain, "distribution and potential shifts differ");
  const auto envs = p.level_envelopes(d.level);
  const double np = static_cast<double>(d.level) * pressure;
  GibbsRatioEnvelope r;
  r.min_hi = r.min_lo = std::numeric_limits<double>::infinity();
  r.max_hi = r.max_lo = 0.0;
  for (std::size_t i = 0; i < envs.size(); ++i) {
    const double w = d.weights[i];
    const double rh = w > 0.0 ? std::exp(std::log(w) - (envs[i].hi - np)) : 0.0;
    const double rl = w > 0.0 ? std::exp(std::log(w) - (envs[i].lo - np)) : 0.0;
    r.min_hi = std::min(r.min_hi, rh);
    r.max_hi = std::max(r.max_hi, rh);
    r.min_lo = std::min(r.min_lo, rl);
    r.max_lo = std::max(r.max_lo, rl);
  }
  r.min_ratio = std::min(r.min_hi, r.min_lo);
  r.max_ratio = std::max(r.max_hi, r.max_lo);
  return r;
}

CylinderDistribution pushforward(const CylinderDistribution& d, const FactorMap& map) {
  if (!d.shift.same_as(map.domain())) throw Error(ErrorKind::Domain, "pushforward: distribution is not on the domain");
  const WordList& xs = d.shift.words(d.level);
  const WordList& ys = map.codomain().words(d.level);
  std::vector<std::vector<double>> buckets(ys.size());
  for (std::size_t i = 0; i < xs.size(); ++i) buckets[ys.index_of(map.image(xs[i]))].push_back(d.weights[i]);
  CylinderDistribution out{map.codomain(), d.level, std::vector<double>(ys.size()), "pushforward(" + d.provenance + ")"};
  for (std::size_t j = 0; j < ys.size(); ++j) out.weights[j] = pairwise_sum(buckets[j]);
  return out;
}

HiddenMarkovMeasure pushforward(const HiddenMarkovMeasure& mu, const FactorMap& map) {
  if (mu.alphabet_size() != map.domain().alphabet_size())
    throw Error(ErrorKind::Domain, "pushforward: measure alphabet differs from the domain");
  std::vector<Symbol> emission(mu.emission().size());
  for (std::size_t h = 0; h < emission.size(); ++h) emission[h] = map.image(mu.emission()[h]);
  return HiddenMarkovMeasure(mu.initial(), mu.transition(), emission, map.codomain().alphabet_size());
}

HiddenMarkovMeasure pushforward(const MarkovMeasure& mu, const FactorMap& map) {
  return pushforward(mu.as_hidden(), map);
}

MixingReport mixing_lower_bound_check(const CylinderMeasure& mu, WordView u, WordView v, std::size_t t_lo,
                                      std::size_t t_hi, std::size_t gap) {
  if (t_lo <= u.size() + 2 * gap)
    throw Error(ErrorKind::Precondition, "mixing check needs t > |u| + 2 * gap");
  MixingReport rep;
  rep.min_C_tilde = std::numeric_limits<double>::infinity();
  const double lu = mu.log_prob(u), lv = mu.log_prob(v);
  for (std::size_t t = t_lo; t <= t_hi; ++t) {
    Word pattern(t + v.size(), kWildcard);
    std::copy(u.begin(), u.end(), pattern.begin());
    std::copy(v.begin(), v.end(), pattern.begin() + static_cast<std::ptrdiff_t>(t));
    const double ratio = std::exp(mu.log_pattern_prob(pattern) - lu - lv);
    rep.t_values.push_back(t);
    rep.ratios.push_back(ratio);
    rep.min_C_tilde = std::min(rep.min_C_tilde, ratio);
  }
  return rep;
}

}  // namespace symdyn
