#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scramble/errors.hpp"
#include "scramble/measures.hpp"
#include "scramble/point.hpp"
#include "scramble/rational.hpp"
#include "scramble/shiftspace.hpp"
#include "scramble/word.hpp"

namespace scramble {

// phi(x) = values[x_0 .. x_{m-1}], stored by the base-q value of the word.
class LocalObservable {
 public:
  LocalObservable() = default;
  LocalObservable(int q, int m) : q_(q), m_(m) {
    if (m < 1) fail(ErrorCode::InvalidArgument, "observable depth must be positive");
    std::size_t count = 1;
    for (int i = 0; i < m; ++i) count *= static_cast<std::size_t>(q);
    values_.assign(count, Rational(0));
    defined_.assign(count, 0);
  }

  static LocalObservable from_map(int q, int m, const std::map<Word, Rational>& vals) {
    LocalObservable phi(q, m);
    for (const auto& [w, v] : vals) phi.set(w, v);
    return phi;
  }

  // phi = the value of the first coordinate.
  static LocalObservable first_coordinate(int q) {
    LocalObservable phi(q, 1);
    for (int s = 0; s < q; ++s) phi.set(Word{static_cast<Symbol>(s)}, Rational(s));
    return phi;
  }

  static LocalObservable constant(int q, const Rational& c) {
    LocalObservable phi(q, 1);
    for (int s = 0; s < q; ++s) phi.set(Word{static_cast<Symbol>(s)}, c);
    return phi;
  }

  int q() const { return q_; }
  int depth() const { return m_; }

  std::size_t code(const Symbol* w) const {
    std::size_t v = 0;
    for (int i = 0; i < m_; ++i) v = v * static_cast<std::size_t>(q_) + w[i];
    return v;
  }

  void set(const Word& w, const Rational& v) {
    if (static_cast<int>(w.size()) != m_) fail(ErrorCode::InvalidArgument, "observable word has the wrong length");
    check_symbols(w, q_);
    values_[code(w.data())] = v;
    defined_[code(w.data())] = 1;
  }

  const Rational& operator()(const Symbol* w) const { return values_[code(w)]; }
  const Rational& value(const Word& w) const { return values_[code(w.data())]; }
  bool defined(const Word& w) const { return defined_[code(w.data())] != 0; }

  void validate(const ShiftModel& model) const {
    if (model.q() != q_) fail(ErrorCode::AlphabetMismatch, "observable alphabet differs from the model");
    for (const auto& w : enumerate_words(model, m_))
      if (!defined(w)) fail(ErrorCode::InvalidArgument, "observable undefined on [" + format_word(w) + "]");
  }

  // Pairing with a cylinder measure of depth >= m.
  Rational integrate(const CylinderMeasure& mu) const {
    Rational s = 0;
    for (const auto& w : mu.words_of_length(m_))
      if (defined(w)) s += value(w) * mu.weight(w);
    return s;
  }

 private:
  int q_ = 2;
  int m_ = 1;
  std::vector<Rational> values_;
  std::vector<std::uint8_t> defined_;
};

inline Rational birkhoff_average(const LazyPoint& x, const LocalObservable& phi, Index n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "birkhoff_average needs n >= 1");
  const Word xs = x.prefix(n + phi.depth() - 1);
  Rational s = 0;
  for (Index i = 0; i < n; ++i) s += phi(xs.data() + i);
  return s / Rational(n);
}

struct WeightedEdge {
  int from = 0;
  int to = 0;
  Rational weight;
};

struct WeightedGraph {
  int nodes = 0;
  std::vector<WeightedEdge> edges;
};

struct MeanCycle {
  Rational value;
  std::vector<int> cycle;  // node sequence, first node not repeated at the end
};

// Karp's minimum mean cycle with exact arithmetic. Returns nullopt for an
// acyclic graph.
inline std::optional<MeanCycle> min_mean_cycle(const WeightedGraph& g) {
  const int n = g.nodes;
  if (n == 0) return std::nullopt;
  std::vector<std::vector<std::optional<Rational>>> D(static_cast<std::size_t>(n) + 1,
                                                      std::vector<std::optional<Rational>>(static_cast<std::size_t>(n)));
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(n) + 1, std::vector<int>(static_cast<std::size_t>(n), -1));
  for (int v = 0; v < n; ++v) D[0][static_cast<std::size_t>(v)] = Rational(0);
  for (int k = 1; k <= n; ++k) {
    auto& cur = D[static_cast<std::size_t>(k)];
    const auto& prev = D[static_cast<std::size_t>(k - 1)];
    for (const auto& e : g.edges) {
      const auto& pu = prev[static_cast<std::size_t>(e.from)];
      if (!pu) continue;
      Rational cand = *pu + e.weight;
      auto& slot = cur[static_cast<std::size_t>(e.to)];
      if (!slot || cand < *slot) {
        slot = cand;
        pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(e.to)] = e.from;
      }
    }
  }
  std::optional<Rational> best;
  int best_v = -1;
  for (int v = 0; v < n; ++v) {
    const auto& dn = D[static_cast<std::size_t>(n)][static_cast<std::size_t>(v)];
    if (!dn) continue;
    std::optional<Rational> worst;
    for (int k = 0; k < n; ++k) {
      const auto& dk = D[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
      if (!dk) continue;
      Rational r = (*dn - *dk) / Rational(n - k);
      if (!worst || r > *worst) worst = r;
    }
    if (worst && (!best || *worst < *best)) {
      best = worst;
      best_v = v;
    }
  }
  if (!best) return std::nullopt;
  MeanCycle out;
  out.value = *best;
  // The optimal n-step walk into best_v contains a cycle of mean exactly value.
  std::vector<int> walk(static_cast<std::size_t>(n) + 1);
  walk[static_cast<std::size_t>(n)] = best_v;
  for (int k = n; k > 0; --k)
    walk[static_cast<std::size_t>(k - 1)] = pred[static_cast<std::size_t>(k)][static_cast<std::size_t>(walk[static_cast<std::size_t>(k)])];
  std::map<std::pair<int, int>, Rational> weight_of;
  for (const auto& e : g.edges) {
    auto key = std::make_pair(e.from, e.to);
    auto it = weight_of.find(key);
    if (it == weight_of.end() || e.weight < it->second) weight_of[key] = e.weight;
  }
  for (int i = 0; i <= n && out.cycle.empty(); ++i) {
    for (int j = i + 1; j <= n; ++j) {
      if (walk[static_cast<std::size_t>(i)] != walk[static_cast<std::size_t>(j)]) continue;
      Rational s = 0;
      for (int k = i; k < j; ++k)
        s += weight_of[{walk[static_cast<std::size_t>(k)], walk[static_cast<std::size_t>(k + 1)]}];
      if (s / Rational(j - i) == out.value) {
        out.cycle.assign(walk.begin() + i, walk.begin() + j);
        break;
      }
    }
  }
  return out;
}

inline std::optional<MeanCycle> max_mean_cycle(const WeightedGraph& g) {
  WeightedGraph neg = g;
  for (auto& e : neg.edges) e.weight = -e.weight;
  auto r = min_mean_cycle(neg);
  if (r) r->value = -r->value;
  return r;
}

// Nodes are admissible m-words; u -> v when they overlap on m-1 symbols and
// u v_last is admissible. Edge weight is phi(u).
struct BlockGraph {
  std::vector<Word> nodes;
  WeightedGraph graph;
};

inline BlockGraph block_graph(const ShiftModel& model, const LocalObservable& phi) {
  BlockGraph bg;
  bg.nodes = enumerate_words(model, phi.depth());
  bg.graph.nodes = static_cast<int>(bg.nodes.size());
  std::map<Word, int> id;
  for (std::size_t i = 0; i < bg.nodes.size(); ++i) id[bg.nodes[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < bg.nodes.size(); ++i) {
    const Word& u = bg.nodes[i];
    for (int s = 0; s < model.q(); ++s) {
      Word ext = u;
      ext.push_back(static_cast<Symbol>(s));
      if (!word_admissible(model, ext)) continue;
      Word v(ext.begin() + 1, ext.end());
      auto it = id.find(v);
      if (it == id.end()) continue;
      bg.graph.edges.push_back({static_cast<int>(i), it->second, phi.value(u)});
    }
  }
  return bg;
}

struct LphiResult {
  Rational lo;
  Rational hi;
  bool interior_empty = true;
  Word min_cycle;  // w with the periodic measure of w^infinity attaining lo
  Word max_cycle;
};

inline LphiResult lphi_interval(const ShiftModel& model, const LocalObservable& phi) {
  if (model.kind() == ModelKind::Beta) fail(ErrorCode::NotMixing, "lphi_interval needs a full shift or mixing SFT");
  if (model.kind() == ModelKind::Sft && !primitivity_exponent(model.adjacency()))
    fail(ErrorCode::NotMixing, "adjacency matrix is not primitive");
  phi.validate(model);
  const BlockGraph bg = block_graph(model, phi);
  auto lo = min_mean_cycle(bg.graph);
  auto hi = max_mean_cycle(bg.graph);
  if (!lo || !hi) fail(ErrorCode::NotMixing, "block graph has no cycle");
  LphiResult r;
  r.lo = lo->value;
  r.hi = hi->value;
  r.interior_empty = (r.lo == r.hi);
  for (int v : lo->cycle) r.min_cycle.push_back(bg.nodes[static_cast<std::size_t>(v)].front());
  for (int v : hi->cycle) r.max_cycle.push_back(bg.nodes[static_cast<std::size_t>(v)].front());
  return r;
}

struct OscillationReport {
  Index horizon = 0;
  Index tail_start = 0;
  Rational liminf_estimate;
  Rational limsup_estimate;
  Rational oscillation;
  std::optional<Rational> target;
  std::optional<bool> level_consistent;  // all tail averages within tol of target
};

// Extremes of A_j = (1/j) sum_{i<j} phi(f^i x) over j in the tail window.
inline OscillationReport oscillation_stats(const LazyPoint& x, const LocalObservable& phi, Index horizon,
                                           std::optional<Rational> target = std::nullopt,
                                           const Rational& tol = Rational(1, 100), double tail_fraction = 0.5) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  OscillationReport rep;
  rep.horizon = horizon;
  rep.tail_start = std::max<Index>(1, static_cast<Index>(std::ceil(static_cast<double>(horizon) * tail_fraction)));
  const Word xs = x.prefix(horizon + phi.depth() - 1);
  Rational s = 0;
  bool first = true;
  bool level = true;
  for (Index j = 1; j <= horizon; ++j) {
    s += phi(xs.data() + (j - 1));
    if (j < rep.tail_start) continue;
    Rational a = s / Rational(j);
    if (first || a < rep.liminf_estimate) rep.liminf_estimate = a;
    if (first || a > rep.limsup_estimate) rep.limsup_estimate = a;
    first = false;
    if (target && abs_value(a - *target) > tol) level = false;
  }
  rep.oscillation = rep.limsup_estimate - rep.liminf_estimate;
  rep.target = target;
  if (target) rep.level_consistent = level;
  return rep;
}

// Partial averages on a log-spaced grid of j values up to n.
inline std::vector<std::pair<Index, Rational>> average_trace(const LazyPoint& x, const LocalObservable& phi, Index n,
                                                             int samples_per_octave = 8) {
  std::vector<Index> grid;
  for (double j = 1; j <= static_cast<double>(n); j *= std::pow(2.0, 1.0 / samples_per_octave)) {
    const auto g = static_cast<Index>(std::llround(j));
    if (grid.empty() || g > grid.back()) grid.push_back(g);
  }
  if (grid.empty() || grid.back() != n) grid.push_back(n);
  const Word xs = x.prefix(n + phi.depth() - 1);
  std::vector<std::pair<Index, Rational>> out;
  Rational s = 0;
  std::size_t gi = 0;
  for (Index j = 1; j <= n && gi < grid.size(); ++j) {
    s += phi(xs.data() + (j - 1));
    if (j == grid[gi]) {
      out.emplace_back(j, Rational(s / Rational(j)));
      ++gi;
    }
  }
  return out;
}

}  // namespace scramble
