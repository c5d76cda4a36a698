#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scramble/errors.hpp"
#include "scramble/measures.hpp"
#include "scramble/point.hpp"
#include "scramble/rational.hpp"
#include "scramble/shiftspace.hpp"
#include "scramble/specification.hpp"
#include "scramble/word.hpp"

namespace scramble {

// ---------------------------------------------------------------- distal pairs

// Largest gap of {i < horizon : d(f^i p, f^i q) > eps}, counting the lead-in
// from -1 and the run-out to the horizon. nullopt means the set is empty.
inline std::optional<Index> syndetic_gap(const LazyPoint& p, const LazyPoint& q, double eps, Index horizon,
                                         int depth = kDefaultMetricDepth) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  if (p.q() != q.q()) fail(ErrorCode::AlphabetMismatch, "points use different alphabets");
  CylinderIndex ci(p.q(), depth);
  WindowStream sp(p, ci.max_length());
  WindowStream sq(q, ci.max_length());
  Index last = -1;
  Index gap = 0;
  bool any = false;
  for (Index i = 0; i < horizon; ++i) {
    if (ci.distance(sp.at(i), sq.at(i)) > eps) {
      gap = std::max(gap, i - last);
      last = i;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  return std::max(gap, horizon - last);
}

struct DistalPair {
  LazyPoint p;
  LazyPoint q;
  double zeta = 0.0;
  Word word;      // p = word^infinity
  Index shift = 0;  // q = f^shift p
};

inline DistalPair distal_pair_from_periodic(const Word& w, Index M, int q = 2, int depth = kDefaultMetricDepth) {
  bool two_symbols = false;
  for (Symbol s : w) two_symbols = two_symbols || s != w.front();
  if (w.size() < 2 || !two_symbols) fail(ErrorCode::DegenerateSupport, "the orbit of the word is a single point");
  if (M < 1 || M >= static_cast<Index>(w.size())) fail(ErrorCode::InvalidArgument, "need 1 <= M < |w|");
  DistalPair dp;
  dp.word = w;
  dp.shift = M;
  dp.p = LazyPoint::periodic(w, q);
  dp.q = dp.p.shifted(M);
  CylinderIndex ci(q, depth);
  const Index n = static_cast<Index>(w.size());
  const Word a = dp.p.prefix(n + ci.max_length());
  const Word b = dp.q.prefix(n + ci.max_length());
  double z = 1e300;
  for (Index i = 0; i < n; ++i) z = std::min(z, ci.distance(a.data() + i, b.data() + i));
  if (z <= 0.0) fail(ErrorCode::DegenerateSupport, "the shift fixes the periodic point");
  dp.zeta = z;
  return dp;
}

// ---------------------------------------------------------------- chain geometry

// theta * v_segment + (1 - theta) * v_{segment+1}
struct ChainPosition {
  std::size_t segment = 0;
  Rational theta = 1;
};

// Arc coordinate along the chain: segment + (1 - theta).
inline Rational arc_of(const ChainPosition& p) { return Rational(static_cast<long>(p.segment)) + (1 - p.theta); }

inline ChainPosition position_at_arc(const MeasureChain& K, const Rational& arc) {
  ChainPosition p;
  const auto segs = static_cast<long>(K.segment_count());
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), arc.get_num_mpz_t(), arc.get_den_mpz_t());
  long s = fl.get_si();
  if (s >= segs) s = segs - 1;
  if (s < 0) s = 0;
  p.segment = static_cast<std::size_t>(s);
  p.theta = 1 - (arc - Rational(s));
  return p;
}

inline CylinderMeasure chain_measure(const MeasureChain& K, const ChainPosition& p) {
  return K.point(p.segment, p.theta);
}

inline ChainPosition locate_on_chain(const MeasureChain& K, const CylinderMeasure& nu, int depth = kDefaultMetricDepth) {
  const ChainDistance d = dist_to_chain(nu, K, depth);
  if (d.exact != 0) fail(ErrorCode::OffChainMeasure, "measure lies at distance " + std::to_string(d.value) + " from K");
  return {d.segment, d.theta};
}

// Rational points of the chain by increasing denominator, segments interleaved,
// duplicates (shared vertices) removed.
inline std::vector<ChainPosition> dense_chain_sequence(const MeasureChain& K, std::size_t count) {
  std::vector<ChainPosition> out;
  std::vector<Rational> seen;
  const std::size_t segs = K.segment_count();
  const bool single = K.vertices.size() == 1;
  for (long den = 1; out.size() < count; ++den) {
    std::vector<long> nums;
    if (den == 1) nums = {0, 1};
    else
      for (long p = 1; p < den; ++p)
        if (std::gcd(p, den) == 1) nums.push_back(p);
    for (long p : nums) {
      for (std::size_t s = 0; s < segs && out.size() < count; ++s) {
        ChainPosition cp{s, ratio(p, den)};
        if (single) cp.theta = 1;
        const Rational a = arc_of(cp);
        if (std::find(seen.begin(), seen.end(), a) != seen.end()) continue;
        seen.push_back(a);
        out.push_back(cp);
      }
    }
    if (single && !out.empty()) {
      while (out.size() < count) out.push_back(out.front());
    }
  }
  return out;
}

struct GenericWord {
  Word word;
  Rational dist;  // d(periodic measure of word, target)
};

// A periodic word whose orbit measure approximates the chain point within
// `target`, built by time-sharing the vertex generators.
inline GenericWord generic_word(const ShiftModel& model, const MeasureChain& K, const ChainPosition& pos,
                                const Rational& target, int depth = kDefaultMetricDepth, Index max_len = 1 << 16) {
  const CylinderMeasure beta = chain_measure(K, pos);
  const int m = beta.max_length();
  auto gen = [&](std::size_t v) -> const Word& {
    if (v >= K.generators.size() || !K.generators[v])
      fail(ErrorCode::InvalidArgument, "chain vertex " + std::to_string(v) + " has no periodic generator");
    return *K.generators[v];
  };
  const bool single = K.vertices.size() == 1;
  auto finish = [&](Word w) {
    GenericWord g;
    g.dist = weakstar_distance_exact(periodic_measure(w, m, &model), beta, depth);
    g.word = std::move(w);
    if (g.dist > target) fail(ErrorCode::EpsilonTooSmall, "vertex generator is not close enough to the vertex");
    return g;
  };
  if (single || pos.theta == 1) return finish(gen(pos.segment));
  if (pos.theta == 0) return finish(gen(pos.segment + 1));
  const Word& a = gen(pos.segment);
  const Word& b = gen(pos.segment + 1);
  const long p = pos.theta.get_num().get_si();
  const long q = pos.theta.get_den().get_si();
  long na = p * static_cast<long>(b.size());
  long nb = (q - p) * static_cast<long>(a.size());
  const long g = std::gcd(na, nb);
  na /= g;
  nb /= g;
  const Word cab = connect(model, a.back(), b.front(), shortest_connector(model, a.back(), b.front()));
  const Word cba = connect(model, b.back(), a.front(), shortest_connector(model, b.back(), a.front()));
  for (long scale = 1;; scale *= 2) {
    Word w = repeat_word(a, static_cast<std::size_t>(na * scale));
    w = concat(std::move(w), cab);
    w = concat(std::move(w), repeat_word(b, static_cast<std::size_t>(nb * scale)));
    w = concat(std::move(w), cba);
    if (static_cast<Index>(w.size()) > max_len)
      fail(ErrorCode::EpsilonTooSmall, "time-sharing word exceeds " + std::to_string(max_len) + " symbols");
    Rational d = weakstar_distance_exact(periodic_measure(w, m, &model), beta, depth);
    if (d <= target) return {std::move(w), d};
  }
}

// ---------------------------------------------------------------- path orbits

struct PathThreshold {
  Index n = 0;  // N^mu_eps
  Word word;    // generic word for mu
  Rational word_dist;
};

// Beyond n, the empirical measures of word^infinity stay within eps/6 of mu,
// since d(E_n(w^inf), pi_w) <= |w| / n.
inline PathThreshold path_threshold(const ShiftModel& model, const MeasureChain& K, const CylinderMeasure& mu,
                                     double eps, int depth = kDefaultMetricDepth) {
  if (!(eps > truncation_bound(depth))) fail(ErrorCode::EpsilonTooSmall, "eps must exceed the truncation bound");
  const ChainPosition pos = locate_on_chain(K, mu, depth);
  const Rational e(eps);
  PathThreshold t;
  GenericWord g = generic_word(model, K, pos, e / 12, depth);
  t.word = g.word;
  t.word_dist = g.dist;
  const Rational slack = e / 6 - g.dist;
  const Rational ratio = Rational(static_cast<long>(g.word.size())) / slack;
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
  t.n = c.get_si();
  return t;
}

struct PathNode {
  ChainPosition position;
  Word word;
  double word_dist = 0.0;
  Index start = 0;  // window [start, end]
  Index end = 0;
};

struct PathAudit {
  double max_a = 0.0;  // d(E_n, mu), n in [N^mu, N]
  double max_b = 0.0;  // d(E_n, K), n in [N, N*]
  double dist_c = 0.0; // d(E_{N*}, alpha)
  double max_d = 0.0;  // d(E_n, K), n in [t1, t2]
  double dist_e = 0.0; // d(E_{t2}, mu)
  bool passed = false;
};

struct PathMarkers {
  double eps = 0.0;
  Index n_eps_mu = 0;
  Index N = 0;
  Index M = 0;
  Index n_star = 0;  // t1 for the roundtrip variant
  std::optional<Index> t2;
  std::vector<PathNode> nodes;
  PathAudit audit;
};

struct PathOrbit {
  LazyPoint point;
  PathMarkers markers;
};

struct PathOptions {
  int depth = kDefaultMetricDepth;
  Index min_alpha_len = 0;  // minimum length of the window at the alpha node
  Index min_end = 0;        // the last window ends no earlier than this
  double node_target = 0.75;  // node windows end once E_n is within node_target * eps of the node
  Index max_length = 1 << 22;
};

namespace detail {

inline std::vector<double> dense_weights(const CylinderMeasure& mu, int depth) { return visible_weights(mu, depth); }

inline Rational exact_counts_distance(const std::vector<std::int64_t>& counts, Index n, const CylinderMeasure& target,
                                      int depth) {
  Rational d = 0;
  for (int k = 1; k <= depth; ++k)
    d += pow2_neg(k) * abs_value(Rational(counts[static_cast<std::size_t>(k)], n) - target.by_index(k));
  return d;
}

inline CylinderMeasure measure_from_counts(const std::vector<std::int64_t>& counts, Index n, int q, int m, int depth) {
  CylinderMeasure mu(q, m);
  for (int k = 1; k <= depth; ++k) {
    mu.by_index(k) = Rational(counts[static_cast<std::size_t>(k)], n);
    mu.by_index(k).canonicalize();
  }
  return mu;
}

}  // namespace detail

// Glued point whose empirical measures start near mu, walk along K through the
// chain vertices between mu and alpha, and (roundtrip) come back to mu.
inline PathOrbit lemma_path_orbit(const ShiftModel& model, const MeasureChain& K, const CylinderMeasure& mu,
                                  const CylinderMeasure& alpha, double eps, Index N, Index M, bool roundtrip,
                                  const PathOptions& opt = {}) {
  const int depth = opt.depth;
  if (!(eps > truncation_bound(depth))) fail(ErrorCode::EpsilonTooSmall, "eps must exceed the truncation bound");
  const PathThreshold thr = path_threshold(model, K, mu, eps, depth);
  if (N <= thr.n) fail(ErrorCode::InvalidArgument, "N must exceed N_eps^mu = " + std::to_string(thr.n));
  if (M < N) fail(ErrorCode::InvalidArgument, "M must be at least N");
  const ChainPosition pmu = locate_on_chain(K, mu, depth);
  const ChainPosition palpha = locate_on_chain(K, alpha, depth);
  const Index gap = mixing_gap(model);
  const Rational e(eps);

  std::vector<Rational> arcs{arc_of(pmu)};
  auto walk_to = [&](const Rational& from, const Rational& to) {
    if (from < to) {
      mpz_class v;
      mpz_fdiv_q(v.get_mpz_t(), from.get_num_mpz_t(), from.get_den_mpz_t());
      for (Rational r(v + 1); r < to; r += 1) arcs.push_back(r);
    } else if (to < from) {
      mpz_class v;
      mpz_cdiv_q(v.get_mpz_t(), from.get_num_mpz_t(), from.get_den_mpz_t());
      for (Rational r(v - 1); r > to; r -= 1) arcs.push_back(r);
    }
    if (to != from) arcs.push_back(to);
  };
  const Rational a_mu = arc_of(pmu);
  const Rational a_alpha = arc_of(palpha);
  walk_to(a_mu, a_alpha);
  const std::size_t alpha_node = arcs.size() - 1;
  if (roundtrip) walk_to(a_alpha, a_mu);

  PathOrbit out;
  auto& mk = out.markers;
  mk.eps = eps;
  mk.n_eps_mu = thr.n;
  mk.N = N;
  mk.M = M;

  CylinderIndex ci(model.q(), depth);
  const int look = ci.max_length();
  Word xs;
  EmpiricalCounter counter(model.q(), depth);
  auto push_ready = [&](Index upto) {
    while (counter.n() + look <= static_cast<Index>(xs.size()) && counter.n() < upto)
      counter.push(xs.data() + counter.n());
  };

  // First window traces the generic point of mu on [0, E].
  PathNode first;
  first.position = pmu;
  first.word = thr.word;
  first.word_dist = to_double(thr.word_dist);
  first.start = 0;
  Index first_end = N;
  if (arcs.size() == 1) first_end = std::max({N, M + 1 + (roundtrip ? 1 : 0), opt.min_end});
  first.end = first_end;
  for (Index i = 0; i <= first_end; ++i) xs.push_back(thr.word[static_cast<std::size_t>(i % static_cast<Index>(thr.word.size()))]);
  mk.nodes.push_back(first);

  for (std::size_t j = 1; j < arcs.size(); ++j) {
    PathNode node;
    node.position = position_at_arc(K, arcs[j]);
    GenericWord g = generic_word(model, K, node.position, e / 12, depth);
    node.word = g.word;
    node.word_dist = to_double(g.dist);
    const auto target = detail::dense_weights(chain_measure(K, node.position), depth);
    const Word conn = connect(model, xs.back(), node.word.front(), gap - 1);
    xs.insert(xs.end(), conn.begin(), conn.end());
    node.start = static_cast<Index>(xs.size());
    Index min_end = node.start;
    if (j == alpha_node) min_end = std::max({min_end, node.start + opt.min_alpha_len - 1, M + 1});
    if (j + 1 == arcs.size()) min_end = std::max(min_end, opt.min_end);
    const auto wl = static_cast<Index>(node.word.size());
    Index phase = 0;
    while (true) {
      xs.push_back(node.word[static_cast<std::size_t>(phase)]);
      if (++phase == wl) phase = 0;
      if (static_cast<Index>(xs.size()) > opt.max_length)
        fail(ErrorCode::EpsilonTooSmall, "path orbit exceeds " + std::to_string(opt.max_length) + " coordinates");
      push_ready(kUnbounded);
      // Candidate end b = n; the lookahead past b peeks at the node's own word.
      const Index b = counter.n();
      if (b >= min_end && b >= node.start && counter.distance_to(target) <= opt.node_target * eps) {
        node.end = b;
        xs.resize(static_cast<std::size_t>(b + 1));
        break;
      }
    }
    mk.nodes.push_back(node);
  }

  OrbitPlan plan;
  plan.model = model;
  for (const auto& nd : mk.nodes) plan.segments.push_back({LazyPoint::periodic(nd.word, model.q()), nd.start, nd.end});
  out.point = glue(plan);

  if (arcs.size() == 1) {
    mk.n_star = roundtrip ? first_end - 1 : first_end;
    if (roundtrip) mk.t2 = first_end;
  } else {
    mk.n_star = mk.nodes[alpha_node].end;
    if (roundtrip) mk.t2 = mk.nodes.back().end;
  }

  // Independent streaming re-audit of every clause.
  const Index stop = mk.t2 ? *mk.t2 : mk.n_star;
  const auto mu_w = detail::dense_weights(mu, depth);
  FastChain fk(K, depth);
  EmpiricalCounter audit(model.q(), depth);
  WindowStream ws(out.point, look);
  PathAudit& au = mk.audit;
  for (Index n = 1; n <= stop; ++n) {
    audit.push(ws.at(n - 1));
    if (n >= thr.n && n <= N) au.max_a = std::max(au.max_a, audit.distance_to(mu_w));
    if (n >= N && n <= mk.n_star) au.max_b = std::max(au.max_b, fk.distance(audit.weights()));
    if (n == mk.n_star)
      au.dist_c = to_double(detail::exact_counts_distance(audit.counts(), n, alpha, depth));
    if (mk.t2 && n >= mk.n_star && n <= *mk.t2) au.max_d = std::max(au.max_d, fk.distance(audit.weights()));
    if (mk.t2 && n == *mk.t2) au.dist_e = to_double(detail::exact_counts_distance(audit.counts(), n, mu, depth));
  }
  au.passed = au.max_a < eps && au.max_b < eps && au.dist_c < eps && (!mk.t2 || (au.max_d < eps && au.dist_e < eps));
  if (!au.passed) fail(ErrorCode::EpsilonTooSmall, "path orbit failed its re-audit");
  return out;
}

// ---------------------------------------------------------------- separated pairs

struct MuPairOptions {
  int depth = kDefaultMetricDepth;
  Index min_block = 0;
  long max_theta_denominator = 64;
};

struct MuPair {
  LazyPoint x1;
  LazyPoint x2;
  Index N = 0;
  Index M = 0;   // block length is M + 1 coordinates
  Index M1 = 0;
  Index r = 0;
  Index s = 0;
  Index t = 0;
  Index gap = 0;
  double zeta = 0.0;
  double eps = 0.0;
  Rational delta;
  CylinderMeasure target{2, 1};
};

namespace detail {

inline Index ceil_div_rational(const Rational& r) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return c.get_si();
}

inline Index floor_rational(const Rational& r) {
  mpz_class c;
  mpz_fdiv_q(c.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return c.get_si();
}

}  // namespace detail

// Two periodic points made of s blocks tracing the mu_1 pair and t blocks
// tracing the mu_2 pair, each block M + 1 long and followed by a connector.
inline MuPair lemma_mu_pair(const ShiftModel& model, const CylinderMeasure& mu1, const CylinderMeasure& mu2,
                            const Rational& theta, double eps, const Rational& delta,
                            const std::optional<DistalPair>& pair1, const std::optional<DistalPair>& pair2,
                            const MuPairOptions& opt = {}) {
  if (theta < 0 || theta > 1) fail(ErrorCode::ThetaOutOfRange, "theta = " + to_string(theta));
  if (delta <= 0) fail(ErrorCode::InvalidArgument, "delta must be positive");
  if (!(eps > 0)) fail(ErrorCode::EpsilonTooSmall, "eps must be positive");
  const Index s = theta.get_num().get_si();
  const Index t = theta.get_den().get_si() - s;
  if (theta.get_den() > opt.max_theta_denominator)
    fail(ErrorCode::ThetaDenominatorTooLarge, "denominator of theta exceeds " + std::to_string(opt.max_theta_denominator));
  if ((s > 0 && !pair1) || (t > 0 && !pair2)) fail(ErrorCode::MissingDistalPairs, "a distal pair is required for each component");
  double zeta = 1e300;
  if (s > 0) zeta = std::min(zeta, pair1->zeta);
  if (t > 0) zeta = std::min(zeta, pair2->zeta);
  if (eps >= zeta) fail(ErrorCode::EpsilonExceedsZeta, "eps " + std::to_string(eps) + " >= zeta " + std::to_string(zeta));
  for (const auto* dp : {s > 0 ? &*pair1 : nullptr, t > 0 ? &*pair2 : nullptr})
    if (dp && dp->word.empty()) fail(ErrorCode::InvalidArgument, "distal pairs must come from periodic words");

  MuPair mp;
  mp.gap = mixing_gap(model);
  mp.s = s;
  mp.t = t;
  mp.zeta = zeta;
  mp.eps = eps;
  mp.delta = delta;
  mp.target = convex_combine(mu1, mu2, theta);
  const Rational e(eps);
  // M1: both empirical sequences of each pair stay within eps/2 of mu_i from M1 on.
  Index M1 = 1;
  auto need = [&](const DistalPair& dp, const CylinderMeasure& target) {
    const Rational d = weakstar_distance_exact(periodic_measure(dp.word, target.max_length(), &model), target, opt.depth);
    if (d >= e / 2) fail(ErrorCode::EpsilonTooSmall, "distal pair orbit is not within eps/2 of its measure");
    M1 = std::max(M1, detail::ceil_div_rational(Rational(static_cast<long>(dp.word.size())) / (e / 2 - d)));
  };
  if (s > 0) need(*pair1, mu1);
  if (t > 0) need(*pair2, mu2);
  mp.M1 = M1;
  mp.M = std::max(M1, detail::floor_rational(Rational(4 * mp.gap) / delta)) + 1;
  mp.M = std::max(mp.M, opt.min_block);
  mp.r = detail::floor_rational(Rational(4) / delta) + 1;
  mp.N = mp.r * (s + t) * (mp.M + mp.gap);

  auto period = [&](bool second) {
    std::vector<Word> blocks;
    for (Index i = 0; i < s + t; ++i) {
      const DistalPair& dp = i < s ? *pair1 : *pair2;
      const LazyPoint src = second ? dp.q : dp.p;
      blocks.push_back(src.prefix(mp.M + 1));
    }
    Word w;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      w = concat(std::move(w), blocks[i]);
      const Word& next = blocks[(i + 1) % blocks.size()];
      w = concat(std::move(w), connect(model, blocks[i].back(), next.front(), mp.gap - 1));
    }
    return w;
  };
  mp.x1 = LazyPoint::periodic(period(false), model.q());
  mp.x2 = LazyPoint::periodic(period(true), model.q());
  return mp;
}

struct MuPairAudit {
  Index from = 0;
  Index horizon = 0;
  double max_close_fraction = 0.0;  // fraction of i < n with d(f^i x1, f^i x2) < zeta - eps
  double max_target_distance = 0.0; // max over both points of d(E_n, target)
  Index worst_close_n = 0;
  Index worst_target_n = 0;
};

// Streams n = 1..horizon and records the worst values over n in (N, horizon].
inline MuPairAudit audit_mu_pair(const MuPair& mp, Index horizon, int depth = kDefaultMetricDepth) {
  CylinderIndex ci(mp.x1.q(), depth);
  const int look = ci.max_length();
  WindowStream a(mp.x1, look);
  WindowStream b(mp.x2, look);
  EmpiricalCounter ca(mp.x1.q(), depth);
  EmpiricalCounter cb(mp.x2.q(), depth);
  const auto target = visible_weights(mp.target, depth);
  const double close_cut = mp.zeta - mp.eps;
  MuPairAudit au;
  au.from = mp.N;
  au.horizon = horizon;
  Index close = 0;
  for (Index n = 1; n <= horizon; ++n) {
    const Symbol* wa = a.at(n - 1);
    const Symbol* wb = b.at(n - 1);
    if (ci.distance(wa, wb) < close_cut) ++close;
    ca.push(wa);
    cb.push(wb);
    if (n <= mp.N) continue;
    const double f = static_cast<double>(close) / static_cast<double>(n);
    if (f > au.max_close_fraction) {
      au.max_close_fraction = f;
      au.worst_close_n = n;
    }
    const double d = std::max(ca.distance_to(target), cb.distance_to(target));
    if (d > au.max_target_distance) {
      au.max_target_distance = d;
      au.worst_target_n = n;
    }
  }
  return au;
}

// ---------------------------------------------------------------- transitive seed

struct TransitiveSeed {
  LazyPoint z;
  Index enumerated_length = 0;
  int max_word_length = 0;
};

// anchor . c . w_1 . c . w_2 ... over all admissible words by (length, lex),
// joined by connectors of length K - 1, until at least min_length symbols.
inline TransitiveSeed transitive_seed(const ShiftModel& model, const Word& anchor, Index min_length = 1 << 15) {
  const Index gap = mixing_gap(model);
  if (!anchor.empty() && !word_admissible(model, anchor)) fail(ErrorCode::InvalidArgument, "anchor word is not admissible");
  Word z = anchor;
  int len = 0;
  while (static_cast<Index>(z.size()) < min_length) {
    ++len;
    for (const auto& w : enumerate_words(model, len)) {
      if (!z.empty()) z = concat(std::move(z), connect(model, z.back(), w.front(), gap - 1));
      z = concat(std::move(z), w);
    }
  }
  TransitiveSeed seed;
  seed.enumerated_length = static_cast<Index>(z.size());
  seed.max_word_length = len;
  auto [pre, cyc] = smallest_continuation(model, z.back());
  seed.z = LazyPoint::prefix_periodic(concat(std::move(z), pre), cyc, model.q());
  return seed;
}

// Largest r such that every point outside [u] is at distance >= r from every
// point inside it.
inline double cylinder_radius(const Word& u, int q, int depth = kDefaultMetricDepth) {
  CylinderIndex ci(q, depth);
  double r = 1e300;
  for (std::size_t j = 0; j < u.size(); ++j) {
    Word pre(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    for (int a = 0; a < q; ++a) {
      if (a == u[j]) continue;
      Word alt = pre;
      alt.back() = static_cast<Symbol>(a);
      double term = 0.0;
      if (static_cast<int>(pre.size()) <= ci.max_length()) {
        const auto i1 = ci.index_of(pre);
        const auto i2 = ci.index_of(alt);
        if (i1 <= depth) term += std::ldexp(1.0, -static_cast<int>(i1));
        if (i2 <= depth) term += std::ldexp(1.0, -static_cast<int>(i2));
      }
      r = std::min(r, term);
    }
  }
  return u.empty() ? 1.0 : r;
}

// ---------------------------------------------------------------- DC1 reports

struct DC1Row {
  double t = 0.0;
  double max_density = 0.0;
  double min_density = 1.0;
  Index argmax = 0;
  Index argmin = 0;
};

struct DC1Report {
  std::vector<DC1Row> rows;
  std::vector<double> t_grid;
  std::vector<double> t0_candidates;
  std::optional<double> t0;
  double tol_high = 0.1;
  double tol_low = 0.1;
  bool upper_ok = false;
  bool lower_ok = false;
  bool verdict = false;
  std::vector<Index> checkpoints;
  std::vector<std::vector<double>> trace;  // trace[c][k]: density at checkpoint c for rows[k].t
  int depth = kDefaultMetricDepth;
};

inline std::vector<Index> log_grid(Index horizon, int per_octave = 8) {
  std::vector<Index> g;
  for (double v = 1; v <= static_cast<double>(horizon); v *= std::pow(2.0, 1.0 / per_octave)) {
    const auto n = static_cast<Index>(std::llround(v));
    if (g.empty() || n > g.back()) g.push_back(n);
  }
  if (g.empty() || g.back() != horizon) g.push_back(horizon);
  return g;
}

// Proximal densities (1/n)|{i < n : d(f^i x, f^i y) < t}| at the checkpoints.
// Upper clause: every t in grid and candidates reaches 1 - tol_high; lower
// clause: some candidate t0 drops to tol_low.
inline DC1Report dc1_report(const LazyPoint& x, const LazyPoint& y, std::vector<Index> checkpoints,
                            const std::vector<double>& t_grid, const std::vector<double>& t0_candidates = {},
                            int depth = kDefaultMetricDepth, double tol_high = 0.1, double tol_low = 0.1) {
  if (x.q() != y.q()) fail(ErrorCode::AlphabetMismatch, "points use different alphabets");
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  checkpoints.erase(std::remove_if(checkpoints.begin(), checkpoints.end(), [](Index n) { return n < 1; }),
                    checkpoints.end());
  if (checkpoints.empty()) fail(ErrorCode::InvalidArgument, "no checkpoints");
  DC1Report rep;
  rep.t_grid = t_grid;
  rep.t0_candidates = t0_candidates.empty() ? t_grid : t0_candidates;
  rep.tol_high = tol_high;
  rep.tol_low = tol_low;
  rep.depth = depth;
  std::vector<double> ts = t_grid;
  for (double t : rep.t0_candidates)
    if (std::find(ts.begin(), ts.end(), t) == ts.end()) ts.push_back(t);
  for (double t : ts) rep.rows.push_back({t, 0.0, 1.0, 0, 0});
  CylinderIndex ci(x.q(), depth);
  WindowStream sx(x, ci.max_length());
  WindowStream sy(y, ci.max_length());
  std::vector<Index> close(ts.size(), 0);
  std::size_t ck = 0;
  for (Index i = 0; ck < checkpoints.size(); ++i) {
    const double d = ci.distance(sx.at(i), sy.at(i));
    for (std::size_t k = 0; k < ts.size(); ++k)
      if (d < ts[k]) ++close[k];
    const Index n = i + 1;
    if (n == checkpoints[ck]) {
      auto& tr = rep.trace.emplace_back();
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const double dens = static_cast<double>(close[k]) / static_cast<double>(n);
        tr.push_back(dens);
        auto& row = rep.rows[k];
        if (row.argmax == 0 || dens > row.max_density) {
          row.max_density = dens;
          row.argmax = n;
        }
        if (row.argmin == 0 || dens < row.min_density) {
          row.min_density = dens;
          row.argmin = n;
        }
      }
      ++ck;
    }
  }
  rep.checkpoints = std::move(checkpoints);
  rep.upper_ok = std::all_of(rep.rows.begin(), rep.rows.end(),
                             [&](const DC1Row& r) { return r.max_density >= 1.0 - tol_high; });
  for (double t0 : rep.t0_candidates) {
    auto it = std::find_if(rep.rows.begin(), rep.rows.end(), [&](const DC1Row& r) { return r.t == t0; });
    if (it != rep.rows.end() && it->min_density <= tol_low) {
      rep.t0 = t0;
      rep.lower_ok = true;
      break;
    }
  }
  rep.verdict = rep.upper_ok && rep.lower_ok;
  return rep;
}

// ---------------------------------------------------------------- the family

struct FamilyConfig {
  int depth = 3;                   // k_max
  Index horizon_cap = 1'000'000;
  double eps = 0.0;                // 0 selects 15/16 of the base cylinder radius
  Rational delta1 = Rational(1, 2);
  double witness_ratio = 0.092;    // rho
  int proximal_stage = 2;          // stage whose first path dominates the past (0: none)
  double proximal_ratio = 9.0;
  Index seed_window = 512;         // z window at the final stage
  Index final_node_len = 1024;     // minimum alpha window of the paths at the final stage
  Index witness_block_min = 64;
  Index witness_block_max = 1024;
  int metric_depth = kDefaultMetricDepth;
  bool allow_partial = true;
};

struct FamilyInputs {
  ShiftModel model = ShiftModel::full(2);
  MeasureChain K;
  CylinderMeasure mu{2, 1};
  CylinderMeasure mu1{2, 1};
  CylinderMeasure mu2{2, 1};
  Rational theta = 1;
  std::optional<DistalPair> pair1;
  std::optional<DistalPair> pair2;
  Word base_cylinder{0};
  std::optional<LazyPoint> seed;  // built from the base cylinder when absent
};

struct StageRecord {
  int k = 0;
  double eps = 0.0;
  Rational delta;
  Index gap = 0;
  Index base = 0;       // b = 2k(k-1)
  Index prev_end = 0;   // T_b, 0 at the first stage
  Index z_start = 0;
  Index z_len = 0;
  Index m_mu = 0;       // N^mu at eps_k
  Index m_mu_next = 0;  // N^mu at eps_{k+1}
  Index path_n = 0;     // N = M handed to the path lemma
  Index sep_N = 0;
  Index sep_M = 0;
  Index witness_N = 0;
  Index witness_M = 0;
  std::vector<Index> path_start, alpha_mark, path_end, sep_start, sep_end;
  std::vector<PathMarkers> paths;
};

struct Checkpoint {
  Index n = 0;
  int stage = 0;
  int i = 0;  // 0 for the z marker
  std::string label;
};

struct ScheduleMarkers {
  std::vector<StageRecord> stages;
  Rational rho;
  int proximal_stage = 0;
  Rational proximal_ratio;

  // T_j, 1-based over the whole schedule.
  Index T(Index j) const {
    for (const auto& st : stages) {
      const Index local = j - st.base;
      if (local < 1 || local > 4 * st.k) continue;
      const auto i = static_cast<std::size_t>((local - 1) / 4);
      switch ((local - 1) % 4) {
        case 0: return st.path_start[i];
        case 1: return st.path_end[i];
        case 2: return st.sep_start[i];
        default: return st.sep_end[i];
      }
    }
    fail(ErrorCode::InvalidArgument, "marker T_" + std::to_string(j) + " is not scheduled");
  }
  Index count() const { return stages.empty() ? 0 : stages.back().base + 4 * stages.back().k; }
  Index horizon() const { return stages.empty() ? 0 : stages.back().sep_end.back(); }

  std::vector<Checkpoint> checkpoints() const {
    std::vector<Checkpoint> out;
    for (const auto& st : stages) {
      for (int i = 1; i <= st.k; ++i) {
        const auto u = static_cast<std::size_t>(i - 1);
        const Index j = st.base + 4 * i;
        out.push_back({st.path_start[u], st.k, i, "T" + std::to_string(j - 3)});
        out.push_back({st.alpha_mark[u], st.k, i, "T" + std::to_string(j - 3) + "->" + std::to_string(j - 2)});
        out.push_back({st.path_end[u], st.k, i, "T" + std::to_string(j - 2)});
        out.push_back({st.sep_start[u], st.k, i, "T" + std::to_string(j - 1)});
        out.push_back({st.sep_end[u], st.k, i, "T" + std::to_string(j)});
      }
    }
    return out;
  }
};

struct InequalityCheck {
  std::string name;
  std::string lhs;
  std::string rhs;
  bool ok = false;
};

struct ScrambleFamily {
  ShiftModel model = ShiftModel::full(2);
  MeasureChain K;
  CylinderMeasure mu{2, 1};
  std::vector<ChainPosition> alpha_positions;
  std::vector<CylinderMeasure> alphas;
  std::vector<std::pair<std::string, LazyPoint>> points;  // keyed by xi over {1,2}
  ScheduleMarkers markers;
  Word base_cylinder;
  LazyPoint seed;
  double eps = 0.0;
  Rational delta1;
  int requested_depth = 0;
  int depth = 0;
  bool truncated = false;
  int metric_depth = kDefaultMetricDepth;
  std::vector<MuPair> sep_pairs;      // per stage
  std::vector<MuPair> witness_pairs;  // per stage

  Index horizon() const { return markers.horizon(); }
};

inline std::vector<InequalityCheck> replay_schedule(const ScrambleFamily& fam);

namespace detail {

inline std::string index_str(Index v) { return std::to_string(v); }

inline std::vector<std::string> xi_words(int k) {
  std::vector<std::string> out{""};
  for (int j = 0; j < k; ++j) {
    std::vector<std::string> next;
    for (const auto& s : out)
      for (char c : {'1', '2'}) next.push_back(s + c);
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

inline ScrambleFamily build_scramble_family(const FamilyInputs& in, const FamilyConfig& cfg = {}) {
  if (!in.pair1 || !in.pair2) fail(ErrorCode::MissingDistalPairs, "both distal pairs must be supplied");
  if (cfg.depth < 1) fail(ErrorCode::InvalidArgument, "family depth must be positive");
  if (in.base_cylinder.empty()) fail(ErrorCode::InvalidArgument, "base cylinder must be nonempty");
  if (!word_admissible(in.model, in.base_cylinder)) fail(ErrorCode::InvalidArgument, "base cylinder is not admissible");
  const int depth = cfg.metric_depth;
  if (convex_combine(in.mu1, in.mu2, in.theta) != in.mu)
    fail(ErrorCode::InvalidArgument, "mu is not theta mu1 + (1 - theta) mu2");
  locate_on_chain(in.K, in.mu, depth);

  ScrambleFamily fam;
  fam.model = in.model;
  fam.K = in.K;
  fam.mu = in.mu;
  fam.base_cylinder = in.base_cylinder;
  fam.seed = in.seed ? *in.seed : transitive_seed(in.model, in.base_cylinder).z;
  if (fam.seed.prefix(static_cast<Index>(in.base_cylinder.size())) != in.base_cylinder)
    fail(ErrorCode::InvalidArgument, "seed does not start in the base cylinder");
  fam.eps = cfg.eps > 0 ? cfg.eps : cylinder_radius(in.base_cylinder, in.model.q(), depth) * 15.0 / 16.0;
  fam.delta1 = cfg.delta1;
  fam.requested_depth = cfg.depth;
  fam.metric_depth = depth;
  fam.alpha_positions = dense_chain_sequence(in.K, static_cast<std::size_t>(cfg.depth));
  for (const auto& p : fam.alpha_positions) fam.alphas.push_back(chain_measure(in.K, p));
  fam.markers.rho = Rational(cfg.witness_ratio);
  fam.markers.proximal_stage = cfg.proximal_stage;
  fam.markers.proximal_ratio = Rational(cfg.proximal_ratio);

  const Index gap = mixing_gap(in.model);
  const Index ulen = static_cast<Index>(in.base_cylinder.size());
  const Rational rho(cfg.witness_ratio);
  std::map<std::string, LazyPoint> prev_points;

  for (int k = 1; k <= cfg.depth; ++k) {
    const bool last = k == cfg.depth;
    StageRecord st;
    st.k = k;
    st.eps = std::ldexp(fam.eps, -k);
    st.delta = cfg.delta1 / Rational(mpz_class(1) << static_cast<unsigned>(k - 1));
    st.gap = gap;
    st.base = 2 * k * (k - 1);
    st.prev_end = k == 1 ? 0 : fam.markers.stages.back().sep_end.back();

    MuPair sep = lemma_mu_pair(in.model, in.mu1, in.mu2, in.theta, st.eps, st.delta, in.pair1, in.pair2, {depth});
    st.sep_N = sep.N;
    st.sep_M = sep.M;
    st.m_mu = path_threshold(in.model, in.K, in.mu, st.eps, depth).n;
    st.m_mu_next = path_threshold(in.model, in.K, in.mu, st.eps / 2, depth).n;
    st.path_n = st.m_mu + 1;

    st.z_len = last ? std::max(cfg.seed_window, ulen) : ulen;
    st.z_start = k == 1 ? 0 : st.prev_end + gap;
    Index T = st.z_start + st.z_len - 1 + gap + (k == 1 ? gap : 0);

    std::vector<PathOrbit> paths;
    MuPair witness;
    for (int i = 1; i <= k; ++i) {
      if (i > 1) T = st.sep_end.back() + 2 * gap;
      PathOptions po;
      po.depth = depth;
      po.min_alpha_len = last ? cfg.final_node_len : 0;
      if (k == cfg.proximal_stage && i == 1) po.min_end = detail::ceil_div_rational(Rational(cfg.proximal_ratio) * Rational(T));
      paths.push_back(lemma_path_orbit(in.model, in.K, in.mu, fam.alphas[static_cast<std::size_t>(i - 1)], st.eps,
                                       st.path_n, st.path_n, true, po));
      const auto& pm = paths.back().markers;
      st.paths.push_back(pm);
      st.path_start.push_back(T);
      st.alpha_mark.push_back(T + pm.n_star);
      st.path_end.push_back(T + *pm.t2);
      const Index s0 = st.path_end.back() + 2 * gap;
      st.sep_start.push_back(s0);

      Index len = 0;
      Index dominance = 0;
      if (i < k) {
        len = sep.N + 1;
        dominance = st.m_mu;
      } else {
        // Witness segment: long enough that the past is at most a rho share.
        const Rational need = Rational(s0 + 2 * gap) / rho;
        const Index rho_len = detail::ceil_div_rational(need) - s0;
        const Index per = sep.r * (sep.s + sep.t);
        Index mw = rho_len / per - gap;
        mw = std::clamp(mw, std::max(cfg.witness_block_min, sep.M), std::max(cfg.witness_block_max, sep.M));
        MuPairOptions mo;
        mo.depth = depth;
        mo.min_block = mw;
        witness = lemma_mu_pair(in.model, in.mu1, in.mu2, in.theta, st.eps, st.delta, in.pair1, in.pair2, mo);
        st.witness_N = witness.N;
        st.witness_M = witness.M;
        len = std::max(rho_len, witness.N + 1);
        dominance = st.m_mu_next;
      }
      // delta_k * T_end > dominance
      const Index t_min = detail::floor_rational(Rational(dominance) / st.delta) + 1;
      st.sep_end.push_back(std::max(s0 + len, t_min));
    }

    if (st.sep_end.back() > cfg.horizon_cap) {
      if (k == 1 || !cfg.allow_partial)
        fail(ErrorCode::HorizonCapExceeded, "stage " + std::to_string(k) + " ends at " + std::to_string(st.sep_end.back()) +
                                                " beyond the cap; achieved depth " + std::to_string(k - 1));
      fam.truncated = true;
      break;
    }

    std::map<std::string, LazyPoint> cur;
    for (const auto& xi : detail::xi_words(k)) {
      OrbitPlan plan;
      plan.model = in.model;
      if (k > 1) plan.segments.push_back({prev_points.at(xi.substr(0, static_cast<std::size_t>(k - 1))), 0, st.prev_end});
      plan.segments.push_back({fam.seed.shifted(k - 1), st.z_start, st.z_start + st.z_len - 1});
      for (int i = 1; i <= k; ++i) {
        const auto u = static_cast<std::size_t>(i - 1);
        plan.segments.push_back({paths[u].point, st.path_start[u], st.path_end[u]});
        const MuPair& inst = i < k ? sep : witness;
        plan.segments.push_back({xi[u] == '1' ? inst.x1 : inst.x2, st.sep_start[u], st.sep_end[u]});
      }
      cur.emplace(xi, glue(plan));
    }
    prev_points = std::move(cur);
    fam.sep_pairs.push_back(sep);
    fam.witness_pairs.push_back(witness);
    fam.markers.stages.push_back(std::move(st));
    fam.depth = k;
  }
  for (auto& [xi, p] : prev_points) fam.points.emplace_back(xi, p);
  for (const auto& chk : replay_schedule(fam))
    if (!chk.ok) fail(ErrorCode::InvalidArgument, "schedule inequality failed: " + chk.name);
  return fam;
}

// Re-derives every schedule relation from the raw marker values.
inline std::vector<InequalityCheck> replay_schedule(const ScrambleFamily& fam) {
  std::vector<InequalityCheck> out;
  auto add = [&](std::string name, const auto& lhs, const auto& rhs, bool ok) {
    std::ostringstream a, b;
    a << lhs;
    b << rhs;
    out.push_back({std::move(name), a.str(), b.str(), ok});
  };
  const auto& ms = fam.markers;
  Index prev = -1;
  for (Index j = 1; j <= ms.count(); ++j) {
    const Index t = ms.T(j);
    add("T" + std::to_string(j) + " > T" + std::to_string(j - 1), t, prev, t > prev);
    prev = t;
  }
  for (const auto& st : ms.stages) {
    const std::string tag = "stage " + std::to_string(st.k) + ": ";
    const Index K = st.gap;
    if (st.k == 1) {
      add(tag + "z window starts at 0", st.z_start, 0, st.z_start == 0);
      add(tag + "T1 = |z window| - 1 + 2K", st.path_start[0], st.z_len - 1 + 2 * K,
          st.path_start[0] == st.z_len - 1 + 2 * K);
    } else {
      add(tag + "z window starts at T_b + K", st.z_start, st.prev_end + K, st.z_start == st.prev_end + K);
      add(tag + "T_{b+1} = z end + K", st.path_start[0], st.z_start + st.z_len - 1 + K,
          st.path_start[0] == st.z_start + st.z_len - 1 + K);
    }
    add(tag + "path N exceeds N^mu_eps", st.path_n, st.m_mu, st.path_n > st.m_mu);
    for (int i = 1; i <= st.k; ++i) {
      const auto u = static_cast<std::size_t>(i - 1);
      const Index j = st.base + 4 * i;
      const std::string ti = tag + "i=" + std::to_string(i) + ": ";
      if (i > 1)
        add(ti + "T" + std::to_string(j - 3) + " = T" + std::to_string(j - 4) + " + 2K", st.path_start[u],
            st.sep_end[u - 1] + 2 * K, st.path_start[u] == st.sep_end[u - 1] + 2 * K);
      const Index t1 = st.alpha_mark[u] - st.path_start[u];
      const Index t2 = st.path_end[u] - st.path_start[u];
      add(ti + "t1 > M", t1, st.path_n, t1 > st.path_n);
      add(ti + "t2 > t1", t2, t1, t2 > t1);
      if (st.k == ms.proximal_stage && i == 1) {
        const Rational need = ms.proximal_ratio * Rational(st.path_start[u]);
        add(ti + "common path t2 >= psi T" + std::to_string(j - 3), t2, to_double(need), Rational(t2) >= need);
      }
      add(ti + "T" + std::to_string(j - 1) + " = T" + std::to_string(j - 2) + " + 2K", st.sep_start[u],
          st.path_end[u] + 2 * K, st.sep_start[u] == st.path_end[u] + 2 * K);
      const Index len = st.sep_end[u] - st.sep_start[u];
      const Index nsep = i < st.k ? st.sep_N : st.witness_N;
      add(ti + "separation length > N^{eps,delta}", len, nsep, len > nsep);
      const Rational lhs = st.delta * Rational(st.sep_end[u]);
      const Index dom = i < st.k ? st.m_mu : st.m_mu_next;
      add(ti + "delta_k T" + std::to_string(j) + " > N^mu", to_double(lhs), dom, lhs > Rational(dom));
      if (i == st.k) {
        const Rational w = ms.rho * Rational(st.sep_end[u]);
        add(ti + "rho T" + std::to_string(j) + " >= T" + std::to_string(j - 1) + " + 2K", to_double(w),
            st.sep_start[u] + 2 * K, w >= Rational(st.sep_start[u] + 2 * K));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- verification

struct FamilyTolerances {
  std::vector<double> t_grid{0.5, 0.25, 0.1};
  std::vector<double> t0{0.4};
  double tol_high = 0.1;
  double tol_low = 0.1;
  std::optional<double> tracking_bound;  // replaces 3 eps_k + 5 delta_k when set
  Index min_checkpoint = 1;              // DC1 checkpoints below this are skipped
  int jobs = 1;
};

struct ClauseResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;
  std::string detail;
};

struct TrackingSample {
  std::string point;
  std::string label;
  int stage = 0;
  Index n = 0;
  double dist = 0.0;
  double bound = 0.0;
  bool ok = false;
};

struct PairResult {
  std::string a;
  std::string b;
  DC1Report report;
  std::optional<Index> certified_coordinate;
};

struct FamilyReport {
  std::vector<ClauseResult> clauses;
  std::vector<TrackingSample> tracking;
  std::vector<TrackingSample> alpha;
  std::vector<PairResult> pairs;
  std::vector<InequalityCheck> schedule;
  bool passed = false;
};

namespace detail {

template <class F>
void parallel_for(std::size_t n, int jobs, F&& f) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  const auto w = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) f(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

inline FamilyReport verify_family(const ScrambleFamily& fam, const FamilyTolerances& tol = {}) {
  FamilyReport rep;
  const int depth = fam.metric_depth;
  const double trunc = truncation_bound(depth);
  const auto cps = fam.markers.checkpoints();
  std::vector<Index> ns;
  for (const auto& c : cps)
    if (c.n >= tol.min_checkpoint) ns.push_back(c.n);
  const int m = fam.mu.max_length();

  // Measure tracking and alpha approach: one streaming pass per point.
  std::vector<std::vector<TrackingSample>> track(fam.points.size()), alpha(fam.points.size());
  detail::parallel_for(fam.points.size(), tol.jobs, [&](std::size_t pi) {
    const auto& [xi, x] = fam.points[pi];
    EmpiricalCounter ec(fam.model.q(), depth);
    WindowStream ws(x, ec.lookahead());
    std::vector<Checkpoint> sorted = cps;
    std::sort(sorted.begin(), sorted.end(), [](const Checkpoint& a, const Checkpoint& b) { return a.n < b.n; });
    std::size_t c = 0;
    for (Index n = 1; c < sorted.size(); ++n) {
      ec.push(ws.at(n - 1));
      for (; c < sorted.size() && sorted[c].n == n; ++c) {
        const auto& cp = sorted[c];
        const auto& st = fam.markers.stages[static_cast<std::size_t>(cp.stage - 1)];
        const CylinderMeasure e = detail::measure_from_counts(ec.counts(), n, fam.model.q(), m, depth);
        const double bound =
            tol.tracking_bound ? *tol.tracking_bound : 3 * st.eps + 5 * to_double(st.delta) + trunc;
        const double d = dist_to_chain(e, fam.K, depth).value;
        track[pi].push_back({xi, cp.label, cp.stage, n, d, bound, d <= bound});
        if (cp.label.find("->") != std::string::npos) {
          const double abound = 3 * st.eps + 2 * to_double(st.delta) + trunc;
          const double da = weakstar_distance(e, fam.alphas[static_cast<std::size_t>(cp.i - 1)], depth);
          alpha[pi].push_back({xi, cp.label, cp.stage, n, da, abound, da <= abound});
        }
      }
    }
  });
  for (std::size_t i = 0; i < fam.points.size(); ++i) {
    rep.tracking.insert(rep.tracking.end(), track[i].begin(), track[i].end());
    rep.alpha.insert(rep.alpha.end(), alpha[i].begin(), alpha[i].end());
  }
  auto summarize = [&](const std::string& name, const std::vector<TrackingSample>& v) {
    ClauseResult c{name, true, 0.0, ""};
    std::size_t bad = 0;
    double worst_margin = -1e300;
    for (const auto& s : v) {
      if (!s.ok) ++bad;
      if (s.dist - s.bound > worst_margin) {
        worst_margin = s.dist - s.bound;
        c.worst = s.dist;
        c.detail = "tightest: x" + s.point + " at " + s.label + " (n=" + std::to_string(s.n) + ")";
      }
    }
    c.pass = bad == 0;
    c.detail += "; violations " + std::to_string(bad) + " of " + std::to_string(v.size());
    rep.clauses.push_back(c);
  };
  summarize("tracking", rep.tracking);
  summarize("alpha-approach", rep.alpha);

  // Pairwise DC1.
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (std::size_t a = 0; a < fam.points.size(); ++a)
    for (std::size_t b = a + 1; b < fam.points.size(); ++b) idx.emplace_back(a, b);
  rep.pairs.resize(idx.size());
  detail::parallel_for(idx.size(), tol.jobs, [&](std::size_t k) {
    const auto& [a, b] = idx[k];
    const auto& [xa, pa] = fam.points[a];
    const auto& [xb, pb] = fam.points[b];
    PairResult pr;
    pr.a = xa;
    pr.b = xb;
    pr.report = dc1_report(pa, pb, ns, tol.t_grid, tol.t0, depth, tol.tol_high, tol.tol_low);
    std::size_t s = 0;
    while (s < xa.size() && xa[s] == xb[s]) ++s;
    if (s < xa.size()) {
      const auto& st = fam.markers.stages[s];
      const Word wa = pa.window(st.sep_start[s], st.sep_end[s]);
      const Word wb = pb.window(st.sep_start[s], st.sep_end[s]);
      for (std::size_t j = 0; j < wa.size(); ++j)
        if (wa[j] != wb[j]) {
          pr.certified_coordinate = st.sep_start[s] + static_cast<Index>(j);
          break;
        }
    }
    rep.pairs[k] = std::move(pr);
  });
  {
    ClauseResult c{"dc1-pairs", true, 1.0, ""};
    std::size_t bad = 0;
    for (const auto& p : rep.pairs) {
      if (!p.report.verdict) ++bad;
      for (const auto& r : p.report.rows) c.worst = std::min(c.worst, r.max_density);
    }
    c.pass = bad == 0 && !rep.pairs.empty();
    c.detail = std::to_string(rep.pairs.size() - bad) + " of " + std::to_string(rep.pairs.size()) + " pairs DC1";
    rep.clauses.push_back(c);
  }
  {
    ClauseResult c{"distinct-coordinates", true, 0.0, ""};
    for (const auto& p : rep.pairs) c.pass = c.pass && p.certified_coordinate.has_value();
    c.detail = "each pair differs inside its first separating block";
    rep.clauses.push_back(c);
  }
  {
    ClauseResult c{"base-cylinder", true, 0.0, ""};
    const auto len = static_cast<Index>(fam.base_cylinder.size());
    for (const auto& [xi, x] : fam.points) c.pass = c.pass && x.prefix(len) == fam.base_cylinder;
    c.detail = "all points start with " + format_word(fam.base_cylinder);
    rep.clauses.push_back(c);
  }
  rep.schedule = replay_schedule(fam);
  {
    ClauseResult c{"schedule", true, 0.0, ""};
    std::size_t bad = 0;
    for (const auto& s : rep.schedule) bad += s.ok ? 0 : 1;
    c.pass = bad == 0;
    c.detail = std::to_string(rep.schedule.size() - bad) + " of " + std::to_string(rep.schedule.size()) + " relations hold";
    rep.clauses.push_back(c);
  }
  rep.passed = std::all_of(rep.clauses.begin(), rep.clauses.end(), [](const ClauseResult& c) { return c.pass; });
  return rep;
}

}  // namespace scramble
