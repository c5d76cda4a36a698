#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "scramble/errors.hpp"
#include "scramble/measures.hpp"
#include "scramble/point.hpp"
#include "scramble/shiftspace.hpp"
#include "scramble/word.hpp"

namespace scramble {

inline int mixing_gap(const ShiftModel& model) {
  switch (model.kind()) {
    case ModelKind::Full:
      return 1;
    case ModelKind::Sft: {
      auto e = primitivity_exponent(model.adjacency());
      if (!e) fail(ErrorCode::NotMixing, "adjacency matrix is not primitive");
      return *e;
    }
    case ModelKind::Beta:
      fail(ErrorCode::NotMixing, "beta models have no generic connector; use reach_target");
  }
  return 0;
}

namespace detail {

// reach[t][s] == 1 iff some path of exactly t steps leads from s to v.
inline std::vector<std::vector<std::uint8_t>> reach_table(const ShiftModel& model, Symbol v, Index steps) {
  const int q = model.q();
  std::vector<std::vector<std::uint8_t>> reach(static_cast<std::size_t>(steps) + 1,
                                               std::vector<std::uint8_t>(static_cast<std::size_t>(q), 0));
  reach[0][v] = 1;
  for (Index t = 1; t <= steps; ++t) {
    for (int s = 0; s < q; ++s)
      for (int u = 0; u < q; ++u)
        if (model.allows(static_cast<Symbol>(s), static_cast<Symbol>(u)) && reach[static_cast<std::size_t>(t - 1)][u]) {
          reach[static_cast<std::size_t>(t)][static_cast<std::size_t>(s)] = 1;
          break;
        }
  }
  return reach;
}

inline void require_connectable(const ShiftModel& model) {
  if (model.kind() == ModelKind::Beta)
    fail(ErrorCode::NotMixing, "beta models have no generic connector; use reach_target");
}

}  // namespace detail

// Lexicographically smallest w of length len with u w v admissible.
inline Word connect(const ShiftModel& model, Symbol u, Symbol v, Index len) {
  detail::require_connectable(model);
  if (len < 0) fail(ErrorCode::InvalidArgument, "connector length must be nonnegative");
  check_symbols(Word{u, v}, model.q());
  const auto reach = detail::reach_table(model, v, len + 1);
  if (!reach[static_cast<std::size_t>(len + 1)][u])
    fail(ErrorCode::NoConnector, "no path of length " + std::to_string(len) + " from " + std::to_string(int(u)) +
                                     " to " + std::to_string(int(v)));
  Word w;
  w.reserve(static_cast<std::size_t>(len));
  Symbol prev = u;
  for (Index remaining = len; remaining > 0; --remaining) {
    for (int s = 0; s < model.q(); ++s) {
      const auto sym = static_cast<Symbol>(s);
      if (model.allows(prev, sym) && reach[static_cast<std::size_t>(remaining)][sym]) {
        w.push_back(sym);
        prev = sym;
        break;
      }
    }
  }
  return w;
}

// Shortest connector length from u to v.
inline Index shortest_connector(const ShiftModel& model, Symbol u, Symbol v) {
  detail::require_connectable(model);
  for (Index len = 0; len <= model.q() * model.q() + 1; ++len) {
    const auto reach = detail::reach_table(model, v, len + 1);
    if (reach[static_cast<std::size_t>(len + 1)][u]) return len;
  }
  fail(ErrorCode::NoConnector, "symbols are not connected");
}

// The lexicographically smallest admissible infinite continuation after u,
// returned as an eventually periodic word pair (prefix, cycle).
inline std::pair<Word, Word> smallest_continuation(const ShiftModel& model, Symbol u) {
  detail::require_connectable(model);
  std::map<Symbol, std::size_t> seen;
  Word seq;
  Symbol cur = u;
  while (true) {
    Symbol next = 0;
    bool found = false;
    for (int s = 0; s < model.q(); ++s) {
      if (model.allows(cur, static_cast<Symbol>(s))) {
        next = static_cast<Symbol>(s);
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorCode::NoConnector, "symbol has no successor");
    auto it = seen.find(next);
    if (it != seen.end()) {
      Word pre(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(it->second));
      Word cyc(seq.begin() + static_cast<std::ptrdiff_t>(it->second), seq.end());
      return {pre, cyc};
    }
    seen[next] = seq.size();
    seq.push_back(next);
    cur = next;
  }
}

struct PlanSegment {
  LazyPoint y;
  Index a = 0;
  Index b = 0;
};

struct OrbitPlan {
  ShiftModel model;
  std::vector<PlanSegment> segments;
};

// Copies coordinates [a_m, b_m] from y_m (x_i = y_{i - a_m}), fills gaps with
// connectors and ends with the smallest admissible continuation.
inline LazyPoint glue(const OrbitPlan& plan) {
  const auto& model = plan.model;
  detail::require_connectable(model);
  if (plan.segments.empty()) fail(ErrorCode::InvalidArgument, "plan has no segments");
  if (plan.segments.front().a != 0) fail(ErrorCode::InvalidArgument, "the first window must start at 0");
  const Index gap = mixing_gap(model);
  std::vector<Piece> pieces;
  Symbol last = 0;
  for (std::size_t m = 0; m < plan.segments.size(); ++m) {
    const auto& seg = plan.segments[m];
    if (seg.b < seg.a) fail(ErrorCode::InvalidArgument, "window with b < a");
    if (seg.y.q() != model.q()) fail(ErrorCode::AlphabetMismatch, "segment alphabet differs from the model");
    const Word body = seg.y.prefix(seg.b - seg.a + 1);
    if (!word_admissible(model, body))
      fail(ErrorCode::InvalidArgument, "segment " + std::to_string(m) + " window word is not admissible");
    if (m > 0) {
      const auto& prev = plan.segments[m - 1];
      if (seg.a - prev.b < gap)
        fail(ErrorCode::GapTooSmall, "gap " + std::to_string(seg.a - prev.b) + " below mixing gap " + std::to_string(gap));
      const Index len = seg.a - prev.b - 1;
      Word filler = connect(model, last, body.front(), len);
      if (!filler.empty()) {
        Piece f;
        f.start = prev.b + 1;
        f.end = seg.a;
        f.kind = PieceKind::Literal;
        f.literal = std::move(filler);
        pieces.push_back(std::move(f));
      }
    }
    Piece p;
    p.start = seg.a;
    p.end = seg.b + 1;
    p.kind = PieceKind::Source;
    p.source = seg.y.plan_ptr();
    p.source_offset = 0;
    pieces.push_back(std::move(p));
    last = body.back();
  }
  auto [pre, cyc] = smallest_continuation(model, last);
  Piece tail;
  tail.start = plan.segments.back().b + 1;
  tail.end = kUnbounded;
  tail.kind = PieceKind::Source;
  tail.source = LazyPoint::prefix_periodic(pre, cyc, model.q()).plan_ptr();
  pieces.push_back(std::move(tail));
  return LazyPoint::glued(std::move(pieces), model.q(), plan.segments.back().b + 1);
}

// True iff d(f^i x, f^{i-a} y) < eps for every i in [a, b].
inline bool verify_trace(const LazyPoint& x, const LazyPoint& y, Index a, Index b, double eps,
                         int depth = kDefaultMetricDepth) {
  if (b < a) fail(ErrorCode::InvalidArgument, "verify_trace needs a <= b");
  if (x.q() != y.q()) fail(ErrorCode::AlphabetMismatch, "points use different alphabets");
  CylinderIndex ci(x.q(), depth);
  const int look = ci.max_length();
  const Word xs = x.window(a, b + look - 1);
  const Word ys = y.prefix(b - a + look);
  for (Index i = 0; i <= b - a; ++i) {
    if (!(ci.distance(xs.data() + i, ys.data() + i) < eps)) return false;
  }
  return true;
}

}  // namespace scramble
