#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "scramble/errors.hpp"
#include "scramble/word.hpp"

namespace scramble {

using Index = std::int64_t;
inline constexpr Index kUnbounded = std::numeric_limits<Index>::max();

struct PointPlan;
using PlanPtr = std::shared_ptr<const PointPlan>;

enum class PieceKind { Source, Literal, Unresolved };

// One contiguous run [start, end) of a glued plan.
struct Piece {
  Index start = 0;
  Index end = 0;
  PieceKind kind = PieceKind::Literal;
  Word literal;
  PlanPtr source;
  Index source_offset = 0;  // coordinate i maps to source[i - start + source_offset]
};

struct PointPlan {
  enum class Kind { PrefixPeriodic, Glued };
  Kind kind = Kind::PrefixPeriodic;
  int q = 2;
  Word prefix;
  Word tail;
  std::vector<Piece> pieces;
  Index horizon_hint = 0;
};

namespace detail {

inline void fill_plan(const PointPlan& plan, Index a, Index n, Symbol* out) {
  if (n <= 0) return;
  if (plan.kind == PointPlan::Kind::PrefixPeriodic) {
    const Index plen = static_cast<Index>(plan.prefix.size());
    const Index tlen = static_cast<Index>(plan.tail.size());
    Index i = a;
    Index k = 0;
    for (; k < n && i < plen; ++k, ++i) out[k] = plan.prefix[static_cast<std::size_t>(i)];
    if (k == n) return;
    Index phase = (i - plen) % tlen;
    for (; k < n; ++k) {
      out[k] = plan.tail[static_cast<std::size_t>(phase)];
      if (++phase == tlen) phase = 0;
    }
    return;
  }
  const auto& pcs = plan.pieces;
  auto it = std::upper_bound(pcs.begin(), pcs.end(), a,
                             [](Index v, const Piece& p) { return v < p.start; });
  std::size_t idx = static_cast<std::size_t>(std::distance(pcs.begin(), it)) - 1;
  Index i = a;
  Index k = 0;
  while (k < n) {
    const Piece& p = pcs[idx];
    const Index stop = std::min(p.end, a + n);
    const Index count = stop - i;
    switch (p.kind) {
      case PieceKind::Source:
        fill_plan(*p.source, i - p.start + p.source_offset, count, out + k);
        break;
      case PieceKind::Literal:
        std::copy_n(p.literal.begin() + (i - p.start), count, out + k);
        break;
      case PieceKind::Unresolved:
        fail(ErrorCode::UnresolvedPlan,
             "coordinates [" + std::to_string(p.start) + "," + std::to_string(p.end) + ") have no filler");
    }
    k += count;
    i += count;
    ++idx;
  }
}

}  // namespace detail

// An infinite one-sided sequence given by an immutable evaluation plan.
class LazyPoint {
 public:
  LazyPoint() = default;
  explicit LazyPoint(PlanPtr plan) : plan_(std::move(plan)) {}

  static LazyPoint prefix_periodic(Word prefix, Word tail, int q) {
    if (tail.empty()) fail(ErrorCode::InvalidArgument, "periodic tail must be nonempty");
    check_symbols(prefix, q);
    check_symbols(tail, q);
    auto p = std::make_shared<PointPlan>();
    p->kind = PointPlan::Kind::PrefixPeriodic;
    p->q = q;
    p->prefix = std::move(prefix);
    p->tail = std::move(tail);
    p->horizon_hint = static_cast<Index>(p->prefix.size() + p->tail.size());
    return LazyPoint(p);
  }

  static LazyPoint periodic(Word tail, int q) { return prefix_periodic({}, std::move(tail), q); }

  // Pieces must tile [0, infinity) in order; the last one must be unbounded.
  static LazyPoint glued(std::vector<Piece> pieces, int q, Index horizon_hint = 0) {
    if (pieces.empty()) fail(ErrorCode::InvalidArgument, "glued plan without pieces");
    Index expect = 0;
    for (const auto& pc : pieces) {
      if (pc.start != expect || pc.end <= pc.start)
        fail(ErrorCode::InvalidArgument, "glued pieces must tile the index range");
      if (pc.kind == PieceKind::Literal) {
        if (static_cast<Index>(pc.literal.size()) != pc.end - pc.start)
          fail(ErrorCode::InvalidArgument, "literal piece length mismatch");
        check_symbols(pc.literal, q);
      }
      if (pc.kind == PieceKind::Source) {
        if (!pc.source) fail(ErrorCode::InvalidArgument, "source piece without plan");
        if (pc.source->q != q) fail(ErrorCode::AlphabetMismatch, "source alphabet differs");
      }
      expect = pc.end;
    }
    if (expect != kUnbounded) fail(ErrorCode::InvalidArgument, "last glued piece must be unbounded");
    auto p = std::make_shared<PointPlan>();
    p->kind = PointPlan::Kind::Glued;
    p->q = q;
    p->pieces = std::move(pieces);
    p->horizon_hint = horizon_hint;
    return LazyPoint(p);
  }

  int q() const { return plan_->q; }
  const PointPlan& plan() const { return *plan_; }
  const PlanPtr& plan_ptr() const { return plan_; }
  bool valid() const { return static_cast<bool>(plan_); }
  Index horizon_hint() const { return plan_->horizon_hint; }

  void fill(Index a, Index n, Symbol* out) const {
    if (a < 0) fail(ErrorCode::InvalidArgument, "negative coordinate");
    detail::fill_plan(*plan_, a, n, out);
  }

  Symbol at(Index i) const {
    Symbol s = 0;
    fill(i, 1, &s);
    return s;
  }

  // Coordinates a..b inclusive.
  Word window(Index a, Index b) const {
    if (a < 0 || b < a) fail(ErrorCode::InvalidArgument, "window needs 0 <= a <= b");
    Word w(static_cast<std::size_t>(b - a + 1));
    fill(a, b - a + 1, w.data());
    return w;
  }

  // First n coordinates.
  Word prefix(Index n) const {
    Word w(static_cast<std::size_t>(n));
    fill(0, n, w.data());
    return w;
  }

  // The point f^k x.
  LazyPoint shifted(Index k) const {
    if (k == 0) return *this;
    if (plan_->kind == PointPlan::Kind::PrefixPeriodic) {
      const Index plen = static_cast<Index>(plan_->prefix.size());
      if (k < plen) {
        Word pre(plan_->prefix.begin() + k, plan_->prefix.end());
        return prefix_periodic(std::move(pre), plan_->tail, q());
      }
      const Index tlen = static_cast<Index>(plan_->tail.size());
      const Index r = (k - plen) % tlen;
      Word rot(plan_->tail.begin() + r, plan_->tail.end());
      rot.insert(rot.end(), plan_->tail.begin(), plan_->tail.begin() + r);
      return periodic(std::move(rot), q());
    }
    Piece pc;
    pc.start = 0;
    pc.end = kUnbounded;
    pc.kind = PieceKind::Source;
    pc.source = plan_;
    pc.source_offset = k;
    return glued({pc}, q(), std::max<Index>(0, plan_->horizon_hint - k));
  }

 private:
  PlanPtr plan_;
};

inline Word orbit_window(const LazyPoint& x, Index a, Index b) { return x.window(a, b); }

// FNV-1a over the first n coordinates.
inline std::uint64_t point_digest(const LazyPoint& x, Index n) {
  std::uint64_t h = 1469598103934665603ULL;
  constexpr Index kChunk = 1 << 16;
  std::vector<Symbol> buf(kChunk);
  for (Index a = 0; a < n; a += kChunk) {
    const Index len = std::min(kChunk, n - a);
    x.fill(a, len, buf.data());
    for (Index i = 0; i < len; ++i) {
      h ^= buf[static_cast<std::size_t>(i)];
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace scramble
