#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "scramble/errors.hpp"
#include "scramble/point.hpp"
#include "scramble/rational.hpp"
#include "scramble/shiftspace.hpp"
#include "scramble/word.hpp"

namespace scramble {

// Weights on every cylinder [w] with 1 <= |w| <= max_length, stored in the
// canonical cylinder order.
class CylinderMeasure {
 public:
  CylinderMeasure() = default;
  CylinderMeasure(int q, int max_length) : q_(q), m_(max_length) {
    if (q < 2) fail(ErrorCode::InvalidArgument, "alphabet size must be at least 2");
    if (max_length < 1) fail(ErrorCode::InvalidArgument, "measure depth must be positive");
    std::int64_t total = 0;
    std::int64_t count = q;
    for (int len = 1; len <= max_length; ++len) {
      base_.push_back(total);
      total += count;
      count *= q;
    }
    w_.assign(static_cast<std::size_t>(total), Rational(0));
  }

  int q() const { return q_; }
  int max_length() const { return m_; }
  std::size_t size() const { return w_.size(); }

  std::size_t slot(const Symbol* w, int len) const {
    std::int64_t v = 0;
    for (int i = 0; i < len; ++i) v = v * q_ + w[i];
    return static_cast<std::size_t>(base_[static_cast<std::size_t>(len - 1)] + v);
  }
  std::size_t slot(const Word& w) const {
    if (w.empty() || static_cast<int>(w.size()) > m_)
      fail(ErrorCode::DepthExceeded, "word length outside the measure depth");
    check_symbols(w, q_);
    return slot(w.data(), static_cast<int>(w.size()));
  }

  const Rational& weight(const Word& w) const { return w_[slot(w)]; }
  void set_weight(const Word& w, const Rational& r) { w_[slot(w)] = r; }
  // Canonical index k (1-based) maps to slot k-1.
  const Rational& by_index(std::int64_t k) const { return w_[static_cast<std::size_t>(k - 1)]; }
  Rational& by_index(std::int64_t k) { return w_[static_cast<std::size_t>(k - 1)]; }

  std::vector<Word> words_of_length(int len) const {
    std::vector<Word> out;
    std::int64_t count = 1;
    for (int i = 0; i < len; ++i) count *= q_;
    for (std::int64_t v = 0; v < count; ++v) {
      Word w(static_cast<std::size_t>(len));
      std::int64_t r = v;
      for (int i = len - 1; i >= 0; --i) {
        w[static_cast<std::size_t>(i)] = static_cast<Symbol>(r % q_);
        r /= q_;
      }
      out.push_back(std::move(w));
    }
    return out;
  }

  // Per-length sums, Kolmogorov consistency and nonnegativity.
  void validate() const {
    for (const auto& r : w_)
      if (r < 0) fail(ErrorCode::InvalidArgument, "negative cylinder weight");
    for (int len = 1; len <= m_; ++len) {
      Rational sum = 0;
      for (const auto& w : words_of_length(len)) sum += weight(w);
      if (sum != 1) fail(ErrorCode::InvalidArgument, "weights of length " + std::to_string(len) + " sum to " + to_string(sum));
      if (len == m_) break;
      for (const auto& w : words_of_length(len)) {
        Rational children = 0;
        Word c = w;
        c.push_back(0);
        for (int s = 0; s < q_; ++s) {
          c.back() = static_cast<Symbol>(s);
          children += weight(c);
        }
        if (children != weight(w))
          fail(ErrorCode::InvalidArgument, "inconsistent weights below [" + format_word(w) + "]");
      }
    }
  }

  bool operator==(const CylinderMeasure& o) const { return q_ == o.q_ && m_ == o.m_ && w_ == o.w_; }

  const std::vector<Rational>& raw() const { return w_; }
  std::vector<Rational>& raw() { return w_; }

 private:
  int q_ = 2;
  int m_ = 0;
  std::vector<std::int64_t> base_;
  std::vector<Rational> w_;
};

inline CylinderMeasure empirical_measure(const LazyPoint& x, Index n, int m) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "empirical measure needs n >= 1");
  CylinderMeasure mu(x.q(), m);
  const Word xs = x.prefix(n + m - 1);
  std::vector<std::int64_t> counts(mu.size(), 0);
  for (Index i = 0; i < n; ++i)
    for (int len = 1; len <= m; ++len) ++counts[mu.slot(xs.data() + i, len)];
  for (std::size_t k = 0; k < counts.size(); ++k) mu.raw()[k] = ratio(counts[k], n);
  return mu;
}

inline CylinderMeasure point_mass(const LazyPoint& x, int m) { return empirical_measure(x, 1, m); }

inline CylinderMeasure periodic_measure(const Word& w, int m, const ShiftModel* model = nullptr, int q = 0) {
  if (w.empty()) fail(ErrorCode::NotSelfConcatenable, "empty word");
  const int qq = model ? model->q() : (q > 0 ? q : 2);
  check_symbols(w, qq);
  if (model && !word_admissible(*model, concat(w, w)))
    fail(ErrorCode::NotSelfConcatenable, "'" + format_word(w) + "' cannot follow itself");
  const LazyPoint p = LazyPoint::periodic(w, qq);
  return empirical_measure(p, static_cast<Index>(w.size()), m);
}

inline CylinderMeasure convex_combine(const CylinderMeasure& a, const CylinderMeasure& b, const Rational& theta) {
  if (theta < 0 || theta > 1) fail(ErrorCode::ThetaOutOfRange, "theta = " + to_string(theta));
  if (a.q() != b.q()) fail(ErrorCode::AlphabetMismatch, "measures use different alphabets");
  if (a.max_length() != b.max_length()) fail(ErrorCode::DepthExceeded, "measures have different depths");
  CylinderMeasure c(a.q(), a.max_length());
  const Rational one_minus = 1 - theta;
  for (std::size_t k = 0; k < c.size(); ++k) c.raw()[k] = theta * a.raw()[k] + one_minus * b.raw()[k];
  return c;
}

namespace detail {

inline void check_metric_depth(const CylinderMeasure& mu, const CylinderMeasure& nu, int depth) {
  if (mu.q() != nu.q()) fail(ErrorCode::AlphabetMismatch, "measures use different alphabets");
  CylinderIndex ci(mu.q(), depth);
  if (ci.max_length() > mu.max_length() || ci.max_length() > nu.max_length())
    fail(ErrorCode::DepthExceeded, "metric depth " + std::to_string(depth) + " needs words of length " +
                                       std::to_string(ci.max_length()));
}

}  // namespace detail

inline Rational weakstar_distance_exact(const CylinderMeasure& mu, const CylinderMeasure& nu, int depth) {
  detail::check_metric_depth(mu, nu, depth);
  Rational d = 0;
  for (int k = 1; k <= depth; ++k) d += pow2_neg(k) * abs_value(mu.by_index(k) - nu.by_index(k));
  return d;
}

inline double weakstar_distance(const CylinderMeasure& mu, const CylinderMeasure& nu, int depth = kDefaultMetricDepth) {
  return to_double(weakstar_distance_exact(mu, nu, depth));
}

// The first `depth` canonical weights as doubles, for streaming audits.
inline std::vector<double> visible_weights(const CylinderMeasure& mu, int depth) {
  CylinderIndex ci(mu.q(), depth);
  if (ci.max_length() > mu.max_length()) fail(ErrorCode::DepthExceeded, "measure too shallow for the metric depth");
  std::vector<double> v(static_cast<std::size_t>(depth) + 1, 0.0);
  for (int k = 1; k <= depth; ++k) v[static_cast<std::size_t>(k)] = to_double(mu.by_index(k));
  return v;
}

// A connected chain of segments cov{v_i, v_{i+1}}. A single vertex is the
// degenerate chain {v_0}.
struct MeasureChain {
  std::vector<CylinderMeasure> vertices;
  std::vector<std::optional<Word>> generators;  // periodic word realizing each vertex, when known

  std::size_t segment_count() const { return vertices.size() <= 1 ? vertices.size() : vertices.size() - 1; }
  const CylinderMeasure& seg_first(std::size_t s) const { return vertices[s]; }
  const CylinderMeasure& seg_second(std::size_t s) const {
    return vertices.size() == 1 ? vertices[0] : vertices[s + 1];
  }
  // theta * first + (1 - theta) * second on segment s.
  CylinderMeasure point(std::size_t s, const Rational& theta) const {
    return convex_combine(seg_first(s), seg_second(s), theta);
  }
};

inline MeasureChain chain_from_words(const ShiftModel& model, const std::vector<Word>& words, int m) {
  MeasureChain k;
  for (const auto& w : words) {
    k.vertices.push_back(periodic_measure(w, m, &model));
    k.generators.push_back(w);
  }
  return k;
}

inline MeasureChain chain_from_measures(std::vector<CylinderMeasure> vs) {
  MeasureChain k;
  k.generators.assign(vs.size(), std::nullopt);
  k.vertices = std::move(vs);
  return k;
}

struct ChainDistance {
  double value = 0.0;
  Rational exact;
  std::size_t segment = 0;
  Rational theta;
};

// Exact minimum over the chain; each segment minimum is taken over the
// breakpoints of a convex piecewise-linear function of theta.
inline ChainDistance dist_to_chain(const CylinderMeasure& nu, const MeasureChain& k, int depth = kDefaultMetricDepth) {
  if (k.vertices.empty()) fail(ErrorCode::EmptyChain, "chain has no vertices");
  ChainDistance best;
  bool have = false;
  for (std::size_t s = 0; s < k.segment_count(); ++s) {
    const auto& a = k.seg_first(s);
    const auto& b = k.seg_second(s);
    detail::check_metric_depth(nu, a, depth);
    detail::check_metric_depth(nu, b, depth);
    std::vector<Rational> A(static_cast<std::size_t>(depth) + 1);
    std::vector<Rational> B(static_cast<std::size_t>(depth) + 1);
    std::vector<Rational> cand{Rational(0), Rational(1)};
    for (int i = 1; i <= depth; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      A[iu] = b.by_index(i) - a.by_index(i);
      B[iu] = nu.by_index(i) - b.by_index(i);
      if (A[iu] != 0) {
        Rational t = -B[iu] / A[iu];
        if (t > 0 && t < 1) cand.push_back(t);
      }
    }
    for (const auto& t : cand) {
      Rational f = 0;
      for (int i = 1; i <= depth; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        f += pow2_neg(i) * abs_value(A[iu] * t + B[iu]);
      }
      if (!have || f < best.exact) {
        best.exact = f;
        best.segment = s;
        best.theta = t;
        have = true;
      }
    }
  }
  best.value = to_double(best.exact);
  return best;
}

// Double-precision chain distance for streaming audits over many n.
class FastChain {
 public:
  FastChain(const MeasureChain& k, int depth) : depth_(depth) {
    if (k.vertices.empty()) fail(ErrorCode::EmptyChain, "chain has no vertices");
    for (std::size_t s = 0; s < k.segment_count(); ++s) {
      segs_.push_back({visible_weights(k.seg_first(s), depth), visible_weights(k.seg_second(s), depth)});
    }
    for (int i = 1; i <= depth; ++i) scale_.push_back(std::ldexp(1.0, -i));
  }

  double distance(const std::vector<double>& nu) const {
    double best = 1e300;
    std::vector<double> cand;
    for (const auto& [a, b] : segs_) {
      cand.assign({0.0, 1.0});
      for (int i = 1; i <= depth_; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        const double A = b[iu] - a[iu];
        if (A != 0.0) {
          const double t = -(nu[iu] - b[iu]) / A;
          if (t > 0.0 && t < 1.0) cand.push_back(t);
        }
      }
      for (double t : cand) {
        double f = 0.0;
        for (int i = 1; i <= depth_; ++i) {
          const auto iu = static_cast<std::size_t>(i);
          f += scale_[iu - 1] * std::fabs((b[iu] - a[iu]) * t + nu[iu] - b[iu]);
        }
        best = std::min(best, f);
      }
    }
    return best;
  }

 private:
  int depth_;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> segs_;
  std::vector<double> scale_;
};

inline double fast_distance(const std::vector<double>& a, const std::vector<double>& b, int depth) {
  double d = 0.0;
  for (int i = 1; i <= depth; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    d += std::ldexp(std::fabs(a[iu] - b[iu]), -i);
  }
  return d;
}

// Running cylinder counts of the empirical measures along one point.
class EmpiricalCounter {
 public:
  EmpiricalCounter(int q, int depth) : ci_(q, depth), counts_(static_cast<std::size_t>(depth) + 1, 0) {}

  const CylinderIndex& index() const { return ci_; }
  Index n() const { return n_; }
  int lookahead() const { return ci_.max_length(); }

  // Adds the window starting at w, which must expose lookahead() symbols.
  void push(const Symbol* w) {
    std::int64_t v = 0;
    for (int len = 1; len <= ci_.max_length(); ++len) {
      v = v * ci_.q() + w[len - 1];
      const std::int64_t k = ci_.first_index(len) + v;
      if (k <= ci_.depth()) ++counts_[static_cast<std::size_t>(k)];
    }
    ++n_;
  }

  std::vector<double> weights() const {
    std::vector<double> v(counts_.size(), 0.0);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 1; k < counts_.size(); ++k) v[k] = static_cast<double>(counts_[k]) * inv;
    return v;
  }

  double distance_to(const std::vector<double>& target) const {
    double d = 0.0;
    const double nn = static_cast<double>(n_);
    for (int k = 1; k <= ci_.depth(); ++k) {
      const auto ku = static_cast<std::size_t>(k);
      d += std::ldexp(std::fabs(static_cast<double>(counts_[ku]) / nn - target[ku]), -k);
    }
    return d;
  }

  const std::vector<std::int64_t>& counts() const { return counts_; }

 private:
  CylinderIndex ci_;
  std::vector<std::int64_t> counts_;
  Index n_ = 0;
};

// Streams f^i x for i = 0, 1, ... in chunks, exposing `look` symbols per step.
class WindowStream {
 public:
  WindowStream(const LazyPoint& x, int look, Index chunk = 1 << 15)
      : x_(x), look_(look), chunk_(chunk), buf_(static_cast<std::size_t>(chunk + look)) {
    refill(0);
  }

  const Symbol* at(Index i) {
    if (i < start_ || i >= start_ + chunk_) refill(i);
    return buf_.data() + (i - start_);
  }

 private:
  void refill(Index i) {
    start_ = i;
    x_.fill(i, chunk_ + look_, buf_.data());
  }

  LazyPoint x_;
  int look_;
  Index chunk_;
  Index start_ = 0;
  std::vector<Symbol> buf_;
};

}  // namespace scramble
