#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scramble/betashift.hpp"
#include "scramble/errors.hpp"
#include "scramble/point.hpp"
#include "scramble/word.hpp"

namespace scramble {

inline constexpr int kDefaultMetricDepth = 24;

using BoolMatrix = std::vector<std::vector<std::uint8_t>>;

namespace detail {

inline BoolMatrix bool_product(const BoolMatrix& a, const BoolMatrix& b) {
  const std::size_t n = a.size();
  BoolMatrix c(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (a[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (b[k][j]) c[i][j] = 1;
  return c;
}

inline bool all_positive(const BoolMatrix& m) {
  for (const auto& row : m)
    for (auto v : row)
      if (!v) return false;
  return true;
}

}  // namespace detail

// Smallest e with A^e strictly positive, searched up to the Wielandt bound.
inline std::optional<int> primitivity_exponent(const BoolMatrix& adj) {
  const int q = static_cast<int>(adj.size());
  const int cap = (q - 1) * (q - 1) + 1;
  BoolMatrix power = adj;
  for (int e = 1; e <= cap; ++e) {
    if (detail::all_positive(power)) return e;
    power = detail::bool_product(power, adj);
  }
  return std::nullopt;
}

enum class ModelKind { Full, Sft, Beta };

class ShiftModel {
 public:
  static ShiftModel full(int q) {
    if (q < 2 || q > kMaxAlphabet) fail(ErrorCode::InvalidArgument, "alphabet size must be in [2,36]");
    ShiftModel m;
    m.kind_ = ModelKind::Full;
    m.q_ = q;
    m.adj_.assign(static_cast<std::size_t>(q), std::vector<std::uint8_t>(static_cast<std::size_t>(q), 1));
    return m;
  }

  static ShiftModel sft(BoolMatrix adjacency) {
    const int q = static_cast<int>(adjacency.size());
    if (q < 2 || q > kMaxAlphabet) fail(ErrorCode::InvalidArgument, "alphabet size must be in [2,36]");
    for (const auto& row : adjacency)
      if (static_cast<int>(row.size()) != q) fail(ErrorCode::InvalidArgument, "adjacency must be square");
    if (!primitivity_exponent(adjacency)) fail(ErrorCode::NotMixing, "adjacency matrix is not primitive");
    ShiftModel m;
    m.kind_ = ModelKind::Sft;
    m.q_ = q;
    m.adj_ = std::move(adjacency);
    return m;
  }

  static ShiftModel golden_mean() { return sft({{1, 1}, {1, 0}}); }

  static ShiftModel beta(BetaParams params) {
    ShiftModel m;
    m.kind_ = ModelKind::Beta;
    m.q_ = params.q();
    m.beta_ = std::make_shared<const BetaParams>(std::move(params));
    return m;
  }

  ModelKind kind() const { return kind_; }
  int q() const { return q_; }
  const BoolMatrix& adjacency() const {
    if (kind_ == ModelKind::Beta) fail(ErrorCode::NotMixing, "beta models have no adjacency matrix");
    return adj_;
  }
  bool allows(Symbol a, Symbol b) const { return adj_[a][b] != 0; }
  const BetaParams& beta_params() const {
    if (!beta_) fail(ErrorCode::InvalidArgument, "model is not a beta model");
    return *beta_;
  }

 private:
  ModelKind kind_ = ModelKind::Full;
  int q_ = 2;
  BoolMatrix adj_;
  std::shared_ptr<const BetaParams> beta_;
};

inline bool word_admissible(const ShiftModel& model, const Word& w) {
  check_symbols(w, model.q());
  switch (model.kind()) {
    case ModelKind::Full:
      return true;
    case ModelKind::Sft:
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (!model.allows(w[i], w[i + 1])) return false;
      return true;
    case ModelKind::Beta:
      return parry_admissible(w, model.beta_params());
  }
  return false;
}

// All admissible words of length len in lexicographic order.
inline std::vector<Word> enumerate_words(const ShiftModel& model, int len) {
  std::vector<Word> out;
  if (len < 0) return out;
  Word cur;
  cur.reserve(static_cast<std::size_t>(len));
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == len) {
      out.push_back(cur);
      return;
    }
    for (int s = 0; s < model.q(); ++s) {
      const auto sym = static_cast<Symbol>(s);
      if (model.kind() == ModelKind::Sft && !cur.empty() && !model.allows(cur.back(), sym)) continue;
      cur.push_back(sym);
      if (model.kind() != ModelKind::Beta || parry_admissible(cur, model.beta_params())) self(self);
      cur.pop_back();
    }
  };
  rec(rec);
  return out;
}

// Canonical cylinder order: by length, then lexicographically, starting at 1.
class CylinderIndex {
 public:
  CylinderIndex(int q, int depth) : q_(q), depth_(depth) {
    if (q < 2) fail(ErrorCode::InvalidArgument, "alphabet size must be at least 2");
    if (depth < 1) fail(ErrorCode::InvalidArgument, "metric depth must be positive");
    std::int64_t first = 1;
    std::int64_t count = q;
    while (first <= depth) {
      base_.push_back(first);
      first += count;
      count *= q;
    }
  }

  int q() const { return q_; }
  int depth() const { return depth_; }
  // Longest word length that owns at least one index within the depth.
  int max_length() const { return static_cast<int>(base_.size()); }
  std::int64_t first_index(int len) const { return base_[static_cast<std::size_t>(len - 1)]; }

  std::int64_t index_of(const Symbol* w, int len) const {
    std::int64_t v = 0;
    for (int i = 0; i < len; ++i) v = v * q_ + w[i];
    return first_index(len) + v;
  }
  std::int64_t index_of(const Word& w) const { return index_of(w.data(), static_cast<int>(w.size())); }

  Word word_of(std::int64_t k) const {
    int len = 1;
    while (len < max_length() && first_index(len + 1) <= k) ++len;
    std::int64_t v = k - first_index(len);
    Word w(static_cast<std::size_t>(len));
    for (int i = len - 1; i >= 0; --i) {
      w[static_cast<std::size_t>(i)] = static_cast<Symbol>(v % q_);
      v /= q_;
    }
    return w;
  }

  // Truncated distance between the points whose first max_length() symbols
  // are a and b.
  double distance(const Symbol* a, const Symbol* b) const {
    double d = 0.0;
    std::int64_t va = 0;
    std::int64_t vb = 0;
    const int lmax = max_length();
    for (int len = 1; len <= lmax; ++len) {
      va = va * q_ + a[len - 1];
      vb = vb * q_ + b[len - 1];
      if (va != vb) {
        const std::int64_t ia = first_index(len) + va;
        const std::int64_t ib = first_index(len) + vb;
        if (ia <= depth_) d += std::ldexp(1.0, -static_cast<int>(ia));
        if (ib <= depth_) d += std::ldexp(1.0, -static_cast<int>(ib));
      }
    }
    return d;
  }

 private:
  int q_;
  int depth_;
  std::vector<std::int64_t> base_;
};

inline double point_distance(const LazyPoint& x, const LazyPoint& y, int depth = kDefaultMetricDepth) {
  if (x.q() != y.q()) fail(ErrorCode::AlphabetMismatch, "points use different alphabets");
  CylinderIndex ci(x.q(), depth);
  const Word a = x.prefix(ci.max_length());
  const Word b = y.prefix(ci.max_length());
  return ci.distance(a.data(), b.data());
}

inline double truncation_bound(int depth) { return std::ldexp(1.0, -depth); }

}  // namespace scramble
