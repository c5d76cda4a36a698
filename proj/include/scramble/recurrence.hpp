#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scramble/errors.hpp"
#include "scramble/measures.hpp"
#include "scramble/point.hpp"
#include "scramble/rational.hpp"
#include "scramble/shiftspace.hpp"
#include "scramble/word.hpp"

namespace scramble {

using IndexSet = std::vector<Index>;  // strictly increasing

inline IndexSet visit_times(const LazyPoint& x, const Word& cylinder, Index horizon) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  check_symbols(cylinder, x.q());
  IndexSet out;
  const Index len = static_cast<Index>(cylinder.size());
  const Word xs = x.prefix(horizon + 1 + len);
  for (Index n = 1; n <= horizon; ++n)
    if (std::equal(cylinder.begin(), cylinder.end(), xs.begin() + n)) out.push_back(n);
  return out;
}

// Visits of f^n x to the open ball B(center, eps).
inline IndexSet visit_times(const LazyPoint& x, const LazyPoint& center, double eps, Index horizon,
                            int depth = kDefaultMetricDepth) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  if (x.q() != center.q()) fail(ErrorCode::AlphabetMismatch, "points use different alphabets");
  CylinderIndex ci(x.q(), depth);
  const Word c = center.prefix(ci.max_length());
  const Word xs = x.prefix(horizon + 1 + ci.max_length());
  IndexSet out;
  for (Index n = 1; n <= horizon; ++n)
    if (ci.distance(xs.data() + n, c.data()) < eps) out.push_back(n);
  return out;
}

struct DensityQuad {
  Rational upper;
  Rational lower;
  Rational banach_upper;
  Rational banach_lower;
  Index horizon = 0;
  Index min_window = 0;
};

namespace detail {

struct Frac {
  std::int64_t num;
  std::int64_t den;
};

inline bool frac_less(const Frac& a, const Frac& b) {
  return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

// Maximum of (P[j]-P[i])/(j-i) over j - i >= w, via a lower hull of the
// prefix-sum points and binary-searched tangents.
inline Frac max_window_density(const std::vector<std::int64_t>& P, Index w) {
  const Index h = static_cast<Index>(P.size()) - 1;
  std::vector<Index> hull;
  auto cross = [&](Index a, Index b, Index c) {
    const __int128 x1 = b - a, y1 = P[static_cast<std::size_t>(b)] - P[static_cast<std::size_t>(a)];
    const __int128 x2 = c - a, y2 = P[static_cast<std::size_t>(c)] - P[static_cast<std::size_t>(a)];
    return x1 * y2 - x2 * y1;
  };
  auto slope = [&](Index i, Index j) {
    return Frac{P[static_cast<std::size_t>(j)] - P[static_cast<std::size_t>(i)], j - i};
  };
  Frac best{0, 1};
  bool have = false;
  for (Index j = w; j <= h; ++j) {
    const Index add = j - w;
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), add) <= 0) hull.pop_back();
    hull.push_back(add);
    std::size_t lo = 0;
    std::size_t hi = hull.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (frac_less(slope(hull[mid], j), slope(hull[mid + 1], j))) lo = mid + 1;
      else hi = mid;
    }
    const Frac f = slope(hull[lo], j);
    if (!have || frac_less(best, f)) {
      best = f;
      have = true;
    }
  }
  return best;
}

}  // namespace detail

inline DensityQuad density_quad(const IndexSet& S, Index horizon, Index min_window) {
  if (horizon < 1) fail(ErrorCode::InvalidArgument, "horizon must be positive");
  if (min_window < 1) fail(ErrorCode::InvalidArgument, "min_window must be positive");
  const Index half = (horizon + 1) / 2;
  if (min_window > half)
    fail(ErrorCode::MinWindowTooLarge, "min_window " + std::to_string(min_window) + " exceeds ceil(horizon/2)");
  std::vector<std::int64_t> P(static_cast<std::size_t>(horizon) + 1, 0);
  std::vector<std::int64_t> Q(static_cast<std::size_t>(horizon) + 1, 0);
  Index prev = 0;
  for (Index s : S) {
    if (s < 1 || s > horizon || s <= prev) fail(ErrorCode::InvalidArgument, "index set must be increasing within [1,horizon]");
    prev = s;
    P[static_cast<std::size_t>(s)] = 1;
  }
  for (Index n = 1; n <= horizon; ++n) {
    const auto nu = static_cast<std::size_t>(n);
    Q[nu] = Q[nu - 1] + (1 - P[nu]);
    P[nu] += P[nu - 1];
  }
  DensityQuad d;
  d.horizon = horizon;
  d.min_window = min_window;
  detail::Frac up{P[static_cast<std::size_t>(half)], half};
  detail::Frac lo = up;
  for (Index n = half; n <= horizon; ++n) {
    detail::Frac f{P[static_cast<std::size_t>(n)], n};
    if (detail::frac_less(up, f)) up = f;
    if (detail::frac_less(f, lo)) lo = f;
  }
  d.upper = ratio(up.num, up.den);
  d.lower = ratio(lo.num, lo.den);
  const auto bu = detail::max_window_density(P, min_window);
  const auto bc = detail::max_window_density(Q, min_window);
  d.banach_upper = ratio(bu.num, bu.den);
  d.banach_lower = 1 - ratio(bc.num, bc.den);
  return d;
}

inline Index default_min_window(Index horizon) {
  return std::max<Index>(1, static_cast<Index>(std::floor(std::sqrt(static_cast<double>(horizon)))));
}

struct RecurrenceThresholds {
  double tau = 0.01;
  Index min_window = 0;  // 0 selects floor(sqrt(horizon))
  int transitivity_length = 6;
};

enum class RecurrenceLabel { AP, W, QW, BR, Rec, NonRecurrent };

inline std::string label_name(RecurrenceLabel l) {
  switch (l) {
    case RecurrenceLabel::AP: return "AP";
    case RecurrenceLabel::W: return "W\\AP";
    case RecurrenceLabel::QW: return "QW\\W";
    case RecurrenceLabel::BR: return "BR\\QW";
    case RecurrenceLabel::Rec: return "Rec\\BR";
    case RecurrenceLabel::NonRecurrent: return "NonRecurrent";
  }
  return "?";
}

struct RecurrenceClass {
  RecurrenceLabel label = RecurrenceLabel::NonRecurrent;
  DensityQuad quad;
  Index returns = 0;
  double transitivity = 0.0;
  Index horizon = 0;
  double eps = 0.0;
  double tau = 0.0;

  bool ap_consistent() const { return label == RecurrenceLabel::AP; }
  // Membership in the nested classes AP ⊆ W ⊆ QW ⊆ BR.
  bool br_consistent() const { return label <= RecurrenceLabel::BR; }
};

// Fraction of admissible words of length L that occur in x at a position in [0, horizon].
inline double transitivity_score(const ShiftModel& model, const LazyPoint& x, int L, Index horizon) {
  const auto words = enumerate_words(model, L);
  if (words.empty()) return 0.0;
  std::set<Word> seen;
  const Word xs = x.prefix(horizon + L);
  for (Index n = 0; n <= horizon; ++n) seen.emplace(xs.begin() + n, xs.begin() + n + L);
  std::size_t hit = 0;
  for (const auto& w : words) hit += seen.count(w);
  return static_cast<double>(hit) / static_cast<double>(words.size());
}

inline RecurrenceClass classify_recurrence(const ShiftModel& model, const LazyPoint& x, double eps, Index horizon,
                                           int depth = kDefaultMetricDepth, RecurrenceThresholds th = {}) {
  const Index mw = th.min_window > 0 ? th.min_window : default_min_window(horizon);
  const IndexSet S = visit_times(x, x, eps, horizon, depth);
  RecurrenceClass rc;
  rc.quad = density_quad(S, horizon, mw);
  rc.returns = static_cast<Index>(S.size());
  rc.horizon = horizon;
  rc.eps = eps;
  rc.tau = th.tau;
  const Rational tau(th.tau);
  if (rc.quad.banach_lower >= tau) rc.label = RecurrenceLabel::AP;
  else if (rc.quad.lower >= tau) rc.label = RecurrenceLabel::W;
  else if (rc.quad.upper >= tau) rc.label = RecurrenceLabel::QW;
  else if (rc.quad.banach_upper >= tau) rc.label = RecurrenceLabel::BR;
  else if (rc.returns > 0) rc.label = RecurrenceLabel::Rec;
  else rc.label = RecurrenceLabel::NonRecurrent;
  rc.transitivity = transitivity_score(model, x, th.transitivity_length, horizon);
  return rc;
}

// Index 0..4: B_*, lower density, upper density, B^*, visited at all.
inline constexpr std::array<const char*, 5> kOmegaKinds{"banach_lower", "lower", "upper", "banach_upper", "visited"};

struct OmegaEstimate {
  int L = 0;
  Index horizon = 0;
  double tau = 0.0;
  std::vector<Word> words;
  std::vector<DensityQuad> quads;
  std::array<std::vector<Word>, 5> sets;
  std::vector<std::string> near_threshold;  // densities within the margin of tau
};

inline OmegaEstimate statistical_omega(const ShiftModel& model, const LazyPoint& x, int L, Index horizon, double tau,
                                       Index min_window = 0, double margin = -1.0) {
  if (margin < 0) margin = tau / 10.0;
  const Index mw = min_window > 0 ? min_window : default_min_window(horizon);
  OmegaEstimate est;
  est.L = L;
  est.horizon = horizon;
  est.tau = tau;
  est.words = enumerate_words(model, L);
  const Word xs = x.prefix(horizon + 1 + L);
  const Rational t(tau);
  for (const auto& w : est.words) {
    IndexSet S;
    for (Index n = 1; n <= horizon; ++n)
      if (std::equal(w.begin(), w.end(), xs.begin() + n)) S.push_back(n);
    DensityQuad dq = density_quad(S, horizon, mw);
    const std::array<Rational, 4> vals{dq.banach_lower, dq.lower, dq.upper, dq.banach_upper};
    for (std::size_t k = 0; k < 4; ++k) {
      if (vals[k] >= t) est.sets[k].push_back(w);
      if (std::fabs(to_double(vals[k]) - tau) <= margin)
        est.near_threshold.push_back(format_word(w) + ":" + kOmegaKinds[k]);
    }
    if (!S.empty()) est.sets[4].push_back(w);
    est.quads.push_back(dq);
  }
  return est;
}

struct CaseSignature {
  std::string label;
  bool banach_lower_empty = false;
  std::array<char, 4> relations{};  // '=' or '<' between consecutive sets
};

inline CaseSignature case_signature(const OmegaEstimate& est) {
  if (!est.near_threshold.empty())
    fail(ErrorCode::IndeterminateSignature, "density near threshold: " + est.near_threshold.front());
  CaseSignature sig;
  sig.banach_lower_empty = est.sets[0].empty();
  for (std::size_t k = 0; k < 4; ++k) {
    const std::set<Word> a(est.sets[k].begin(), est.sets[k].end());
    const std::set<Word> b(est.sets[k + 1].begin(), est.sets[k + 1].end());
    if (!std::includes(b.begin(), b.end(), a.begin(), a.end()))
      fail(ErrorCode::IndeterminateSignature, "estimates are not nested");
    sig.relations[k] = (a == b) ? '=' : '<';
  }
  const std::string pat(sig.relations.begin(), sig.relations.begin() + 3);
  const bool primed = sig.relations[3] == '<';
  if (pat == "===" && !primed && !est.sets[0].empty()) {
    sig.label = "minimal-like, none of (1)-(6')";
    return sig;
  }
  std::string base;
  if (pat == "<==") base = "1";
  else if (pat == "<=<") base = "2";
  else if (pat == "=<=") base = "3";
  else if (pat == "<<=") base = "4";
  else if (pat == "=<<") base = "5";
  else if (pat == "<<<") base = "6";
  if (base.empty()) {
    sig.label = "outside Cases (1)-(6')";
    return sig;
  }
  sig.label = "Case (" + base + (primed ? "')" : ")");
  return sig;
}

enum class CatalogItem { A, B, C };

struct TargetCatalog {
  CatalogItem item = CatalogItem::A;
  std::array<MeasureChain, 9> chains;
  std::vector<CylinderMeasure> nu;  // the truncated sequence, nu[0] = nu_1
  std::vector<std::string> provenance;
  int i_max = 6;
  double truncation_diameter = 0.0;  // d(nu_{i_max}, first vertex)
  double truncation_bound = 0.0;     // 1 / i_max
};

namespace detail {

inline std::set<Word> support_estimate(const CylinderMeasure& mu) {
  std::set<Word> s;
  for (const auto& w : mu.words_of_length(mu.max_length()))
    if (mu.weight(w) > 0) s.insert(w);
  return s;
}

inline void check_disjoint_supports(const std::vector<CylinderMeasure>& mus) {
  for (std::size_t i = 0; i < mus.size(); ++i)
    for (std::size_t j = i + 1; j < mus.size(); ++j) {
      const auto a = support_estimate(mus[i]);
      const auto b = support_estimate(mus[j]);
      for (const auto& w : a)
        if (b.count(w))
          fail(ErrorCode::SupportOverlap, "measures " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                                              " share [" + format_word(w) + "]");
    }
}

inline void check_full_support(const CylinderMeasure& mu) {
  for (int s = 0; s < mu.q(); ++s)
    if (mu.weight(Word{static_cast<Symbol>(s)}) <= 0)
      fail(ErrorCode::NotFullSupport, "no weight on [" + std::string(1, symbol_char(static_cast<Symbol>(s))) + "]");
}

inline MeasureChain path(std::initializer_list<const CylinderMeasure*> vs) {
  std::vector<CylinderMeasure> out;
  for (const auto* v : vs) out.push_back(*v);
  return chain_from_measures(std::move(out));
}

// nu_i = ((i-1)/i) base + (1/i) extra_i for i = 1..i_max.
inline std::vector<CylinderMeasure> averaged_sequence(const CylinderMeasure& base,
                                                      const std::vector<CylinderMeasure>& extra, int i_max,
                                                      const std::string& sym, const std::string& base_name,
                                                      const std::string& extra_name, std::vector<std::string>& prov) {
  std::vector<CylinderMeasure> nu;
  const int n = static_cast<int>(extra.size());
  for (int i = 1; i <= i_max; ++i) {
    int src = i;
    std::string note;
    if (i > n) {
      src = 2 + (i - 2) % (n - 1);  // cycles through extra_2..extra_n
      note = " (" + extra_name + "_" + std::to_string(i) + " not supplied, reused " + extra_name + "_" +
             std::to_string(src) + ")";
    }
    nu.push_back(convex_combine(base, extra[static_cast<std::size_t>(src - 1)], ratio(i - 1, i)));
    prov.push_back(sym + "_" + std::to_string(i) + " = " + std::to_string(i - 1) + "/" + std::to_string(i) + " " +
                   base_name + " + 1/" + std::to_string(i) + " " + extra_name + "_" + std::to_string(src) + note);
  }
  return nu;
}

}  // namespace detail

// Chains K_1..K_9 for item (a) (and (b) when `item_b`). mus holds mu_1..mu_n, n >= 3.
inline TargetCatalog target_catalog(const std::vector<CylinderMeasure>& mus, const CylinderMeasure& mu_full,
                                    int i_max = 6, bool item_b = false, int depth = kDefaultMetricDepth) {
  if (mus.size() < 3) fail(ErrorCode::InvalidArgument, "need at least mu_1, mu_2, mu_3");
  if (i_max < 2) fail(ErrorCode::InvalidArgument, "i_max must be at least 2");
  for (std::size_t i = 0; i < mus.size(); ++i)
    for (std::size_t j = i + 1; j < mus.size(); ++j)
      if (mus[i] == mus[j]) fail(ErrorCode::SupportOverlap, "measures must be pairwise distinct");
  detail::check_disjoint_supports(mus);
  detail::check_full_support(mu_full);
  TargetCatalog cat;
  cat.item = item_b ? CatalogItem::B : CatalogItem::A;
  cat.i_max = i_max;
  cat.nu = detail::averaged_sequence(mus[0], mus, std::max(i_max, 3), "nu", "mu_1", "mu", cat.provenance);
  const auto& m1 = mus[0];
  const auto& m2 = mus[1];
  const auto& m3 = mus[2];
  const auto& n2 = cat.nu[1];
  const auto& n3 = cat.nu[2];
  cat.chains[0] = detail::path({&m1, &mu_full});
  cat.chains[1] = detail::path({&mu_full, &m1, &m2});
  std::vector<CylinderMeasure> k3(cat.nu.begin(), cat.nu.begin() + i_max);
  cat.chains[2] = chain_from_measures(k3);
  std::vector<CylinderMeasure> k4{m2};
  k4.insert(k4.end(), k3.begin(), k3.end());
  cat.chains[3] = chain_from_measures(k4);
  if (item_b) {
    const CylinderMeasure mix = convex_combine(m1, m2, Rational(1, 3));
    cat.chains[4] = detail::path({&n2, &mix});
  } else {
    cat.chains[4] = detail::path({&m1});
  }
  cat.chains[5] = detail::path({&m1, &n2});
  cat.chains[6] = detail::path({&m1, &m2});
  cat.chains[7] = detail::path({&n2, &m1, &n3});
  cat.chains[8] = detail::path({&m2, &m1, &m3});
  cat.truncation_diameter = weakstar_distance(cat.nu[static_cast<std::size_t>(i_max - 1)], m1, depth);
  cat.truncation_bound = 1.0 / i_max;
  return cat;
}

// Item (c): nus are the level measures nu_1..nu_n (n >= 3), rho_1, rho_2 and a
// fully supported mu, all supplied by the caller with the same integral.
inline TargetCatalog target_catalog_level(const std::vector<CylinderMeasure>& nus, const CylinderMeasure& rho1,
                                          const CylinderMeasure& rho2, const CylinderMeasure& mu, int i_max = 6,
                                          int depth = kDefaultMetricDepth) {
  if (nus.size() < 3) fail(ErrorCode::InvalidArgument, "need at least nu_1, nu_2, nu_3");
  if (i_max < 2) fail(ErrorCode::InvalidArgument, "i_max must be at least 2");
  detail::check_full_support(mu);
  TargetCatalog cat;
  cat.item = CatalogItem::C;
  cat.i_max = i_max;
  cat.nu = detail::averaged_sequence(nus[0], nus, i_max, "omega", "nu_1", "nu", cat.provenance);
  const auto& v1 = nus[0];
  const auto& v2 = nus[1];
  const auto& v3 = nus[2];
  cat.chains[0] = detail::path({&v1, &mu});
  cat.chains[1] = detail::path({&mu, &v1, &v2});
  cat.chains[2] = chain_from_measures(cat.nu);
  std::vector<CylinderMeasure> k4{v2};
  k4.insert(k4.end(), cat.nu.begin(), cat.nu.end());
  cat.chains[3] = chain_from_measures(k4);
  cat.chains[4] = detail::path({&v1});
  cat.chains[5] = detail::path({&v1, &rho1});
  cat.chains[6] = detail::path({&v1, &v2});
  cat.chains[7] = detail::path({&rho1, &v1, &rho2});
  cat.chains[8] = detail::path({&v1, &v2, &v3});
  cat.truncation_diameter = weakstar_distance(cat.nu.back(), v1, depth);
  cat.truncation_bound = 1.0 / i_max;
  return cat;
}

}  // namespace scramble
