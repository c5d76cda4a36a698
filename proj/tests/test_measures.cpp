#include <gtest/gtest.h>

#include <map>
#include <random>

#include "scramble/scramble.hpp"

using namespace scramble;

namespace {

// Direct window count into a word -> count map.
std::map<Word, long> window_counts(const Word& xs, Index n, int len) {
  std::map<Word, long> c;
  for (Index i = 0; i < n; ++i) c[Word(xs.begin() + i, xs.begin() + i + len)]++;
  return c;
}

double grid_scan(const CylinderMeasure& nu, const MeasureChain& k, int depth, int steps) {
  double best = 1e9;
  for (std::size_t s = 0; s < k.segment_count(); ++s)
    for (int j = 0; j <= steps; ++j) {
      const auto mu = k.point(s, ratio(j, steps));
      best = std::min(best, weakstar_distance(nu, mu, depth));
    }
  return best;
}

}  // namespace

TEST(Weakstar, SelfDistanceZero) {
  const auto mu = periodic_measure(parse_word("0110"), 4);
  EXPECT_EQ(weakstar_distance(mu, mu, 24), 0.0);
}

TEST(Weakstar, ConstantOrbitsSixTerms) {
  const auto a = periodic_measure(parse_word("0"), 3);
  const auto b = periodic_measure(parse_word("1"), 3);
  EXPECT_EQ(weakstar_distance_exact(a, b, 6), Rational(57, 64));
  EXPECT_DOUBLE_EQ(weakstar_distance(a, b, 6), 0.890625);
}

TEST(Weakstar, SameOrbitSameMeasure) {
  EXPECT_EQ(weakstar_distance(periodic_measure(parse_word("01"), 4), periodic_measure(parse_word("10"), 4), 24), 0.0);
}

TEST(Weakstar, DepthExceeded) {
  const auto a = periodic_measure(parse_word("01"), 2);
  try {
    weakstar_distance(a, a, 24);  // needs words of length 4
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DepthExceeded);
  }
  EXPECT_NO_THROW(weakstar_distance(a, a, 6));
}

TEST(Empirical, ConstantPoint) {
  const auto mu = empirical_measure(LazyPoint::periodic({0}, 2), 17, 1);
  EXPECT_EQ(mu.weight({0}), 1);
  EXPECT_EQ(mu.weight({1}), 0);
}

TEST(Empirical, AlternatingCounts) {
  const auto x = LazyPoint::periodic(parse_word("01"), 2);
  const auto mu = empirical_measure(x, 2, 2);
  EXPECT_EQ(mu.weight(parse_word("01")), Rational(1, 2));
  EXPECT_EQ(mu.weight(parse_word("10")), Rational(1, 2));
  EXPECT_EQ(mu.weight(parse_word("00")), 0);
  const auto nu = empirical_measure(x, 3, 1);
  EXPECT_EQ(nu.weight({0}), Rational(2, 3));
  EXPECT_EQ(nu.weight({1}), Rational(1, 3));
}

TEST(Empirical, MatchesDirectCount) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    Word pre(rng() % 9), tail(rng() % 5 + 1);
    for (auto& s : pre) s = static_cast<Symbol>(rng() % 3);
    for (auto& s : tail) s = static_cast<Symbol>(rng() % 3);
    const auto x = LazyPoint::prefix_periodic(pre, tail, 3);
    const Index n = static_cast<Index>(rng() % 40 + 1);
    const auto mu = empirical_measure(x, n, 3);
    const Word xs = x.prefix(n + 3);
    for (int len = 1; len <= 3; ++len) {
      const auto c = window_counts(xs, n, len);
      for (const auto& w : mu.words_of_length(len)) {
        const auto it = c.find(w);
        EXPECT_EQ(mu.weight(w), ratio(it == c.end() ? 0 : it->second, n));
      }
    }
    EXPECT_NO_THROW(mu.validate());
  }
}

TEST(Empirical, StreamingCounterAgreesWithExact) {
  const auto x = LazyPoint::prefix_periodic(parse_word("1101"), parse_word("00101"), 2);
  EmpiricalCounter counter(2, 24);
  WindowStream ws(x, counter.lookahead(), 16);
  for (Index i = 0; i < 100; ++i) counter.push(ws.at(i));
  const auto exact = empirical_measure(x, 100, 4);
  for (int k = 1; k <= 24; ++k)
    EXPECT_EQ(ratio(counter.counts()[static_cast<std::size_t>(k)], 100), exact.by_index(k));
}

TEST(Periodic, WeightsFromOrbitAverage) {
  const auto zero = periodic_measure(parse_word("0"), 2);
  EXPECT_EQ(zero.weight(parse_word("00")), 1);
  const auto alt = periodic_measure(parse_word("01"), 2);
  EXPECT_EQ(alt.weight(parse_word("01")), Rational(1, 2));
  EXPECT_EQ(alt.weight(parse_word("10")), Rational(1, 2));
  const auto m = periodic_measure(parse_word("001"), 1);
  EXPECT_EQ(m.weight({0}), Rational(2, 3));
  EXPECT_EQ(m.weight({1}), Rational(1, 3));
}

TEST(Periodic, DenominatorDividesPeriod) {
  const auto mu = periodic_measure(parse_word("00101"), 3);
  for (const auto& r : mu.raw()) EXPECT_EQ(5 % mpz_class(r.get_den()), 0);
}

TEST(Periodic, NotSelfConcatenable) {
  const auto gm = ShiftModel::golden_mean();
  try {
    periodic_measure(parse_word("10"), 2, &gm);
    SUCCEED();
  } catch (...) {
    FAIL() << "10 repeats fine in the golden mean shift";
  }
  try {
    periodic_measure(parse_word("1"), 2, &gm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSelfConcatenable);
  }
}

TEST(Combine, EndpointsAndMidpoint) {
  const auto a = periodic_measure(parse_word("0"), 1);
  const auto b = periodic_measure(parse_word("1"), 1);
  EXPECT_EQ(convex_combine(a, b, 1), a);
  EXPECT_EQ(convex_combine(a, b, 0), b);
  const auto mid = convex_combine(a, b, Rational(1, 2));
  EXPECT_EQ(mid.weight({0}), Rational(1, 2));
  EXPECT_EQ(mid.weight({1}), Rational(1, 2));
  EXPECT_THROW(convex_combine(a, b, Rational(3, 2)), Error);
}

TEST(Combine, AffineInTheta) {
  const auto a = periodic_measure(parse_word("011"), 4);
  const auto b = periodic_measure(parse_word("0001"), 4);
  for (int j = 0; j <= 7; ++j) {
    const Rational t = ratio(j, 7);
    const auto c = convex_combine(a, b, t);
    EXPECT_NO_THROW(c.validate());
    for (int k = 1; k <= 24; ++k) EXPECT_EQ(c.by_index(k), t * a.by_index(k) + (1 - t) * b.by_index(k));
  }
}

TEST(Chain, OnChainIsZero) {
  const auto a = periodic_measure(parse_word("0"), 4);
  const auto b = periodic_measure(parse_word("1"), 4);
  const auto k = chain_from_measures({a, b});
  const auto d = dist_to_chain(convex_combine(a, b, Rational(1, 2)), k, 24);
  EXPECT_EQ(d.exact, 0);
  EXPECT_EQ(d.segment, 0u);
  EXPECT_EQ(d.theta, Rational(1, 2));
  EXPECT_EQ(dist_to_chain(b, k).value, 0.0);
}

TEST(Chain, AlternatingAgainstConstantsMatchesGridScan) {
  const auto k = chain_from_measures({periodic_measure(parse_word("0"), 4), periodic_measure(parse_word("1"), 4)});
  const auto nu = periodic_measure(parse_word("01"), 4);
  const auto d = dist_to_chain(nu, k, 24);
  EXPECT_GT(d.value, 0.0);
  EXPECT_NEAR(d.value, grid_scan(nu, k, 24, 10000), 1e-6);
}

TEST(Chain, RandomChainsMatchGridScan) {
  std::mt19937_64 rng(99);
  auto rand_word = [&] {
    Word w(rng() % 4 + 1);
    for (auto& s : w) s = static_cast<Symbol>(rng() % 2);
    return w;
  };
  for (int trial = 0; trial < 15; ++trial) {
    std::vector<CylinderMeasure> vs;
    const int nv = static_cast<int>(rng() % 3) + 1;
    for (int i = 0; i < nv; ++i) vs.push_back(periodic_measure(rand_word(), 4));
    const auto k = chain_from_measures(vs);
    const auto nu = periodic_measure(rand_word(), 4);
    const double got = dist_to_chain(nu, k).value;
    const double scan = grid_scan(nu, k, 24, 2000);
    EXPECT_LE(got, scan + 1e-12);
    EXPECT_GE(got, scan - 1e-3);  // the grid can miss a breakpoint by at most half a cell
  }
}

TEST(Chain, EmptyChain) {
  try {
    dist_to_chain(periodic_measure({0}, 4), MeasureChain{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyChain);
  }
}

TEST(Chain, FastChainAgreesWithExact) {
  const auto k = chain_from_words(ShiftModel::golden_mean(), {parse_word("01"), parse_word("001")}, 4);
  const FastChain fc(k, 24);
  const auto x = LazyPoint::prefix_periodic(parse_word("0100100"), parse_word("0001"), 2);
  for (Index n : {1, 5, 33, 200}) {
    const auto e = empirical_measure(x, n, 4);
    EXPECT_NEAR(fc.distance(visible_weights(e, 24)), dist_to_chain(e, k).value, 1e-12);
  }
}

TEST(AverageContinuity, CloseOrbitsGiveCloseAverages) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    // y agrees with x on its first L symbols at every index up to n
    Word tail(rng() % 6 + 1);
    for (auto& s : tail) s = static_cast<Symbol>(rng() % 2);
    const auto x = LazyPoint::periodic(tail, 2);
    const Index n = static_cast<Index>(rng() % 60 + 1);
    Word ys = x.prefix(n + 8);
    ys.push_back(static_cast<Symbol>(1 - ys.back()));
    const auto y = LazyPoint::prefix_periodic(ys, {0}, 2);
    double eps = 0;
    for (Index i = 0; i < n; ++i) eps = std::max(eps, point_distance(x.shifted(i), y.shifted(i)));
    EXPECT_LE(weakstar_distance(empirical_measure(x, n, 4), empirical_measure(y, n, 4)), eps + 1e-15);
  }
}
