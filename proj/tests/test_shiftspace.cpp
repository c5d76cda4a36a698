#include <gtest/gtest.h>

#include <random>

#include "scramble/scramble.hpp"

using namespace scramble;

namespace {

// Cylinder words in canonical order, generated independently of CylinderIndex.
std::vector<Word> canonical_words(int q, int count) {
  std::vector<Word> out;
  std::vector<Word> level{{}};
  while (static_cast<int>(out.size()) < count) {
    std::vector<Word> next;
    for (const auto& w : level)
      for (int s = 0; s < q; ++s) {
        Word v = w;
        v.push_back(static_cast<Symbol>(s));
        next.push_back(v);
      }
    for (const auto& w : next)
      if (static_cast<int>(out.size()) < count) out.push_back(w);
    level = next;
  }
  return out;
}

double oracle_distance(const Word& x, const Word& y, int q, int depth) {
  double d = 0.0;
  const auto words = canonical_words(q, depth);
  for (int k = 1; k <= depth; ++k) {
    const Word& w = words[static_cast<std::size_t>(k - 1)];
    const bool fx = std::equal(w.begin(), w.end(), x.begin());
    const bool fy = std::equal(w.begin(), w.end(), y.begin());
    d += std::ldexp(std::abs(double(fx) - double(fy)), -k);
  }
  return d;
}

LazyPoint random_point(std::mt19937_64& rng, int q) {
  std::uniform_int_distribution<int> len(0, 5);
  std::uniform_int_distribution<int> sym(0, q - 1);
  Word pre(static_cast<std::size_t>(len(rng)));
  Word tail(static_cast<std::size_t>(len(rng) + 1));
  for (auto& s : pre) s = static_cast<Symbol>(sym(rng));
  for (auto& s : tail) s = static_cast<Symbol>(sym(rng));
  return LazyPoint::prefix_periodic(pre, tail, q);
}

}  // namespace

TEST(Words, ParseAndFormatRoundTrip) {
  EXPECT_EQ(format_word(parse_word("0120a")), "0120a");
  EXPECT_THROW(parse_word("01-"), Error);
  EXPECT_THROW(check_symbols(parse_word("012"), 2), Error);
}

TEST(Admissibility, FullShiftAcceptsEverything) {
  EXPECT_TRUE(word_admissible(ShiftModel::full(2), parse_word("0110")));
}

TEST(Admissibility, GoldenMeanRejectsForbiddenPair) {
  EXPECT_FALSE(word_admissible(ShiftModel::golden_mean(), parse_word("0110")));
}

TEST(Admissibility, GoldenMeanMatchesAdjacencyWalk) {
  const auto gm = ShiftModel::golden_mean();
  EXPECT_TRUE(word_admissible(gm, parse_word("01010")));
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    Word w(static_cast<std::size_t>(rng() % 12 + 1));
    for (auto& s : w) s = static_cast<Symbol>(rng() % 2);
    // walk the adjacency matrix by hand: 1 may only be followed by 0
    bool ok = true;
    for (std::size_t i = 1; i < w.size(); ++i) ok = ok && !(w[i - 1] == 1 && w[i] == 1);
    EXPECT_EQ(word_admissible(gm, w), ok) << format_word(w);
  }
}

TEST(Admissibility, SymbolOutOfRange) {
  EXPECT_THROW(word_admissible(ShiftModel::full(2), parse_word("012")), Error);
}

TEST(Models, NonMixingSftRejected) {
  EXPECT_THROW(ShiftModel::sft({{1, 0}, {0, 1}}), Error);
  EXPECT_THROW(ShiftModel::sft({{0, 1}, {1, 0}}), Error);  // periodic, not aperiodic
  EXPECT_NO_THROW(ShiftModel::sft({{1, 1}, {1, 0}}));
}

TEST(Models, PrimitivityExponent) {
  EXPECT_EQ(primitivity_exponent({{1, 1}, {1, 0}}), 2);
  EXPECT_EQ(primitivity_exponent({{1, 1}, {1, 1}}), 1);
  EXPECT_FALSE(primitivity_exponent({{0, 1}, {1, 0}}).has_value());
}

TEST(Models, EnumerationCountsFollowFibonacci) {
  const auto gm = ShiftModel::golden_mean();
  std::size_t a = 2, b = 3;
  EXPECT_EQ(enumerate_words(gm, 1).size(), 2u);
  EXPECT_EQ(enumerate_words(gm, 2).size(), 3u);
  for (int len = 3; len <= 10; ++len) {
    const std::size_t c = a + b;
    EXPECT_EQ(enumerate_words(gm, len).size(), c);
    a = b;
    b = c;
  }
  const auto w3 = enumerate_words(gm, 3);
  EXPECT_TRUE(std::is_sorted(w3.begin(), w3.end()));
}

TEST(Points, PrefixPeriodicWindows) {
  const auto x = LazyPoint::prefix_periodic(parse_word("01"), parse_word("0"), 2);
  EXPECT_EQ(format_word(orbit_window(x, 0, 3)), "0100");
  const auto y = LazyPoint::periodic(parse_word("01"), 2);
  EXPECT_EQ(format_word(orbit_window(y, 3, 4)), "10");
  EXPECT_THROW(LazyPoint::prefix_periodic(parse_word("0"), {}, 2), Error);
}

TEST(Points, WindowConcatenation) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_point(rng, 3);
    const Index a = static_cast<Index>(rng() % 20);
    const Index b = a + static_cast<Index>(rng() % 20);
    const Index c = b + 1 + static_cast<Index>(rng() % 20);
    EXPECT_EQ(concat(orbit_window(x, a, b), orbit_window(x, b + 1, c)), orbit_window(x, a, c));
  }
}

TEST(Points, ShiftedMatchesWindow) {
  const auto x = LazyPoint::prefix_periodic(parse_word("00110"), parse_word("101"), 2);
  for (Index k = 0; k < 12; ++k) EXPECT_EQ(x.shifted(k).prefix(9), x.window(k, k + 8));
}

TEST(Points, GluedPlanEvaluation) {
  // [0,3) from (01)^inf, literal "11" on [3,5), then 0^inf from offset 0.
  const auto src = LazyPoint::periodic(parse_word("01"), 2);
  const auto zero = LazyPoint::periodic(parse_word("0"), 2);
  std::vector<Piece> pieces(3);
  pieces[0] = {0, 3, PieceKind::Source, {}, src.plan_ptr(), 0};
  pieces[1] = {3, 5, PieceKind::Literal, parse_word("11"), nullptr, 0};
  pieces[2] = {5, kUnbounded, PieceKind::Source, {}, zero.plan_ptr(), 0};
  const auto x = LazyPoint::glued(pieces, 2);
  EXPECT_EQ(format_word(x.prefix(9)), "010110000");
  EXPECT_EQ(format_word(x.window(2, 6)), "01100");
}

TEST(Points, UnresolvedGapThrows) {
  const auto src = LazyPoint::periodic(parse_word("01"), 2);
  std::vector<Piece> pieces(3);
  pieces[0] = {0, 3, PieceKind::Source, {}, src.plan_ptr(), 0};
  pieces[1] = {3, 5, PieceKind::Unresolved, {}, nullptr, 0};
  pieces[2] = {5, kUnbounded, PieceKind::Source, {}, src.plan_ptr(), 0};
  const auto x = LazyPoint::glued(pieces, 2);
  EXPECT_EQ(format_word(x.window(0, 2)), "010");
  try {
    x.window(2, 4);
    FAIL() << "expected UnresolvedPlan";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnresolvedPlan);
  }
}

TEST(Metric, SelfDistanceIsZero) {
  const auto x = LazyPoint::periodic(parse_word("011"), 2);
  for (int d : {1, 6, 24}) EXPECT_EQ(point_distance(x, x, d), 0.0);
}

TEST(Metric, ConstantPointsHandSum) {
  const auto x0 = LazyPoint::periodic(parse_word("0"), 2);
  const auto x1 = LazyPoint::periodic(parse_word("1"), 2);
  EXPECT_DOUBLE_EQ(point_distance(x0, x1, 6), 0.5 + 0.25 + 0.125 + 0.015625);
}

TEST(Metric, FirstCoordinateDisagreementForcesThreeQuarters) {
  const auto p = LazyPoint::periodic(parse_word("01"), 2);
  const auto q = LazyPoint::periodic(parse_word("10"), 2);
  for (int d = 2; d <= 40; ++d) EXPECT_GE(point_distance(p, q, d), 0.75);
}

TEST(Metric, MatchesCylinderOracle) {
  std::mt19937_64 rng(3);
  for (int q : {2, 3}) {
    for (int trial = 0; trial < 300; ++trial) {
      const auto x = random_point(rng, q);
      const auto y = random_point(rng, q);
      for (int depth : {1, 5, 24, 39}) {
        const double got = point_distance(x, y, depth);
        const double want = oracle_distance(x.prefix(8), y.prefix(8), q, depth);
        EXPECT_DOUBLE_EQ(got, want);
      }
    }
  }
}

TEST(Metric, SymmetryTriangleAndDepthMonotonicity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto x = random_point(rng, 2);
    const auto y = random_point(rng, 2);
    const auto z = random_point(rng, 2);
    EXPECT_EQ(point_distance(x, y), point_distance(y, x));
    EXPECT_LE(point_distance(x, z), point_distance(x, y) + point_distance(y, z));
    const double d1 = point_distance(x, y, 10);
    const double d2 = point_distance(x, y, 30);
    EXPECT_LE(d1, d2);
    EXPECT_LE(d2, d1 + truncation_bound(10));
  }
}

TEST(Metric, AlphabetMismatch) {
  EXPECT_THROW(point_distance(LazyPoint::periodic({0}, 2), LazyPoint::periodic({0}, 3)), Error);
}

TEST(CylinderIndex, RoundTripsCanonicalOrder) {
  CylinderIndex ci(3, 100);
  const auto words = canonical_words(3, 100);
  for (int k = 1; k <= 100; ++k) {
    EXPECT_EQ(ci.word_of(k), words[static_cast<std::size_t>(k - 1)]);
    EXPECT_EQ(ci.index_of(words[static_cast<std::size_t>(k - 1)]), k);
  }
  EXPECT_EQ(CylinderIndex(2, 24).max_length(), 4);
}
