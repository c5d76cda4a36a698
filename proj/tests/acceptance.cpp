// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include <chrono>
#include <iostream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "scramble/scramble.hpp"

using namespace scramble;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct FamilyRun {
  ScrambleFamily fam;
  FamilyReport rep;
  double zeta = 0;
  double seconds = 0;
};

FamilyRun build_golden_family() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto in = fixture::golden_inputs();
  FamilyRun run{build_scramble_family(in, fixture::config(3)), {}, in.pair1->zeta, 0};
  FamilyTolerances tol = fixture::burn_in(run.fam);
  tol.t_grid = {0.5, 0.25, 0.1};
  tol.t0 = {0.4};
  tol.tol_high = 0.1;
  tol.tol_low = 0.1;
  tol.jobs = 1;
  run.rep = verify_family(run.fam, tol);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

const ClauseResult& clause(const FamilyReport& r, const std::string& name) {
  for (const auto& c : r.clauses)
    if (c.name == name) return c;
  fail(ErrorCode::InvalidArgument, "no clause " + name);
}

Outcome family_build(const FamilyRun& run) {
  Outcome o;
  std::size_t dc1 = 0;
  for (const auto& p : run.rep.pairs) dc1 += p.report.verdict;
  o.pass = run.fam.points.size() == 8 && run.rep.pairs.size() == 28 && dc1 == 28 && run.rep.passed &&
           run.fam.horizon() <= 1000000 && run.seconds < 120 && run.zeta >= 0.75 && !run.fam.truncated;
  std::ostringstream s;
  s << run.fam.points.size() << " points, " << dc1 << "/" << run.rep.pairs.size() << " pairs DC1, horizon "
    << run.fam.horizon() << ", zeta " << run.zeta << ", " << run.seconds << " s";
  for (const auto& c : run.rep.clauses)
    if (!c.pass) s << "; failed " << c.name << " (" << c.detail << ")";
  o.detail = s.str();
  return o;
}

Outcome measure_tracking(const FamilyRun& run) {
  std::size_t bad = 0;
  double worst = 0;
  const double trunc = truncation_bound(run.fam.metric_depth);
  for (const auto& s : run.rep.tracking) {
    const auto& st = run.fam.markers.stages[static_cast<std::size_t>(s.stage - 1)];
    const double bound = 3 * st.eps + 5 * to_double(st.delta) + trunc;
    bad += !(s.dist <= bound);
    worst = std::max(worst, s.dist);
  }
  std::ostringstream d;
  d << run.rep.tracking.size() << " checkpoints, " << bad << " violations, worst distance " << worst;
  return {bad == 0 && !run.rep.tracking.empty() && clause(run.rep, "tracking").pass, d.str()};
}

Outcome mu_pair_audit() {
  const auto gm = ShiftModel::golden_mean();
  const auto mu = periodic_measure(parse_word("01"), 4, &gm);
  const auto dp = distal_pair_from_periodic(parse_word("01"), 1);
  const auto mp = lemma_mu_pair(gm, mu, mu, 1, 0.1, Rational(1, 4), dp, dp);
  const auto au = audit_mu_pair(mp, 100000);
  const double bound = 0.1 + 0.25 + truncation_bound(kDefaultMetricDepth);
  std::ostringstream d;
  d << "n in (" << au.from << ", " << au.horizon << "]: close fraction " << au.max_close_fraction
    << ", target distance " << au.max_target_distance << " (bound " << bound << ")";
  return {au.horizon == 100000 && au.max_close_fraction < 0.25 && au.max_target_distance <= bound, d.str()};
}

Outcome lphi_exactness() {
  std::mt19937_64 rng(314159);
  int graphs = 0, mismatches = 0;
  while (graphs < 100) {
    const int q = static_cast<int>(rng() % 5) + 2;
    BoolMatrix a(static_cast<std::size_t>(q), std::vector<std::uint8_t>(static_cast<std::size_t>(q)));
    for (auto& row : a)
      for (auto& e : row) e = (rng() % 5) < 2;
    if (!primitivity_exponent(a)) continue;
    // the m-block graph has at most 6 nodes
    const int m = (q == 2 && rng() % 2) ? 2 : 1;
    const auto model = ShiftModel::sft(a);
    std::map<Word, Rational> vals;
    for (const auto& w : enumerate_words(model, m))
      vals[w] = ratio(static_cast<long>(rng() % 41) - 20, static_cast<long>(rng() % 12) + 1);
    const auto got = lphi_interval(model, LocalObservable::from_map(q, m, vals));
    const auto want = oracle::simple_cycle_extremes(a, m, vals);
    mismatches += !(got.lo == want.lo && got.hi == want.hi);
    ++graphs;
  }
  const auto g = lphi_interval(ShiftModel::golden_mean(), LocalObservable::first_coordinate(2));
  const bool golden = g.lo == 0 && g.hi == Rational(1, 2);
  std::ostringstream d;
  d << mismatches << " mismatches on " << graphs << " graphs; golden mean [" << to_string(g.lo) << ", "
    << to_string(g.hi) << "]";
  return {mismatches == 0 && golden, d.str()};
}

Outcome density_oracle() {
  std::mt19937_64 rng(2718);
  const Index h = 2000;
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const double p = std::uniform_real_distribution<double>(0, 1)(rng);
    const Index mw = static_cast<Index>(rng() % (h / 2)) + 1;
    IndexSet s;
    for (Index i = 1; i <= h; ++i)
      if (std::uniform_real_distribution<double>(0, 1)(rng) < p) s.push_back(i);
    const auto got = density_quad(s, h, mw);
    const auto want = oracle::all_window_quad(s, h, mw);
    mismatches += !(got.upper == want.upper && got.lower == want.lower && got.banach_upper == want.banach_upper &&
                    got.banach_lower == want.banach_lower);
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches on 200 sets at horizon 2000"};
}

Outcome parry_fuzz() {
  std::mt19937_64 rng(1618);
  const std::vector<BetaParams> betas{make_beta_params(1.5), make_beta_params(1.8),
                                      make_beta_params(1.6180339887498949)};
  std::uniform_real_distribution<double> unit(0, 1);
  int greedy_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& p = betas[static_cast<std::size_t>(trial) % betas.size()];
    const Word d = greedy_expansion(Rational(unit(rng)), p, static_cast<int>(rng() % 40) + 1);
    for (std::size_t n = 1; n <= d.size(); ++n) greedy_bad += !parry_admissible(Word(d.begin(), d.begin() + n), p);
  }
  int increments = 0, accepted = 0;
  for (std::size_t t = 0; increments < 1000; ++t) {
    const auto& p = betas[t % betas.size()];
    Word w = greedy_expansion(Rational(unit(rng)), p, static_cast<int>(rng() % 30) + 2);
    const std::size_t j = rng() % w.size();
    if (w[j] >= p.b) continue;
    ++w[j];
    if (oracle::beta_word_allowed(w, p.beta_exact)) continue;
    ++increments;
    try {
      accepted += parry_admissible(w, p);
    } catch (const Error&) {
      ++accepted;
    }
  }
  int nested = 0, nesting_bad = 0;
  while (nested < 1000) {
    Word w(rng() % 30 + 1);
    for (auto& s : w) s = static_cast<Symbol>(rng() % 3 == 0);
    if (!parry_admissible(w, betas[0])) continue;
    ++nested;
    nesting_bad += !parry_admissible(w, betas[1]);
  }
  std::ostringstream d;
  d << greedy_bad << " greedy prefixes rejected, " << accepted << " of " << increments
    << " order-breaking increments accepted, " << nesting_bad << " nesting failures of " << nested;
  return {greedy_bad == 0 && accepted == 0 && nesting_bad == 0, d.str()};
}

CylinderMeasure random_measure(std::mt19937_64& rng) {
  Word xs(rng() % 200 + 4);
  const unsigned bias = static_cast<unsigned>(rng() % 9) + 1;
  for (auto& s : xs) s = static_cast<Symbol>(rng() % 10 < bias);
  const Index n = static_cast<Index>(xs.size()) - 3;
  return empirical_measure(LazyPoint::prefix_periodic(xs, {0}, 2), n, 4);
}

Outcome metric_axioms() {
  std::mt19937_64 rng(99);
  const int depth = kDefaultMetricDepth;
  int sym = 0, tri = 0, ident = 0, zeros = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto a = random_measure(rng);
    const auto b = rng() % 5 == 0 ? a : random_measure(rng);
    const auto c = random_measure(rng);
    const double ab = weakstar_distance(a, b, depth), ba = weakstar_distance(b, a, depth);
    const double bc = weakstar_distance(b, c, depth), ac = weakstar_distance(a, c, depth);
    sym += ab != ba || weakstar_distance_exact(a, b, depth) != weakstar_distance_exact(b, a, depth);
    tri += ac > ab + bc + 1e-12;
    const bool zero = weakstar_distance_exact(a, b, depth) == 0;
    zeros += zero;
    ident += zero != (a == b);
  }
  std::ostringstream d;
  d << "10000 triples: " << sym << " asymmetric, " << tri << " triangle violations, " << ident
    << " identity violations (" << zeros << " coincident pairs)";
  return {sym == 0 && tri == 0 && ident == 0 && zeros > 0, d.str()};
}

// Average of the point masses at f^j y for j in J, at cylinder length m.
CylinderMeasure subset_average(const LazyPoint& y, const std::vector<Index>& J, int m) {
  CylinderMeasure out(y.q(), m);
  for (Index j : J) {
    const auto pm = point_mass(y.shifted(j), m);
    for (std::size_t k = 0; k < out.size(); ++k) out.raw()[k] += pm.raw()[k];
  }
  const Rational inv = ratio(1, static_cast<long>(J.size()));
  for (auto& r : out.raw()) r *= inv;
  return out;
}

Outcome lemma_close_averages() {
  std::mt19937_64 rng(31);
  const int depth = kDefaultMetricDepth;
  const int m = 4;
  int bad_a = 0, bad_b = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Word pre(rng() % 10), tail(rng() % 6 + 1);
    for (auto& s : pre) s = static_cast<Symbol>(rng() % 2);
    for (auto& s : tail) s = static_cast<Symbol>(rng() % 2);
    const auto x = LazyPoint::prefix_periodic(pre, tail, 2);
    const Index n = static_cast<Index>(rng() % 80 + 1);
    // y is x with a few flipped coordinates, mostly far beyond n
    Word ys = x.prefix(n + 40);
    for (int f = static_cast<int>(rng() % 3) + 1; f > 0; --f) {
      const std::size_t at = rng() % 4 == 0 ? rng() % ys.size() : n + rng() % 40;
      ys[at] = static_cast<Symbol>(1 - ys[at]);
    }
    const auto y = LazyPoint::prefix_periodic(ys, tail, 2);

    double eps = 0;
    for (Index i = 0; i < n; ++i) eps = std::max(eps, point_distance(x.shifted(i), y.shifted(i), depth));
    const Rational da = weakstar_distance_exact(empirical_measure(x, n, m), empirical_measure(y, n, m), depth);
    bad_a += da > Rational(eps);

    std::vector<Index> J;
    const unsigned drop = static_cast<unsigned>(rng() % 30);
    for (Index i = 0; i < n; ++i)
      if (rng() % 100 >= drop) J.push_back(i);
    if (J.empty()) J.push_back(static_cast<Index>(rng() % static_cast<std::uint64_t>(n)));
    double eps_j = 0;
    for (Index j : J) eps_j = std::max(eps_j, point_distance(x.shifted(j), y.shifted(j), depth));
    const Rational deficiency = ratio(n - static_cast<Index>(J.size()), n);
    const Rational db = weakstar_distance_exact(empirical_measure(x, n, m), subset_average(y, J, m), depth);
    bad_b += db > Rational(eps_j) + 2 * deficiency;
  }
  std::ostringstream d;
  d << "1000 instances: " << bad_a << " violations of (a), " << bad_b << " violations of (b)";
  return {bad_a == 0 && bad_b == 0, d.str()};
}

Outcome recurrence_classification(const FamilyRun& run) {
  const auto& gm = run.fam.model;
  const double ball = truncation_bound(kDefaultMetricDepth);
  const RecurrenceThresholds th{0.01, 0, 6};
  const auto per = classify_recurrence(gm, LazyPoint::periodic(parse_word("01"), 2), ball, 4096, kDefaultMetricDepth, th);
  std::ostringstream d;
  bool pass = per.ap_consistent();
  d << "(01)^inf " << label_name(per.label);
  const auto all4 = enumerate_words(gm, 4);
  const Index h = run.fam.horizon();
  for (const auto& [xi, x] : run.fam.points) {
    const auto rc = classify_recurrence(gm, x, ball, h, kDefaultMetricDepth, th);
    const auto est = statistical_omega(gm, x, 4, h, 0.01);
    std::string sig;
    try {
      sig = case_signature(est).label;
    } catch (const Error& e) {
      sig = std::string(error_name(e.code()));
    }
    const bool ok = rc.br_consistent() && !rc.ap_consistent() && rc.transitivity >= 0.99 && est.sets[3] == all4 &&
                    est.sets[0].empty();
    pass = pass && ok;
    d << "; x" << xi << " " << label_name(rc.label) << " transitivity " << rc.transitivity << " |B*|="
      << est.sets[3].size() << "/" << all4.size() << " |B_*|=" << est.sets[0].size() << " " << sig;
  }
  return {pass, d.str()};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.detail << std::endl;
  };

  std::optional<FamilyRun> run;
  std::string build_error;
  try {
    run = build_golden_family();
  } catch (const std::exception& e) {
    build_error = e.what();
  }
  auto need_family = [&]() -> const FamilyRun& {
    if (!run) throw std::runtime_error("family build failed: " + build_error);
    return *run;
  };

  report(1, "golden-mean scrambled family", [&] { return family_build(need_family()); });
  report(2, "measure tracking", [&] { return measure_tracking(need_family()); });
  report(3, "mu-pair audit", mu_pair_audit);
  report(4, "L_phi exactness", lphi_exactness);
  report(5, "density oracle", density_oracle);
  report(6, "Parry fuzz", parry_fuzz);
  report(7, "metric axioms", metric_axioms);
  report(8, "recurrence classification", [&] { return recurrence_classification(need_family()); });
  report(9, "close orbits give close averages", lemma_close_averages);
  return failed == 0 ? 0 : 1;
}
