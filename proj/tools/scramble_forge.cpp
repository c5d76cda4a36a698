// scramble_forge: command-line front end for the scramble library.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "scramble/json_io.hpp"
#include "scramble/scramble.hpp"

namespace fs = std::filesystem;
using namespace scramble;

namespace {

struct Common {
  std::string model_path;
  int metric_depth = kDefaultMetricDepth;
  std::string out;
  int jobs = 1;
  std::uint64_t seed = 1;
};

struct Emitter {
  const Common& common;
  Json config;

  Json wrap(Json body) const {
    Json j{{"schema", kSchema}, {"config_hash", config_hash(config)}, {"config", config},
           {"truncation_bound", truncation_bound(common.metric_depth)}};
    for (auto& [k, v] : body.items()) j[k] = v;
    return j;
  }

  void emit(const std::string& name, Json body) const {
    const std::string text = wrap(std::move(body)).dump(2) + "\n";
    if (common.out.empty()) {
      std::cout << text;
      return;
    }
    fs::create_directories(common.out);
    write_text((fs::path(common.out) / name).string(), text);
  }

  void emit_csv(const std::string& name, const std::string& text) const {
    if (common.out.empty()) return;
    fs::create_directories(fs::path(common.out) / fs::path(name).parent_path());
    write_text((fs::path(common.out) / name).string(), text);
  }
};

ShiftModel load_model(const Common& c) {
  if (c.model_path.empty()) return ShiftModel::golden_mean();
  return model_from_json(load_json_file(c.model_path));
}

// "0110|01" is prefix 0110 followed by (01)^inf; "01" alone is (01)^inf.
LazyPoint parse_point(const std::string& spec, const ShiftModel& model) {
  const auto bar = spec.find('|');
  Word prefix;
  Word tail;
  if (bar == std::string::npos) {
    tail = parse_word(spec);
  } else {
    prefix = parse_word(spec.substr(0, bar));
    tail = parse_word(spec.substr(bar + 1));
  }
  check_symbols(prefix, model.q());
  check_symbols(tail, model.q());
  if (!word_admissible(model, concat(concat(prefix, tail), tail)))
    fail(ErrorCode::InvalidArgument, "point '" + spec + "' is not admissible in the model");
  return LazyPoint::prefix_periodic(prefix, tail, model.q());
}

// Connector table (mixing gap and K-1 connectors for every symbol pair),
// reused across runs when SCRAMBLE_FORGE_CACHE names a directory.
Json connector_table(const ShiftModel& model) {
  const Json mj = model_to_json(model);
  const char* dir = std::getenv("SCRAMBLE_FORGE_CACHE");
  fs::path file;
  if (dir && *dir) {
    file = fs::path(dir) / ("connectors-" + config_hash(mj) + ".json");
    if (fs::exists(file)) {
      Json cached = load_json_file(file.string());
      if (cached.value("model", Json()) == mj) return cached;
    }
  }
  const Index gap = mixing_gap(model);
  Json table = Json::object();
  for (int u = 0; u < model.q(); ++u)
    for (int v = 0; v < model.q(); ++v) {
      const std::string key = std::string(1, symbol_char(static_cast<Symbol>(u))) + symbol_char(static_cast<Symbol>(v));
      table[key] = format_word(connect(model, static_cast<Symbol>(u), static_cast<Symbol>(v), gap - 1));
    }
  Json j{{"model", mj}, {"mixing_gap", gap}, {"connectors", table}};
  if (!file.empty()) {
    fs::create_directories(file.parent_path());
    write_text(file.string(), j.dump(2) + "\n");
  }
  return j;
}

struct BuildOptions {
  std::string chain_path;
  std::vector<std::string> chain_words{"01", "001"};
  std::string mu1 = "01";
  std::string mu2 = "01";
  std::string theta = "1";
  std::string pair1 = "01";
  std::string pair2 = "01";
  Index shift1 = 1;
  Index shift2 = 1;
  std::string base = "0";
  int depth = 3;
  Index horizon = 1'000'000;
  double eps = 0.0;
  double rho = FamilyConfig{}.witness_ratio;
};

// Subcommands with their own --horizon and --eps take the family ones under a prefix.
void add_build_options(CLI::App* app, BuildOptions& b, const std::string& prefix = "") {
  app->add_option("--chain", b.chain_path, "chain JSON file (default: periodic words from --chain-words)");
  app->add_option("--chain-words", b.chain_words, "periodic generators of the chain vertices");
  app->add_option("--mu1", b.mu1, "periodic word of mu_1");
  app->add_option("--mu2", b.mu2, "periodic word of mu_2");
  app->add_option("--theta", b.theta, "mu = theta mu_1 + (1 - theta) mu_2");
  app->add_option("--pair1", b.pair1, "periodic word of the mu_1 distal pair");
  app->add_option("--pair2", b.pair2, "periodic word of the mu_2 distal pair");
  app->add_option("--shift1", b.shift1, "shift of the second point of the mu_1 pair");
  app->add_option("--shift2", b.shift2, "shift of the second point of the mu_2 pair");
  app->add_option("--base", b.base, "base cylinder word");
  app->add_option("--depth", b.depth, "family depth k_max")->check(CLI::Range(1, 6));
  app->add_option("--" + prefix + "horizon", b.horizon, "horizon cap")->check(CLI::Range(Index{1}, Index{100'000'000}));
  app->add_option("--" + prefix + "eps", b.eps, "base eps (0: from the base cylinder radius)")->check(CLI::Range(0.0, 1.0));
  app->add_option("--rho", b.rho, "witness share of the past")->check(CLI::Range(0.001, 0.5));
}

Json build_config(const Common& c, const BuildOptions& b) {
  return Json{{"model", c.model_path}, {"chain", b.chain_path}, {"chain_words", b.chain_words}, {"mu1", b.mu1},
              {"mu2", b.mu2}, {"theta", b.theta}, {"pair1", b.pair1}, {"pair2", b.pair2}, {"shift1", b.shift1},
              {"shift2", b.shift2}, {"base", b.base}, {"depth", b.depth}, {"horizon", b.horizon}, {"eps", b.eps},
              {"rho", b.rho}, {"metric_depth", c.metric_depth}};
}

ScrambleFamily build_family(const Common& c, const BuildOptions& b) {
  const ShiftModel model = load_model(c);
  CylinderIndex ci(model.q(), c.metric_depth);
  const int m = ci.max_length();
  FamilyInputs in;
  in.model = model;
  if (!b.chain_path.empty()) {
    in.K = chain_from_json(load_json_file(b.chain_path), model, m);
  } else {
    std::vector<Word> ws;
    for (const auto& w : b.chain_words) ws.push_back(parse_word(w));
    in.K = chain_from_words(model, ws, m);
  }
  in.mu1 = periodic_measure(parse_word(b.mu1), m, &model);
  in.mu2 = periodic_measure(parse_word(b.mu2), m, &model);
  in.theta = parse_rational(b.theta);
  in.mu = convex_combine(in.mu1, in.mu2, in.theta);
  in.pair1 = distal_pair_from_periodic(parse_word(b.pair1), b.shift1, model.q(), c.metric_depth);
  in.pair2 = distal_pair_from_periodic(parse_word(b.pair2), b.shift2, model.q(), c.metric_depth);
  in.base_cylinder = parse_word(b.base);
  FamilyConfig cfg;
  cfg.depth = b.depth;
  cfg.horizon_cap = b.horizon;
  cfg.eps = b.eps;
  cfg.witness_ratio = b.rho;
  cfg.metric_depth = c.metric_depth;
  return build_scramble_family(in, cfg);
}

std::string trace_csv(const DC1Report& r) {
  std::ostringstream os;
  os << "n";
  for (const auto& row : r.rows) os << ",t=" << row.t;
  os << "\n";
  for (std::size_t c = 0; c < r.checkpoints.size(); ++c) {
    os << r.checkpoints[c];
    for (double d : r.trace[c]) os << "," << d;
    os << "\n";
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scramble_forge: DC1 families, recurrence statistics and beta-shift tools"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--model", common.model_path, "model JSON file (default: golden mean shift)");
  app.add_option("--metric-depth", common.metric_depth, "number of cylinder terms in the metric")->check(CLI::Range(2, 60));
  app.add_option("--out", common.out, "output directory (default: JSON on stdout)");
  app.add_option("--jobs", common.jobs, "worker threads")->check(CLI::Range(1, 256));
  app.add_option("--seed", common.seed, "random seed for sampled inputs");

  double tol_high = 0.1;
  double tol_low = 0.1;
  std::vector<double> t_grid{0.5, 0.25, 0.1};
  std::vector<double> t0{0.4};
  Index burn_in = 0;
  auto add_dc1_options = [&](CLI::App* sub) {
    sub->add_option("--tol-high", tol_high, "tolerance of the upper-density clause")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--tol-low", tol_low, "tolerance of the lower-density clause")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--t-grid", t_grid, "closeness thresholds");
    sub->add_option("--t0", t0, "candidate thresholds for the lower clause");
    sub->add_option("--burn-in", burn_in, "skip DC1 checkpoints below this n (0: end of the first stage when the family has two or more)")
        ->check(CLI::Range(Index{0}, Index{1} << 40));
  };

  auto* build = app.add_subcommand("build-scramble", "build a DC1 family and verify it");
  BuildOptions bopt;
  add_build_options(build, bopt);
  add_dc1_options(build);

  auto* dc1 = app.add_subcommand("dc1", "proximal-density report for two points");
  std::string xs, ys;
  Index horizon = 1 << 16;
  dc1->add_option("--x", xs, "first point, 'prefix|tail' or 'tail'")->required();
  dc1->add_option("--y", ys, "second point")->required();
  dc1->add_option("--horizon", horizon, "last checkpoint")->check(CLI::Range(Index{1}, Index{1} << 34));
  add_dc1_options(dc1);

  auto* classify = app.add_subcommand("classify", "recurrence class, omega estimates and case signature");
  std::string point;
  std::string xi;
  double tau = 0.01;
  Index min_window = 0;
  double ball = 0.0;
  int omega_len = 4;
  BuildOptions copt;
  auto* pt = classify->add_option("--point", point, "point 'prefix|tail'");
  classify->add_option("--xi", xi, "classify family point x_xi instead (family built from the build options)")->excludes(pt);
  classify->add_option("--horizon", horizon, "horizon (family horizon when --xi is used)");
  classify->add_option("--tau", tau, "positive-density cutoff")->check(CLI::Range(0.0, 1.0));
  classify->add_option("--min-window", min_window, "Banach window (0: floor(sqrt(horizon)))");
  classify->add_option("--eps", ball, "return-ball radius (0: 2^-metric_depth)");
  classify->add_option("--L", omega_len, "cylinder length of the omega estimates")->check(CLI::Range(1, 12));
  add_build_options(classify, copt, "family-");

  auto* lphi = app.add_subcommand("lphi", "interval of Birkhoff limits of a locally constant observable");
  std::string obs_path;
  lphi->add_option("--observable", obs_path, "observable JSON file (default: first coordinate)");

  auto* beta = app.add_subcommand("beta", "beta expansions, Parry checks and digit surgery");
  double beta_value = 1.8;
  int digits = 64;
  std::string expand_x;
  int n_digits = 16;
  std::string check_word;
  std::string dec_word;
  std::size_t dec_j = 1;
  std::string eta_word;
  beta->add_option("--beta", beta_value, "beta > 1")->check(CLI::PositiveNumber);
  beta->add_option("--digits", digits, "cached digits of the expansion of 1")->check(CLI::Range(1, 4096));
  beta->add_option("--expand", expand_x, "x in [0,1] to expand ('random' draws from --seed)");
  beta->add_option("--n", n_digits, "number of digits")->check(CLI::Range(0, 4096));
  beta->add_option("--check", check_word, "word to test for admissibility");
  beta->add_option("--decrement", dec_word, "word w for decrement-and-append");
  beta->add_option("--j", dec_j, "1-based digit position");
  beta->add_option("--eta", eta_word, "appended admissible word");

  auto* catalog = app.add_subcommand("catalog", "target chains K1..K9");
  std::string measures_path;
  int i_max = 6;
  bool item_b = false;
  catalog->add_option("--measures", measures_path, "JSON {\"mus\":[...], \"full\":...}")->required();
  catalog->add_option("--i-max", i_max, "truncation of the nu sequence")->check(CLI::Range(2, 1000));
  catalog->add_flag("--item-b", item_b, "use the item (b) variant of K5");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*build) {
      Emitter em{common, build_config(common, bopt)};
      em.config["tol_high"] = tol_high;
      em.config["tol_low"] = tol_low;
      em.config["t_grid"] = t_grid;
      em.config["t0"] = t0;
      const ScrambleFamily fam = build_family(common, bopt);
      if (burn_in == 0) burn_in = fam.depth >= 2 ? fam.markers.T(4) : 1;
      em.config["burn_in"] = burn_in;
      FamilyTolerances tol;
      tol.t_grid = t_grid;
      tol.t0 = t0;
      tol.tol_high = tol_high;
      tol.tol_low = tol_low;
      tol.min_checkpoint = burn_in;
      tol.jobs = common.jobs;
      const FamilyReport rep = verify_family(fam, tol);
      Json manifest = family_manifest(fam);
      manifest["connectors"] = connector_table(fam.model);
      em.emit("manifest.json", {{"manifest", manifest}});
      Json rj = to_json(rep);
      rj["tolerances"] = {{"tol_high", tol_high}, {"tol_low", tol_low}, {"t_grid", t_grid}, {"t0", t0}, {"burn_in", burn_in}};
      em.emit("verify.json", {{"report", rj}});
      for (const auto& p : rep.pairs) em.emit_csv("dc1/" + p.a + "-" + p.b + ".csv", trace_csv(p.report));
      std::cerr << "depth " << fam.depth << ", horizon " << fam.horizon() << ", " << rep.pairs.size() << " pairs: "
                << (rep.passed ? "all clauses pass" : "some clauses fail") << "\n";
      return rep.passed ? 0 : 1;
    }
    if (*dc1) {
      const ShiftModel model = load_model(common);
      Emitter em{common, Json{{"model", common.model_path}, {"x", xs}, {"y", ys}, {"horizon", horizon},
                              {"tol_high", tol_high}, {"tol_low", tol_low}, {"t_grid", t_grid}, {"t0", t0},
                              {"burn_in", burn_in}, {"metric_depth", common.metric_depth}}};
      std::vector<Index> grid;
      for (Index n : log_grid(horizon))
        if (n >= burn_in) grid.push_back(n);
      const DC1Report r = dc1_report(parse_point(xs, model), parse_point(ys, model), grid, t_grid, t0,
                                     common.metric_depth, tol_high, tol_low);
      em.emit("dc1.json", {{"report", to_json(r)}});
      em.emit_csv("dc1.csv", trace_csv(r));
      return 0;
    }
    if (*classify) {
      const ShiftModel model = load_model(common);
      Json cfg{{"model", common.model_path}, {"point", point}, {"xi", xi}, {"horizon", horizon}, {"tau", tau},
               {"min_window", min_window}, {"eps", ball}, {"L", omega_len}, {"metric_depth", common.metric_depth}};
      LazyPoint x;
      Index h = horizon;
      if (!xi.empty()) {
        cfg["build"] = build_config(common, copt);
        const ScrambleFamily fam = build_family(common, copt);
        auto it = std::find_if(fam.points.begin(), fam.points.end(), [&](const auto& p) { return p.first == xi; });
        if (it == fam.points.end()) fail(ErrorCode::InvalidArgument, "family has no point x" + xi);
        x = it->second;
        h = fam.horizon();
      } else if (!point.empty()) {
        x = parse_point(point, model);
      } else {
        fail(ErrorCode::InvalidArgument, "classify needs --point or --xi");
      }
      Emitter em{common, cfg};
      RecurrenceThresholds th;
      th.tau = tau;
      th.min_window = min_window;
      const double eps = ball > 0 ? ball : truncation_bound(common.metric_depth);
      const RecurrenceClass rc = classify_recurrence(model, x, eps, h, common.metric_depth, th);
      const OmegaEstimate est = statistical_omega(model, x, omega_len, h, tau, min_window);
      Json body{{"classification", to_json(rc)}, {"omega", to_json(est)}};
      try {
        const CaseSignature sig = case_signature(est);
        body["signature"] = {{"label", sig.label}, {"banach_lower_empty", sig.banach_lower_empty},
                             {"relations", std::string(sig.relations.begin(), sig.relations.end())}};
      } catch (const Error& e) {
        body["signature"] = {{"label", nullptr}, {"error", e.what()}};
      }
      em.emit("classify.json", body);
      return 0;
    }
    if (*lphi) {
      const ShiftModel model = load_model(common);
      Emitter em{common, Json{{"model", common.model_path}, {"observable", obs_path}}};
      const LocalObservable phi =
          obs_path.empty() ? LocalObservable::first_coordinate(model.q()) : observable_from_json(load_json_file(obs_path), model.q());
      em.emit("lphi.json", {{"lphi", to_json(lphi_interval(model, phi))}});
      return 0;
    }
    if (*beta) {
      Emitter em{common, Json{{"beta", beta_value}, {"digits", digits}, {"expand", expand_x}, {"n", n_digits},
                              {"check", check_word}, {"decrement", dec_word}, {"j", dec_j}, {"eta", eta_word},
                              {"seed", common.seed}}};
      const BetaParams p = make_beta_params(beta_value, digits);
      Json body{{"b", p.b}, {"expansion_of_one", format_word(p.expansion_of_one)}, {"finite_expansion", p.finite_expansion}};
      if (!expand_x.empty()) {
        Rational x;
        if (expand_x == "random") {
          std::mt19937_64 rng(common.seed);
          x = Rational(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
        } else {
          x = parse_rational(expand_x);
        }
        body["expansion"] = {{"x", to_string(x)}, {"digits", format_word(greedy_expansion(x, p, n_digits))}};
      }
      if (!check_word.empty()) {
        const ParryVerdict v = parry_check(parse_word(check_word), p);
        body["check"] = {{"word", check_word}, {"admissible", v.admissible}, {"boundary", v.boundary}};
      }
      if (!dec_word.empty()) {
        const Word out = decrement_append(parse_word(dec_word), dec_j, parse_word(eta_word), p);
        body["decrement"] = {{"word", dec_word}, {"j", dec_j}, {"eta", eta_word}, {"result", format_word(out)}};
      }
      em.emit("beta.json", body);
      return 0;
    }
    if (*catalog) {
      const ShiftModel model = load_model(common);
      const Json spec = load_json_file(measures_path);
      Emitter em{common, Json{{"model", common.model_path}, {"measures", spec}, {"i_max", i_max}, {"item_b", item_b},
                              {"metric_depth", common.metric_depth}}};
      CylinderIndex ci(model.q(), common.metric_depth);
      const int m = ci.max_length();
      std::vector<CylinderMeasure> mus;
      const Json& list = detail::parsing("measures", [&]() -> const Json& { return spec.at("mus"); });
      for (const auto& j : list) mus.push_back(measure_from_json(j, model, m));
      const CylinderMeasure full =
          measure_from_json(detail::parsing("measures", [&]() -> const Json& { return spec.at("full"); }), model, m);
      em.emit("catalog.json", {{"catalog", to_json(target_catalog(mus, full, i_max, item_b, common.metric_depth))}});
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
