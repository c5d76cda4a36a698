#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include "scramble/betashift.hpp"
#include "scramble/birkhoff.hpp"
#include "scramble/chaos.hpp"
#include "scramble/errors.hpp"
#include "scramble/measures.hpp"
#include "scramble/recurrence.hpp"
#include "scramble/shiftspace.hpp"

namespace scramble {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "v1";

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path);
  out << text;
}

inline std::string config_hash(const Json& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : cfg.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

template <class F>
auto parsing(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, what + ": " + e.what());
  }
}

}  // namespace detail

inline Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return Rational(j.get<double>());
  fail(ErrorCode::ParseError, "expected a rational, got " + j.dump());
}

inline ShiftModel model_from_json(const Json& j) {
  return detail::parsing("model", [&] {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "full") return ShiftModel::full(j.at("q").get<int>());
    if (kind == "sft") {
      BoolMatrix adj;
      for (const auto& row : j.at("adjacency")) {
        std::vector<std::uint8_t> r;
        for (const auto& v : row) r.push_back(static_cast<std::uint8_t>(v.get<int>() != 0));
        adj.push_back(std::move(r));
      }
      if (j.contains("q") && j.at("q").get<std::size_t>() != adj.size())
        fail(ErrorCode::ParseError, "q does not match the adjacency size");
      for (const auto& r : adj)
        if (r.size() != adj.size()) fail(ErrorCode::ParseError, "adjacency must be square");
      return ShiftModel::sft(adj);
    }
    if (kind == "beta")
      return ShiftModel::beta(make_beta_params(j.at("beta").get<double>(), j.value("digits", 64), j.value("precision", 0.0)));
    fail(ErrorCode::ParseError, "unknown model kind '" + kind + "'");
  });
}

inline Json model_to_json(const ShiftModel& m) {
  Json j;
  switch (m.kind()) {
    case ModelKind::Full:
      j["kind"] = "full";
      j["q"] = m.q();
      break;
    case ModelKind::Sft:
      j["kind"] = "sft";
      j["q"] = m.q();
      j["adjacency"] = Json::array();
      for (const auto& row : m.adjacency()) {
        Json r = Json::array();
        for (auto v : row) r.push_back(static_cast<int>(v));
        j["adjacency"].push_back(r);
      }
      break;
    case ModelKind::Beta:
      j["kind"] = "beta";
      j["beta"] = m.beta_params().beta;
      j["digits"] = m.beta_params().depth;
      break;
  }
  return j;
}

// {"periodic":"01"} | {"weights":{"0":"1/2",...}} | {"combine":[a,b],"theta":"1/3"}
inline CylinderMeasure measure_from_json(const Json& j, const ShiftModel& model, int m) {
  return detail::parsing("measure", [&]() -> CylinderMeasure {
    if (j.is_string()) return periodic_measure(parse_word(j.get<std::string>()), m, &model);
    if (j.contains("periodic")) return periodic_measure(parse_word(j.at("periodic").get<std::string>()), m, &model);
    if (j.contains("combine")) {
      const auto& parts = j.at("combine");
      if (parts.size() != 2) fail(ErrorCode::ParseError, "combine takes two measures");
      return convex_combine(measure_from_json(parts[0], model, m), measure_from_json(parts[1], model, m),
                            rational_from_json(j.at("theta")));
    }
    CylinderMeasure mu(model.q(), m);
    for (const auto& [k, v] : j.at("weights").items()) {
      const Word w = parse_word(k);
      check_symbols(w, model.q());
      if (static_cast<int>(w.size()) > m) continue;
      mu.set_weight(w, rational_from_json(v));
    }
    mu.validate();
    return mu;
  });
}

inline Json measure_to_json(const CylinderMeasure& mu) {
  Json w = Json::object();
  for (int len = 1; len <= mu.max_length(); ++len)
    for (const auto& word : mu.words_of_length(len)) {
      const Rational& v = mu.weight(word);
      if (v != 0) w[format_word(word)] = to_string(v);
    }
  return Json{{"q", mu.q()}, {"depth", mu.max_length()}, {"weights", w}};
}

// {"words":["01","001"]} or {"vertices":[measure, ...]}
inline MeasureChain chain_from_json(const Json& j, const ShiftModel& model, int m) {
  return detail::parsing("chain", [&] {
    if (j.contains("words")) {
      std::vector<Word> ws;
      for (const auto& w : j.at("words")) ws.push_back(parse_word(w.get<std::string>()));
      return chain_from_words(model, ws, m);
    }
    MeasureChain k;
    for (const auto& v : j.at("vertices")) {
      k.vertices.push_back(measure_from_json(v, model, m));
      if (v.is_string()) k.generators.emplace_back(parse_word(v.get<std::string>()));
      else if (v.contains("periodic")) k.generators.emplace_back(parse_word(v.at("periodic").get<std::string>()));
      else k.generators.emplace_back(std::nullopt);
    }
    if (k.vertices.empty()) fail(ErrorCode::EmptyChain, "chain has no vertices");
    return k;
  });
}

// {"depth":m, "values":{"01":"1","10":"0",...}}
inline LocalObservable observable_from_json(const Json& j, int q) {
  return detail::parsing("observable", [&] {
    const int m = j.at("depth").get<int>();
    std::map<Word, Rational> vals;
    for (const auto& [k, v] : j.at("values").items()) {
      Word w = parse_word(k);
      check_symbols(w, q);
      if (static_cast<int>(w.size()) != m) fail(ErrorCode::ParseError, "observable word '" + k + "' has the wrong length");
      vals[w] = rational_from_json(v);
    }
    return LocalObservable::from_map(q, m, vals);
  });
}

inline Json to_json(const DensityQuad& d) {
  return Json{{"upper", to_string(d.upper)},
              {"lower", to_string(d.lower)},
              {"banach_upper", to_string(d.banach_upper)},
              {"banach_lower", to_string(d.banach_lower)},
              {"horizon", d.horizon},
              {"min_window", d.min_window}};
}

inline Json to_json(const DC1Report& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t},
                    {"max_density", row.max_density},
                    {"argmax", row.argmax},
                    {"min_density", row.min_density},
                    {"argmin", row.argmin}});
  Json j{{"rows", rows},
         {"t_grid", r.t_grid},
         {"t0_candidates", r.t0_candidates},
         {"tol_high", r.tol_high},
         {"tol_low", r.tol_low},
         {"metric_depth", r.depth},
         {"truncation_bound", truncation_bound(r.depth)},
         {"checkpoints", r.checkpoints.size()},
         {"first_checkpoint", r.checkpoints.empty() ? 0 : r.checkpoints.front()},
         {"last_checkpoint", r.checkpoints.empty() ? 0 : r.checkpoints.back()},
         {"upper_ok", r.upper_ok},
         {"lower_ok", r.lower_ok},
         {"verdict", r.verdict}};
  j["t0"] = r.t0 ? Json(*r.t0) : Json(nullptr);
  return j;
}

inline Json to_json(const PathMarkers& m) {
  Json nodes = Json::array();
  for (const auto& n : m.nodes)
    nodes.push_back({{"segment", n.position.segment},
                     {"theta", to_string(n.position.theta)},
                     {"word_length", n.word.size()},
                     {"word_dist", n.word_dist},
                     {"window", {n.start, n.end}}});
  Json j{{"eps", m.eps}, {"N_eps_mu", m.n_eps_mu}, {"N", m.N}, {"M", m.M}, {"n_star", m.n_star}, {"nodes", nodes}};
  j["t2"] = m.t2 ? Json(*m.t2) : Json(nullptr);
  j["audit"] = {{"a", m.audit.max_a}, {"b", m.audit.max_b}, {"c", m.audit.dist_c},
                {"d", m.audit.max_d}, {"e", m.audit.dist_e}, {"passed", m.audit.passed}};
  return j;
}

inline Json to_json(const ScheduleMarkers& ms) {
  Json stages = Json::array();
  for (const auto& st : ms.stages) {
    Json paths = Json::array();
    for (const auto& p : st.paths) paths.push_back(to_json(p));
    stages.push_back({{"k", st.k},
                      {"eps", st.eps},
                      {"delta", to_string(st.delta)},
                      {"K", st.gap},
                      {"b", st.base},
                      {"T_b", st.prev_end},
                      {"z_window", {st.z_start, st.z_start + st.z_len - 1}},
                      {"N_mu_eps", st.m_mu},
                      {"N_mu_eps_next", st.m_mu_next},
                      {"path_N", st.path_n},
                      {"sep_N", st.sep_N},
                      {"sep_M", st.sep_M},
                      {"witness_N", st.witness_N},
                      {"witness_M", st.witness_M},
                      {"path_start", st.path_start},
                      {"alpha_mark", st.alpha_mark},
                      {"path_end", st.path_end},
                      {"sep_start", st.sep_start},
                      {"sep_end", st.sep_end},
                      {"paths", paths}});
  }
  Json T = Json::array();
  for (Index j = 1; j <= ms.count(); ++j) T.push_back(ms.T(j));
  return Json{{"T", T}, {"rho", to_string(ms.rho)}, {"proximal_stage", ms.proximal_stage},
              {"proximal_ratio", to_string(ms.proximal_ratio)}, {"stages", stages}};
}

inline Json family_manifest(const ScrambleFamily& fam) {
  Json pts = Json::array();
  for (const auto& [xi, x] : fam.points) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(point_digest(x, fam.horizon() + 1)));
    pts.push_back({{"xi", xi}, {"digest", buf}, {"prefix", format_word(x.prefix(64))}});
  }
  Json alphas = Json::array();
  for (const auto& a : fam.alpha_positions) alphas.push_back({{"segment", a.segment}, {"theta", to_string(a.theta)}});
  return Json{{"model", model_to_json(fam.model)},
              {"eps", fam.eps},
              {"delta1", to_string(fam.delta1)},
              {"requested_depth", fam.requested_depth},
              {"depth", fam.depth},
              {"truncated", fam.truncated},
              {"horizon", fam.horizon()},
              {"metric_depth", fam.metric_depth},
              {"truncation_bound", truncation_bound(fam.metric_depth)},
              {"base_cylinder", format_word(fam.base_cylinder)},
              {"alphas", alphas},
              {"markers", to_json(fam.markers)},
              {"points", pts}};
}

inline Json to_json(const FamilyReport& r) {
  Json clauses = Json::array();
  for (const auto& c : r.clauses) clauses.push_back({{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"detail", c.detail}});
  Json sched = Json::array();
  for (const auto& s : r.schedule) sched.push_back({{"relation", s.name}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"ok", s.ok}});
  auto samples = [](const std::vector<TrackingSample>& v) {
    Json a = Json::array();
    for (const auto& s : v)
      a.push_back({{"point", s.point}, {"marker", s.label}, {"stage", s.stage}, {"n", s.n}, {"dist", s.dist},
                   {"bound", s.bound}, {"ok", s.ok}});
    return a;
  };
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json pj{{"a", p.a}, {"b", p.b}, {"report", to_json(p.report)}};
    pj["certified_coordinate"] = p.certified_coordinate ? Json(*p.certified_coordinate) : Json(nullptr);
    pairs.push_back(pj);
  }
  return Json{{"passed", r.passed}, {"clauses", clauses}, {"schedule", sched}, {"tracking", samples(r.tracking)},
              {"alpha", samples(r.alpha)}, {"pairs", pairs}};
}

inline Json to_json(const RecurrenceClass& rc) {
  return Json{{"label", label_name(rc.label)},
              {"ap_consistent", rc.ap_consistent()},
              {"br_consistent", rc.br_consistent()},
              {"quad", to_json(rc.quad)},
              {"returns", rc.returns},
              {"transitivity", rc.transitivity},
              {"horizon", rc.horizon},
              {"eps", rc.eps},
              {"tau", rc.tau}};
}

inline Json to_json(const OmegaEstimate& est) {
  Json words = Json::array();
  for (std::size_t i = 0; i < est.words.size(); ++i)
    words.push_back({{"word", format_word(est.words[i])}, {"quad", to_json(est.quads[i])}});
  Json sets = Json::object();
  for (std::size_t k = 0; k < 5; ++k) {
    Json s = Json::array();
    for (const auto& w : est.sets[k]) s.push_back(format_word(w));
    sets[kOmegaKinds[k]] = s;
  }
  return Json{{"L", est.L}, {"horizon", est.horizon}, {"tau", est.tau}, {"sets", sets},
              {"near_threshold", est.near_threshold}, {"cylinders", words}};
}

inline Json to_json(const LphiResult& r) {
  return Json{{"lo", to_string(r.lo)},
              {"hi", to_string(r.hi)},
              {"interior_empty", r.interior_empty},
              {"min_cycle", format_word(r.min_cycle)},
              {"max_cycle", format_word(r.max_cycle)}};
}

inline Json to_json(const TargetCatalog& cat) {
  Json chains = Json::array();
  for (std::size_t i = 0; i < cat.chains.size(); ++i) {
    Json vs = Json::array();
    for (const auto& v : cat.chains[i].vertices) vs.push_back(measure_to_json(v));
    chains.push_back({{"name", "K" + std::to_string(i + 1)}, {"segments", cat.chains[i].segment_count()}, {"vertices", vs}});
  }
  return Json{{"i_max", cat.i_max},
              {"truncation_diameter", cat.truncation_diameter},
              {"truncation_bound", cat.truncation_bound},
              {"provenance", cat.provenance},
              {"chains", chains}};
}

}  // namespace scramble
