#include "plkit/analysis.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "plkit/formula.hpp"
#include "plkit/io.hpp"

namespace plkit {

using nlohmann::ordered_json;

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, "bad number for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (x != static_cast<int>(x)) throw Error(ErrorCode::ParseError, "bad integer for " + key + ": '" + v + "'");
  return static_cast<int>(x);
}

// "re" or "re,im".
CPoint parse_point(const std::string& key, const std::string& v) {
  const auto comma = v.find(',');
  if (comma == std::string::npos) return {parse_double(key, v), 0.0};
  return {parse_double(key, v.substr(0, comma)), parse_double(key, v.substr(comma + 1))};
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt(CPoint z) { return fmt(z.real()) + "," + fmt(z.imag()); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

struct KeySpec {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define PLKIT_KEY_DOUBLE(key, field)                                                           \
  KeySpec {                                                                                   \
    key, [](RunConfig& c, const std::string& v) { c.field = parse_double(key, v); },           \
        [](const RunConfig& c) { return fmt(c.field); }                                       \
  }
#define PLKIT_KEY_INT(key, field)                                                              \
  KeySpec {                                                                                   \
    key, [](RunConfig& c, const std::string& v) { c.field = parse_int(key, v); },              \
        [](const RunConfig& c) { return std::to_string(c.field); }                            \
  }
#define PLKIT_KEY_POINT(key, field)                                                            \
  KeySpec {                                                                                   \
    key, [](RunConfig& c, const std::string& v) { c.field = parse_point(key, v); },            \
        [](const RunConfig& c) { return fmt(c.field); }                                       \
  }
#define PLKIT_KEY_STRING(key, field)                                                           \
  KeySpec {                                                                                   \
    key, [](RunConfig& c, const std::string& v) { c.field = v; },                              \
        [](const RunConfig& c) { return c.field; }                                            \
  }

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      PLKIT_KEY_STRING("map", map),
      PLKIT_KEY_DOUBLE("range_radius", range_radius),
      PLKIT_KEY_POINT("range_center", range_center),
      PLKIT_KEY_STRING("range_curve", range_curve),
      KeySpec{"mode",
              [](RunConfig& c, const std::string& v) {
                if (v == "SINGLE" || v == "single")
                  c.mode = DomainMode::Single;
                else if (v == "MULTI" || v == "multi")
                  c.mode = DomainMode::Multi;
                else
                  throw Error(ErrorCode::ParseError, "mode must be SINGLE or MULTI");
              },
              [](const RunConfig& c) { return std::string(to_string(c.mode)); }},
      PLKIT_KEY_INT("resolution", resolution),
      PLKIT_KEY_INT("n_max", n_max),
      PLKIT_KEY_INT("p_max", p_max),
      PLKIT_KEY_INT("horizon", horizon),
      PLKIT_KEY_DOUBLE("gamma0_radius", gamma0_radius),
      PLKIT_KEY_POINT("gamma0_center", gamma0_center),
      PLKIT_KEY_STRING("gamma0_curve", gamma0_curve),
      PLKIT_KEY_DOUBLE("entropy_delta", entropy_delta),
      PLKIT_KEY_INT("entropy_k", entropy_k),
      PLKIT_KEY_INT("fekete_n", fekete_n),
      PLKIT_KEY_INT("samples", samples),
      PLKIT_KEY_DOUBLE("geom_eps_rel", tol.geom_eps_rel),
      PLKIT_KEY_DOUBLE("eval_eps", tol.eval_eps),
      PLKIT_KEY_DOUBLE("root_tol_rel", tol.root_tol_rel),
      PLKIT_KEY_DOUBLE("pb_tol_rel", tol.pb_tol_rel),
      PLKIT_KEY_DOUBLE("cv_margin", tol.cv_margin),
      PLKIT_KEY_DOUBLE("cycle_tol", tol.cycle_tol),
      PLKIT_KEY_INT("max_cycle_period", tol.max_cycle_period),
      PLKIT_KEY_INT("orbit_horizon", tol.orbit_horizon),
      PLKIT_KEY_DOUBLE("pc_pad_cells", tol.pc_pad_cells),
      PLKIT_KEY_INT("pc_resolution", tol.pc_resolution),
      PLKIT_KEY_DOUBLE("mult_tol", tol.mult_tol),
      PLKIT_KEY_DOUBLE("dedup_tol_rel", tol.dedup_tol_rel),
      PLKIT_KEY_DOUBLE("koe_tol_rel", tol.koe_tol_rel),
      PLKIT_KEY_DOUBLE("boundary_tol_rel", tol.boundary_tol_rel),
      PLKIT_KEY_STRING("output_dir", output_dir),
      KeySpec{"seed",
              [](RunConfig& c, const std::string& v) {
                try {
                  std::size_t pos = 0;
                  c.seed = std::stoull(v, &pos);
                  if (pos != v.size()) throw std::invalid_argument(v);
                } catch (const std::exception&) {
                  throw Error(ErrorCode::ParseError, "bad seed: '" + v + "'");
                }
              },
              [](const RunConfig& c) { return std::to_string(c.seed); }},
  };
  return table;
}

#undef PLKIT_KEY_DOUBLE
#undef PLKIT_KEY_INT
#undef PLKIT_KEY_POINT
#undef PLKIT_KEY_STRING

const KeySpec& find_key(const std::string& key) {
  for (const auto& k : key_table())
    if (k.name == key) return k;
  throw Error(ErrorCode::ParseError, "unknown config key '" + key + "'");
}

ordered_json pt(CPoint z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json pts(const std::vector<CPoint>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& z : v) a.push_back(pt(z));
  return a;
}

ordered_json capacity_json(const CapacityEstimate& c) {
  ordered_json j;
  j["method"] = to_string(c.method);
  j["value"] = c.value;
  j["n_points"] = c.n_points;
  j["residual"] = c.residual;
  if (c.method == CapacityMethod::Fekete) {
    j["transfinite"] = c.transfinite;
    j["small_sample"] = c.small_sample;
  }
  return j;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : key_table()) k.push_back(s.name);
    return k;
  }();
  return keys;
}

void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  find_key(key).set(cfg, trim(value));
}

std::string get_config_key(const RunConfig& cfg, const std::string& key) { return find_key(key).get(cfg); }

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected key=value");
    set_config_key(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

void validate_config(const RunConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
  };
  need(c.range_curve.size() || c.range_radius > 0.0, "range_radius must be positive");
  need(c.resolution >= 16, "resolution must be at least 16");
  need(c.n_max >= 1 && c.p_max >= 1 && c.horizon >= 1, "n_max, p_max and horizon must be positive");
  need(c.gamma0_radius >= 0.0, "gamma0_radius must be non-negative");
  need(c.entropy_delta > 0.0 && c.entropy_k >= 0, "entropy_delta must be positive and entropy_k non-negative");
  need(c.fekete_n >= 2 && c.samples >= 1, "fekete_n must be >= 2 and samples >= 1");
  const Tolerances& t = c.tol;
  need(t.geom_eps_rel > 0 && t.eval_eps > 0 && t.root_tol_rel > 0 && t.pb_tol_rel > 0 && t.cv_margin > 0 &&
           t.cycle_tol > 0 && t.max_cycle_period > 0 && t.orbit_horizon > 0 && t.pc_pad_cells > 0 &&
           t.pc_resolution > 0 && t.mult_tol > 0 && t.dedup_tol_rel > 0 && t.koe_tol_rel > 0 &&
           t.boundary_tol_rel > 0,
       "all tolerances must be positive");
}

ProperMapDomain build_from_config(const RunConfig& cfg) {
  const MapSpec g = parse_map(cfg.map);
  const Region range = cfg.range_curve.empty() ? Region::disk(cfg.range_center, cfg.range_radius)
                                               : Region::interior({curve_from_json(read_text(cfg.range_curve))});
  BuildOptions opt;
  opt.mode = cfg.mode;
  opt.tol = cfg.tol;
  opt.seed = cfg.seed;
  return build_proper_map(g, range, opt);
}

JordanCurve gamma0_from_config(const RunConfig& cfg, const ProperMapDomain& pm) {
  if (!cfg.gamma0_curve.empty()) return curve_from_json(read_text(cfg.gamma0_curve));
  if (cfg.gamma0_radius > 0.0) return JordanCurve::circle(cfg.gamma0_center, cfg.gamma0_radius, 512);
  if (pm.range.is_disk()) return JordanCurve::circle(pm.range.center(), 0.9 * pm.range.radius(), 512);
  // Range boundary shrunk toward its centroid.
  const JordanCurve& b = pm.range.curves().front();
  const CPoint c = b.centroid();
  std::vector<CPoint> v;
  for (const auto& z : b.vertices()) v.push_back(c + 0.9 * (z - c));
  return JordanCurve(std::move(v));
}

GridSet analysis_shape(const ProperMapDomain& pm, int resolution) {
  const Box bb = pm.range.bbox();
  return GridSet::square(bb.center(), 0.5 * std::max(bb.width(), bb.height()) * 1.02, resolution);
}

const char* to_string(StageStatus s) {
  switch (s) {
    case StageStatus::Ok: return "OK";
    case StageStatus::Failed: return "FAILED";
    case StageStatus::Skipped: return "SKIPPED";
    case StageStatus::NoClaim: return "NO_CLAIM";
  }
  return "?";
}

const StageRecord* AnalysisReport::stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

AnalysisReport run_full_analysis(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  AnalysisReport r;
  r.config = cfg;
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  auto artifact = [&](const std::string& key, const std::string& file) { r.artifacts[key] = file; };

  std::string blocker;  // cause for skipping the remaining stages
  bool config_error = false;
  bool failed = false;

  ProperMapDomain pm;
  JordanCurve gamma0 = JordanCurve::circle(0.0, 1.0, 8);
  GridSet shape;

  auto run_stage = [&](const std::string& name, const std::function<void(StageRecord&)>& body) {
    StageRecord rec;
    rec.name = name;
    if (!blocker.empty()) {
      rec.status = StageStatus::Skipped;
      rec.cause = blocker;
      r.stages.push_back(rec);
      return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      rec.status = StageStatus::Ok;
      body(rec);
    } catch (const HypothesesNotMetError& e) {
      rec.status = StageStatus::NoClaim;
      rec.cause = e.what();
    } catch (const Error& e) {
      rec.status = StageStatus::Failed;
      rec.cause = e.what();
    } catch (const std::exception& e) {
      rec.status = StageStatus::Failed;
      rec.cause = e.what();
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rec.status == StageStatus::Failed) {
      failed = true;
      blocker = name + " failed";
    }
    r.stages.push_back(rec);
  };

  run_stage("build", [&](StageRecord&) {
    try {
      validate_config(cfg);
      pm = build_from_config(cfg);
      gamma0 = gamma0_from_config(cfg, pm);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::InvalidArgument ||
          e.code() == ErrorCode::EmptyInput)
        config_error = true;
      throw;
    }
    shape = analysis_shape(pm, cfg.resolution);
    write_text((out / "gamma0.json").string(), curve_to_json(gamma0));
    artifact("gamma0", "gamma0.json");
  });

  run_stage("classify", [&](StageRecord&) {
    r.verdict = classify(pm, gamma0, cfg.n_max);
    if (r.verdict->verdict != Verdict::B)
      blocker = std::string("verdict ") + to_string(r.verdict->verdict) + ": no polynomial-like restriction";
  });

  run_stage("certify", [&](StageRecord&) {
    r.certificate = certify_pl_restriction(pm, *r.verdict);
    std::vector<JordanCurve> curves{r.certificate->outer};
    curves.insert(curves.end(), r.certificate->inner_components.begin(), r.certificate->inner_components.end());
    write_text((out / "certificate.json").string(), curves_to_json(curves));
    artifact("certificate", "certificate.json");
  });

  SampleOptions sampling;
  sampling.samples = cfg.samples;
  sampling.seed = cfg.seed;

  run_stage("julia", [&](StageRecord&) {
    r.invariant_set = nonescaping_set(pm, domain_region(pm), shape, cfg.horizon, sampling);
    write_text((out / "K.json").string(), grid_to_json(r.invariant_set->K));
    Render img = render_grid(r.invariant_set->K);
    draw_curve(img, shape, r.certificate->outer, {200, 0, 0});
    for (const auto& c : r.certificate->inner_components) draw_curve(img, shape, c, {0, 0, 200});
    write_ppm((out / "K.ppm").string(), img);
    artifact("K", "K.json");
    artifact("K_render", "K.ppm");
  });

  run_stage("kstar", [&](StageRecord&) {
    r.kstar = compute_kstar_detailed(pm, *r.certificate, shape, 48);
    r.kstar_hausdorff_cells = hausdorff_cells(r.invariant_set->K, r.kstar->kstar);
    write_text((out / "kstar.json").string(), grid_to_json(r.kstar->kstar));
    write_text((out / "kstar_outer.json").string(), grid_to_json(r.kstar->outer));
    artifact("kstar", "kstar.json");
    artifact("kstar_outer", "kstar_outer.json");
  });

  run_stage("maximal", [&](StageRecord&) {
    MaximalOptions mo;
    mo.sampling = sampling;
    r.maximal = maximal_invariant_subset(pm, r.kstar->outer, cfg.horizon, mo);
    r.maximal_hausdorff_cells = hausdorff_cells(r.invariant_set->K, *r.maximal);
    write_text((out / "maximal.json").string(), grid_to_json(*r.maximal));
    artifact("maximal", "maximal.json");
  });

  // Soundness of the mainstep check needs an outer approximation of K.
  run_stage("mainstep", [&](StageRecord& rec) {
    if (!r.kstar) throw Error(ErrorCode::EmptyInput, "no K* available");
    const InvariantSetReport flags = invariance_flags(pm, r.kstar->outer, sampling);
    r.mainstep = verify_mainstep(pm, flags, cfg.p_max);
    std::ofstream csv(out / "repelling_witnesses.csv");
    csv << "orbit,index,re,im,period,multiplier_abs\n";
    for (std::size_t o = 0; o < r.mainstep->witnesses.size(); ++o) {
      const auto& w = r.mainstep->witnesses[o];
      for (std::size_t i = 0; i < w.points.size(); ++i)
        csv << o << ',' << i << ',' << fmt(w.points[i].real()) << ',' << fmt(w.points[i].imag()) << ','
            << w.period << ',' << fmt(std::abs(w.multiplier)) << '\n';
    }
    artifact("mainstep_witnesses", "repelling_witnesses.csv");
    if (!r.mainstep->pass) rec.cause = "repelling periodic orbit outside K";
  });

  run_stage("entropy", [&](StageRecord&) {
    const PeriodicScan fixed = find_periodic(pm, 1, pm.range);
    const PeriodicOrbit* seed = nullptr;
    for (const auto& o : fixed.orbits)
      if (o.kind == OrbitKind::Repelling && (!seed || std::abs(o.multiplier) > std::abs(seed->multiplier)))
        seed = &o;
    if (!seed) throw Error(ErrorCode::PreimageSolveFailure, "no repelling fixed point to seed the tree");
    r.entropy = entropy_lower_bound(pm, r.kstar->outer, cfg.entropy_delta, cfg.entropy_k, seed->points.front());
    // Birkhoff average of log|g'| over the leaves, each followed back to the root.
    const int steps = std::max(cfg.entropy_k, 1);
    double chi = 0.0;
    for (const auto& z : r.entropy->leaves) chi += lyapunov_exponent(pm, z, steps);
    chi /= static_cast<double>(r.entropy->leaves.size());
    r.lyapunov = chi;
    r.dimension_proxy = dimension_positivity_proxy(r.entropy->rate, chi);
  });

  run_stage("capacity", [&](StageRecord&) {
    r.capacity_fekete = capacity_fekete(r.invariant_set->K, cfg.fekete_n);
    if (pm.map.is_polynomial()) r.capacity_green = capacity_green(pm);
  });

  artifact("report", "report.json");
  r.exit_code = config_error ? 2 : failed ? 1 : 0;
  write_text((out / "report.json").string(), report_to_json(r, true));
  return r;
}

std::string report_to_json(const AnalysisReport& r, bool include_timings) {
  ordered_json j;
  j["schema_version"] = AnalysisReport::kSchemaVersion;
  ordered_json cfg;
  for (const auto& k : config_keys()) cfg[k] = get_config_key(r.config, k);
  j["config"] = cfg;

  ordered_json stages = ordered_json::array();
  for (const auto& s : r.stages) {
    ordered_json o;
    o["name"] = s.name;
    o["status"] = to_string(s.status);
    if (!s.cause.empty()) o["cause"] = s.cause;
    stages.push_back(o);
  }
  j["stages"] = stages;

  if (r.verdict) {
    const auto& v = *r.verdict;
    ordered_json o;
    o["verdict"] = to_string(v.verdict);
    o["witness_n"] = v.witness_n;
    o["levels"] = v.levels.size();
    o["intersections"] = v.intersections.size();
    if (v.attracting) {
      o["attracting_point"] = pt(v.attracting->a);
      o["attracting_multiplier"] = pt(v.attracting->multiplier);
    }
    if (!v.note.empty()) o["note"] = v.note;
    j["trichotomy"] = o;
  }
  if (r.certificate) {
    const auto& c = *r.certificate;
    ordered_json o;
    o["degree"] = c.degree;
    o["margin"] = c.margin;
    o["n_used"] = c.n_used;
    o["j_used"] = c.j_used;
    o["dilation_cells"] = c.dilation_cells;
    o["inner_components"] = c.inner_components.size();
    o["local_degrees"] = c.local_degrees;
    j["certificate"] = o;
  }
  if (r.invariant_set) {
    const auto& k = *r.invariant_set;
    ordered_json o;
    o["cells"] = k.K.count();
    o["cell_size"] = k.cell_size;
    o["area"] = k.K.area();
    o["full"] = k.full;
    o["forward_ok"] = k.forward_ok;
    o["backward_ok"] = k.backward_ok;
    o["contains_critical"] = k.contains_critical;
    o["forward_pass"] = k.forward_pass;
    o["backward_pass"] = k.backward_pass;
    j["invariant_set"] = o;
  }
  if (r.kstar) {
    ordered_json o;
    o["cells"] = r.kstar->kstar.count();
    o["outer_cells"] = r.kstar->outer.count();
    o["levels"] = r.kstar->levels;
    o["converged"] = r.kstar->converged;
    o["thin"] = r.kstar->thin;
    if (!r.kstar->note.empty()) o["note"] = r.kstar->note;
    o["hausdorff_to_K_cells"] = r.kstar_hausdorff_cells;
    j["kstar"] = o;
  }
  if (r.maximal) {
    ordered_json o;
    o["cells"] = r.maximal->count();
    o["hausdorff_to_K_cells"] = r.maximal_hausdorff_cells;
    j["maximal"] = o;
  }
  if (r.mainstep) {
    const auto& m = *r.mainstep;
    ordered_json o;
    o["pass"] = m.pass;
    o["p_max"] = m.p_max;
    o["dividing_counts"] = m.dividing_counts;
    o["repelling_counts"] = m.repelling_counts;
    o["repelling_points_checked"] = m.repelling_checked;
    ordered_json w = ordered_json::array();
    for (const auto& orb : m.witnesses) {
      ordered_json e;
      e["period"] = orb.period;
      e["points"] = pts(orb.points);
      e["multiplier"] = pt(orb.multiplier);
      w.push_back(e);
    }
    o["witnesses"] = w;
    j["mainstep"] = o;
  }
  if (r.entropy) {
    const auto& e = *r.entropy;
    ordered_json o;
    o["delta"] = e.delta;
    o["k"] = e.k;
    o["counts"] = e.counts;
    o["rate"] = e.rate;
    o["target"] = e.target;
    if (r.lyapunov) o["lyapunov"] = *r.lyapunov;
    if (r.dimension_proxy) o["dimension_proxy"] = *r.dimension_proxy;
    j["entropy"] = o;
  }
  if (r.capacity_fekete || r.capacity_green) {
    ordered_json o;
    if (r.capacity_fekete) o["fekete"] = capacity_json(*r.capacity_fekete);
    if (r.capacity_green) o["green"] = capacity_json(*r.capacity_green);
    j["capacity"] = o;
  }
  ordered_json arts;
  for (const auto& [k, v] : r.artifacts) arts[k] = v;
  j["artifacts"] = arts;
  j["exit_code"] = r.exit_code;
  if (include_timings) {
    ordered_json t;
    for (const auto& s : r.stages) t[s.name] = s.seconds;
    j["timings"] = t;
  }
  return j.dump(2) + "\n";
}

}  // namespace plkit
