#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>

#include "plkit/analysis.hpp"
#include "plkit/ergodic.hpp"
#include "plkit/formula.hpp"
#include "plkit/invariants.hpp"
#include "plkit/io.hpp"
#include "plkit/koenigs.hpp"
#include "plkit/periodic.hpp"
#include "plkit/pullback.hpp"
#include "plkit/trichotomy.hpp"

using namespace plkit;
using nlohmann::ordered_json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string flag_name(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

// Every config key becomes a flag; --config loads a key=value file first.
struct CommonOptions {
  std::string config_file;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* sub) {
    sub->add_option("--config", config_file, "key=value configuration file");
    for (const auto& key : config_keys()) {
      const std::string names = flag_name(key) + (key == "range_radius" ? ",--range-disk" : "");
      sub->add_option(names, overrides[key], "config key " + key);
    }
  }

  RunConfig resolve() const {
    try {
      RunConfig cfg;
      if (!config_file.empty()) cfg = parse_config(read_text(config_file));
      for (const auto& [k, v] : overrides)
        if (!v.empty()) set_config_key(cfg, k, v);
      validate_config(cfg);
      return cfg;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
};

ProperMapDomain build(const RunConfig& cfg) {
  try {
    return build_from_config(cfg);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw ConfigError(e.what());
    throw;
  }
}

ordered_json pt(CPoint z) { return ordered_json::array({z.real(), z.imag()}); }

CPoint parse_point(const std::string& s) {
  RunConfig tmp;
  try {
    set_config_key(tmp, "range_center", s);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return tmp.range_center;
}

std::filesystem::path out_dir(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  return cfg.output_dir;
}

ordered_json verdict_json(const TrichotomyVerdict& v) {
  ordered_json j;
  j["verdict"] = to_string(v.verdict);
  j["witness_n"] = v.witness_n;
  j["levels"] = v.levels.size();
  ordered_json ev = ordered_json::array();
  for (const auto& e : v.intersections) {
    ordered_json o;
    o["n"] = e.n;
    o["points"] = e.points.size();
    ev.push_back(o);
  }
  j["intersections"] = ev;
  if (v.attracting) {
    j["attracting_point"] = pt(v.attracting->a);
    j["attracting_multiplier"] = pt(v.attracting->multiplier);
  }
  if (v.nesting) j["nesting_margin"] = v.nesting->margin;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

ordered_json cert_json(const PLCertificate& c) {
  ordered_json j;
  j["degree"] = c.degree;
  j["margin"] = c.margin;
  j["n_used"] = c.n_used;
  j["j_used"] = c.j_used;
  j["dilation_cells"] = c.dilation_cells;
  j["inner_components"] = c.inner_components.size();
  j["local_degrees"] = c.local_degrees;
  return j;
}

PLCertificate certify_from(const RunConfig& cfg, const ProperMapDomain& pm) {
  const TrichotomyVerdict v = classify(pm, gamma0_from_config(cfg, pm), cfg.n_max);
  if (v.verdict != Verdict::B)
    throw Error(ErrorCode::CertificationFailed, std::string("verdict ") + to_string(v.verdict) + ", nothing to certify");
  return certify_pl_restriction(pm, v);
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

int main(int argc, char** argv) {
  CLI::App app{"plkit: polynomial-like restrictions of proper holomorphic maps"};
  app.require_subcommand(1);
  std::map<std::string, CommonOptions> common;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    common[name].attach(s);
    return s;
  };

  sub("classify", "trichotomy verdict for Gamma_0");
  sub("certify", "certify a polynomial-like restriction");
  sub("julia", "non-escaping set K as a grid and render");
  sub("kstar", "maximal filled Julia set K* from nested pullbacks");
  CLI::App* periodic_cmd = sub("periodic", "periodic orbits of a given period (CSV)");
  int period = 1;
  periodic_cmd->add_option("-p,--period", period, "period")->check(CLI::PositiveNumber);
  sub("mainstep", "repelling periodic points lie in K");
  CLI::App* koenigs_cmd = sub("koenigs", "Koenigs chart at a repelling fixed point");
  std::string koe_point = "1,0";
  double koe_radius = 0.2;
  koenigs_cmd->add_option("--point", koe_point, "approximate fixed point re,im");
  koenigs_cmd->add_option("--radius", koe_radius, "chart radius");
  CLI::App* entropy_cmd = sub("entropy", "entropy lower bound from a backward separated tree");
  std::string grid_file, x0_text;
  double delta = -1.0;
  int tree_k = -1;
  entropy_cmd->add_option("--grid", grid_file, "X as a grid JSON (default: outer K*)");
  entropy_cmd->add_option("--x0", x0_text, "tree root re,im (default: a repelling fixed point)");
  entropy_cmd->add_option("--delta", delta, "separation");
  entropy_cmd->add_option("-k", tree_k, "tree depth");
  CLI::App* capacity_cmd = sub("capacity", "logarithmic capacity");
  std::string method = "fekete";
  int n_points = -1;
  capacity_cmd->add_option("--grid", grid_file, "X as a grid JSON (default: non-escaping K)");
  capacity_cmd->add_option("--method", method, "fekete or green")->check(CLI::IsMember({"fekete", "green"}));
  capacity_cmd->add_option("-n", n_points, "Fekete points");
  sub("run", "full pipeline with report.json");
  CLI::App* pullback_cmd = sub("pullback", "pull back a curve once");
  std::string curve_file;
  pullback_cmd->add_option("--curve", curve_file, "curve JSON (default: Gamma_0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    const RunConfig cfg = common[chosen->get_name()].resolve();
    const std::string name = chosen->get_name();

    if (name == "run") {
      const AnalysisReport r = run_full_analysis(cfg);
      std::cout << report_to_json(r, true);
      std::cerr << "report: " << (std::filesystem::path(cfg.output_dir) / "report.json").string() << "\n";
      return r.exit_code;
    }

    const ProperMapDomain pm = build(cfg);

    if (name == "classify") {
      std::cout << verdict_json(classify(pm, gamma0_from_config(cfg, pm), cfg.n_max)).dump(2) << "\n";
    } else if (name == "certify") {
      const PLCertificate c = certify_from(cfg, pm);
      std::vector<JordanCurve> curves{c.outer};
      curves.insert(curves.end(), c.inner_components.begin(), c.inner_components.end());
      write_text((out_dir(cfg) / "certificate.json").string(), curves_to_json(curves));
      std::cout << cert_json(c).dump(2) << "\n";
    } else if (name == "julia") {
      const GridSet shape = analysis_shape(pm, cfg.resolution);
      SampleOptions so;
      so.samples = cfg.samples;
      so.seed = cfg.seed;
      const InvariantSetReport k = nonescaping_set(pm, domain_region(pm), shape, cfg.horizon, so);
      const auto dir = out_dir(cfg);
      write_text((dir / "K.json").string(), grid_to_json(k.K));
      write_ppm((dir / "K.ppm").string(), render_grid(k.K));
      ordered_json j;
      j["cells"] = k.K.count();
      j["area"] = k.K.area();
      j["full"] = k.full;
      j["forward_ok"] = k.forward_ok;
      j["backward_ok"] = k.backward_ok;
      j["contains_critical"] = k.contains_critical;
      std::cout << j.dump(2) << "\n";
    } else if (name == "kstar") {
      const PLCertificate c = certify_from(cfg, pm);
      const KStarResult ks = compute_kstar_detailed(pm, c, analysis_shape(pm, cfg.resolution), 48);
      const auto dir = out_dir(cfg);
      write_text((dir / "kstar.json").string(), grid_to_json(ks.kstar));
      write_text((dir / "kstar_outer.json").string(), grid_to_json(ks.outer));
      write_ppm((dir / "kstar.ppm").string(), render_grid(ks.kstar));
      ordered_json j;
      j["cells"] = ks.kstar.count();
      j["outer_cells"] = ks.outer.count();
      j["levels"] = ks.levels;
      j["converged"] = ks.converged;
      j["thin"] = ks.thin;
      std::cout << j.dump(2) << "\n";
    } else if (name == "periodic") {
      const PeriodicScan scan = find_periodic(pm, period, pm.range);
      std::cout << "orbit,index,re,im,period,multiplier_abs,kind\n";
      std::cout.precision(17);
      for (std::size_t o = 0; o < scan.orbits.size(); ++o) {
        const auto& orb = scan.orbits[o];
        for (std::size_t i = 0; i < orb.points.size(); ++i)
          std::cout << o << ',' << i << ',' << orb.points[i].real() << ',' << orb.points[i].imag() << ','
                    << orb.period << ',' << std::abs(orb.multiplier) << ',' << to_string(orb.kind) << '\n';
      }
      std::cerr << scan.dividing_points.size() << " points with period dividing " << period << " (bound "
                << scan.bound << ")\n";
    } else if (name == "mainstep") {
      const PLCertificate c = certify_from(cfg, pm);
      const KStarResult ks = compute_kstar_detailed(pm, c, analysis_shape(pm, cfg.resolution), 48);
      SampleOptions so;
      so.samples = cfg.samples;
      so.seed = cfg.seed;
      const MainstepReport m = verify_mainstep(pm, invariance_flags(pm, ks.outer, so), cfg.p_max);
      ordered_json j;
      j["pass"] = m.pass;
      j["dividing_counts"] = m.dividing_counts;
      j["repelling_counts"] = m.repelling_counts;
      j["witnesses"] = m.witnesses.size();
      std::cout << j.dump(2) << "\n";
      return m.pass ? 0 : 1;
    } else if (name == "koenigs") {
      CPoint a = parse_point(koe_point);
      for (int it = 0; it < 50; ++it) a -= (pm.map.eval(a) - a) / (pm.map.deriv(a) - 1.0);
      const KoenigsChart chart = koenigs_chart(pm, a, pm.map.deriv(a), koe_radius);
      ordered_json j;
      j["fixed_point"] = pt(a);
      j["multiplier"] = pt(chart.lambda);
      j["radius"] = chart.radius;
      j["n_used"] = chart.n_used;
      j["residual"] = koenigs_residual(chart);
      ordered_json s = ordered_json::array();
      for (const auto& [z, v] : chart.samples) s.push_back({pt(z), pt(v)});
      j["samples"] = s;
      std::cout << j.dump(2) << "\n";
    } else if (name == "entropy") {
      GridSet X;
      if (!grid_file.empty()) {
        X = grid_from_json(read_text(grid_file));
      } else {
        X = compute_kstar_detailed(pm, certify_from(cfg, pm), analysis_shape(pm, cfg.resolution), 48).outer;
      }
      CPoint x0;
      if (!x0_text.empty()) {
        x0 = parse_point(x0_text);
      } else {
        const PeriodicScan fixed = find_periodic(pm, 1, pm.range);
        const PeriodicOrbit* best = nullptr;
        for (const auto& o : fixed.orbits)
          if (o.kind == OrbitKind::Repelling && (!best || std::abs(o.multiplier) > std::abs(best->multiplier)))
            best = &o;
        if (!best) throw Error(ErrorCode::PreimageSolveFailure, "no repelling fixed point; pass --x0");
        x0 = best->points.front();
      }
      const EntropyEstimate e = entropy_lower_bound(pm, X, delta > 0 ? delta : cfg.entropy_delta,
                                                    tree_k >= 0 ? tree_k : cfg.entropy_k, x0);
      ordered_json j;
      j["delta"] = e.delta;
      j["k"] = e.k;
      j["counts"] = e.counts;
      j["rate"] = e.rate;
      j["target"] = e.target;
      std::cout << j.dump(2) << "\n";
    } else if (name == "capacity") {
      CapacityEstimate c;
      if (method == "green") {
        c = capacity_green(pm);
      } else {
        GridSet X;
        if (!grid_file.empty()) {
          X = grid_from_json(read_text(grid_file));
        } else {
          X = nonescaping_set(pm, domain_region(pm), analysis_shape(pm, cfg.resolution), cfg.horizon).K;
        }
        c = capacity_fekete(X, n_points > 0 ? n_points : cfg.fekete_n);
      }
      std::cout << capacity_json(c).dump(2) << "\n";
    } else if (name == "pullback") {
      const JordanCurve gamma = curve_file.empty() ? gamma0_from_config(cfg, pm) : curve_from_json(read_text(curve_file));
      const PullbackResult pb = pullback_curve(pm, gamma);
      std::cout << curves_to_json(pb.components) << "\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
