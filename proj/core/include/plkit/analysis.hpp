#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plkit/ergodic.hpp"
#include "plkit/geometry.hpp"
#include "plkit/invariants.hpp"
#include "plkit/maps.hpp"
#include "plkit/periodic.hpp"
#include "plkit/trichotomy.hpp"

namespace plkit {

struct RunConfig {
  std::string map = "z^2";
  double range_radius = 4.0;
  CPoint range_center = 0.0;
  std::string range_curve;  // JSON curve file; overrides the disk when set
  DomainMode mode = DomainMode::Single;
  int resolution = 1024;
  int n_max = 12;
  int p_max = 8;
  int horizon = 200;
  // Gamma_0: circle of gamma0_radius (default 0.9 R) or a JSON curve.
  double gamma0_radius = 0.0;
  CPoint gamma0_center = 0.0;
  std::string gamma0_curve;
  double entropy_delta = 0.05;
  int entropy_k = 12;
  int fekete_n = 128;
  int samples = 500;
  Tolerances tol;
  std::string output_dir = "plkit_out";
  std::uint64_t seed = 1;
};

// Keys accepted by set_config_key, in report order.
const std::vector<std::string>& config_keys();
// Throws ParseError on an unknown key or malformed value.
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_key(const RunConfig& cfg, const std::string& key);
// Flat key=value text; '#' starts a comment.
RunConfig parse_config(const std::string& text, RunConfig base = {});
// Positive tolerances and sizes; throws InvalidArgument.
void validate_config(const RunConfig& cfg);

// Building blocks shared with the command-line tool.
ProperMapDomain build_from_config(const RunConfig& cfg);
JordanCurve gamma0_from_config(const RunConfig& cfg, const ProperMapDomain& pm);
// Common grid for K, K* and X*: square around the range, 2% margin.
GridSet analysis_shape(const ProperMapDomain& pm, int resolution);

enum class StageStatus { Ok, Failed, Skipped, NoClaim };
const char* to_string(StageStatus s);

struct StageRecord {
  std::string name;
  StageStatus status = StageStatus::Skipped;
  std::string cause;
  double seconds = 0.0;
};

struct AnalysisReport {
  static constexpr int kSchemaVersion = 1;
  RunConfig config;
  std::vector<StageRecord> stages;
  std::optional<TrichotomyVerdict> verdict;
  std::optional<PLCertificate> certificate;
  std::optional<InvariantSetReport> invariant_set;
  std::optional<KStarResult> kstar;
  double kstar_hausdorff_cells = -1.0;
  std::optional<GridSet> maximal;
  double maximal_hausdorff_cells = -1.0;
  std::optional<MainstepReport> mainstep;
  std::optional<EntropyEstimate> entropy;
  std::optional<double> lyapunov;
  std::optional<double> dimension_proxy;
  std::optional<CapacityEstimate> capacity_fekete;
  std::optional<CapacityEstimate> capacity_green;
  // Relative to config.output_dir.
  std::map<std::string, std::string> artifacts;
  int exit_code = 0;

  const StageRecord* stage(const std::string& name) const;
};

// Runs every stage, writes artifacts and report.json into output_dir.
AnalysisReport run_full_analysis(const RunConfig& cfg);

// Report JSON; the "timings" object is omitted when include_timings is false.
std::string report_to_json(const AnalysisReport& r, bool include_timings = true);

}  // namespace plkit
