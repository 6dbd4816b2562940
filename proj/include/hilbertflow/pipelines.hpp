#pragma once

#include "hilbertflow/verify.hpp"

namespace hilbert {

/// Batch-run configuration.  The seed fully determines every Monte-Carlo
/// output, so runs with equal configs are byte-identical.
struct RunConfig {
  std::string fixture = "disk-schottky";
  int depth = -1;  // -1: fixture default
  uint64_t seed = 1;
  std::string out_dir = "out";
  std::vector<double> t_grid;  // census / equidistribution thresholds
  double radius = -1.0;        // shadow radius; -1: twice the generator step
  double epsilon = 0.3;        // entropy separation
  double time_horizon = 8.0;   // entropy t and mixing t_max
  size_t samples = 20000;
  size_t cap = 200000;
};

std::string config_hash(const RunConfig& config);

struct CensusArtifacts {
  std::string census_csv;
  std::string delta_json;
  std::string classification_json;
  double delta_hat = 0.0;
  int rank_one = 0;
  int total_classes = 0;
};

/// census.csv, delta.json and the classification summary.
CensusArtifacts run_census(const RunConfig& config);

struct VerifyArtifacts {
  std::string report_json;
  std::vector<CheckRow> rows;
  bool all_pass = false;
};

/// Machine-readable pass/fail report over the module invariant suites.
VerifyArtifacts run_verify(const RunConfig& config);

struct SampleArtifacts {
  std::string samples_jsonl;
  std::string mixing_csv;
  std::string equidistribution_csv;
  MixingCurve mixing;
  std::vector<EquidistRow> equidistribution;
};

/// Flow-invariant samples plus mixing and equidistribution reports.
SampleArtifacts run_sample(const RunConfig& config);

struct DensityArtifacts {
  std::string density_json;
  std::string shadow_csv;
  std::string shadow_subcritical_csv;
  ShadowReport report;
  ShadowReport subcritical;
};

/// Density summary and shadow reports at the critical and half-critical
/// exponents.
DensityArtifacts run_density(const RunConfig& config);

struct EntropyArtifacts {
  std::string entropy_json;
  EntropyEstimate estimate;
  double delta_hat = 0.0;
};

/// Separated-set entropy estimate on flow samples.
EntropyArtifacts run_entropy(const RunConfig& config);

}  // namespace hilbert
