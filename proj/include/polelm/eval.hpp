#pragma once

#include <string>
#include <vector>

#include "polelm/kmeans.hpp"
#include "polelm/matcher.hpp"
#include "polelm/synth.hpp"

namespace polelm {

struct EvalRecord {
  int query_id = 0;
  ScoringMode mode = ScoringMode::baseline;
  Point2 predicted;
  Point2 ground_truth;
  double error = 0.0;  // meters; +inf when no hypothesis was found
  double heading_error = 0.0;  // radians, recorded but not scored
  int score = 0;
};

struct ThresholdAccuracy {
  double threshold = 0.0;  // meters
  std::size_t successes = 0;
  std::size_t total = 0;
  double percent = 0.0;
};

struct ModeReport {
  ScoringMode mode = ScoringMode::baseline;
  std::vector<ThresholdAccuracy> by_threshold;
};

struct AccuracyReport {
  std::vector<ModeReport> modes;
};

// Percentage of records with error strictly below the threshold.
double accuracy(const std::vector<EvalRecord>& records, double threshold);

struct ExperimentConfig {
  std::vector<ObservationSpec> queries;  // true_pose + noise per query
  RansacParams matcher;                  // mode field ignored; set per mode
  DistanceTableParams table;
  std::vector<ScoringMode> modes{ScoringMode::baseline, ScoringMode::class_gated};
  std::vector<double> thresholds{5.0, 1.0};
  // When set, local and distractor poles get classes from this model.
  const KMeansModel* class_model = nullptr;
};

struct ExperimentResult {
  std::vector<EvalRecord> records;
  AccuracyReport report;
};

// Localizes every query in every mode against the global map. Queries that
// produce no hypothesis are recorded with error = +inf and count as
// failures at every threshold.
ExperimentResult run_experiment(const PoleMap& global, const ExperimentConfig& config);

AccuracyReport build_report(const std::vector<EvalRecord>& records,
                            const std::vector<ScoringMode>& modes,
                            const std::vector<double>& thresholds);

// Per-query CSV: query_id,mode,x_true,y_true,x_pred,y_pred,error,score
void save_records_csv(const std::vector<EvalRecord>& records, const std::string& path);
std::vector<EvalRecord> load_records_csv(const std::string& path);

// Summary as "key: value" lines and as a CSV table (mode rows, threshold columns).
std::string format_report_text(const AccuracyReport& report);
void save_report_csv(const AccuracyReport& report, const std::string& path);

}  // namespace polelm
