#include "polelm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "polelm/errors.hpp"

namespace polelm {

double accuracy(const std::vector<EvalRecord>& records, double threshold) {
  if (records.empty())
    throw std::invalid_argument("accuracy over an empty record set");
  std::size_t ok = 0;
  for (const EvalRecord& r : records)
    if (r.error < threshold) ++ok;  // strict: success means error below threshold
  return 100.0 * static_cast<double>(ok) / static_cast<double>(records.size());
}

AccuracyReport build_report(const std::vector<EvalRecord>& records,
                            const std::vector<ScoringMode>& modes,
                            const std::vector<double>& thresholds) {
  AccuracyReport report;
  for (ScoringMode mode : modes) {
    ModeReport mr;
    mr.mode = mode;
    std::vector<EvalRecord> subset;
    for (const EvalRecord& r : records)
      if (r.mode == mode) subset.push_back(r);
    for (double t : thresholds) {
      ThresholdAccuracy ta;
      ta.threshold = t;
      ta.total = subset.size();
      for (const EvalRecord& r : subset)
        if (r.error < t) ++ta.successes;
      ta.percent = subset.empty() ? 0.0
                                  : 100.0 * static_cast<double>(ta.successes) /
                                        static_cast<double>(ta.total);
      mr.by_threshold.push_back(ta);
    }
    report.modes.push_back(std::move(mr));
  }
  return report;
}

ExperimentResult run_experiment(const PoleMap& global,
                                const ExperimentConfig& config) {
  if (config.queries.empty())
    throw std::invalid_argument("experiment has no queries");
  if (config.modes.empty())
    throw std::invalid_argument("experiment has no scoring modes");

  const DistanceTable table = build_distance_table(global, config.table);

  ExperimentResult result;
  for (std::size_t qi = 0; qi < config.queries.size(); ++qi) {
    const ObservationSpec& obs = config.queries[qi];
    PoleMap local = observe(global, obs);
    if (config.class_model) {
      for (Pole& p : local.poles)
        if (!p.descriptor.empty())
          p.class_id = assign_class(*config.class_model, p.descriptor);
    }

    for (ScoringMode mode : config.modes) {
      RansacParams params = config.matcher;
      params.mode = mode;

      EvalRecord rec;
      rec.query_id = static_cast<int>(qi);
      rec.mode = mode;
      rec.ground_truth = Point2{obs.true_pose.tx, obs.true_pose.ty};
      try {
        const MatchResult match = ransac_localize(local, global, table, params);
        // The sensor sits at the local origin, so the predicted global
        // position is the hypothesis translation.
        rec.predicted = Point2{match.best.pose.tx, match.best.pose.ty};
        rec.error = distance(rec.predicted, rec.ground_truth);
        rec.heading_error = std::abs(
            normalize_angle(match.best.pose.theta - obs.true_pose.theta));
        rec.score = match.best.score;
      } catch (const NoHypothesisError&) {
        rec.predicted = Point2{std::numeric_limits<double>::quiet_NaN(),
                               std::numeric_limits<double>::quiet_NaN()};
        rec.error = std::numeric_limits<double>::infinity();
        rec.heading_error = std::numeric_limits<double>::infinity();
        rec.score = 0;
      }
      result.records.push_back(rec);
    }
  }
  result.report = build_report(result.records, config.modes, config.thresholds);
  return result;
}

void save_records_csv(const std::vector<EvalRecord>& records,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write records file: " + path);
  out << "query_id,mode,x_true,y_true,x_pred,y_pred,error,score\n";
  out.precision(17);
  for (const EvalRecord& r : records) {
    out << r.query_id << ',' << mode_name(r.mode) << ',' << r.ground_truth.x
        << ',' << r.ground_truth.y << ',' << r.predicted.x << ','
        << r.predicted.y << ',' << r.error << ',' << r.score << '\n';
  }
}

std::vector<EvalRecord> load_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file: " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("query_id,mode,x_true,y_true,x_pred,y_pred,error,score", 0) != 0)
    throw ParseError("expected records header", 1);
  std::vector<EvalRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 8) throw ParseError("expected 8 fields", lineno);
    EvalRecord r;
    try {
      r.query_id = std::stoi(cells[0]);
      r.mode = parse_mode(cells[1]);
      r.ground_truth = Point2{std::stod(cells[2]), std::stod(cells[3])};
      r.predicted = Point2{std::stod(cells[4]), std::stod(cells[5])};
      r.score = std::stoi(cells[7]);
    } catch (const std::exception&) {
      throw ParseError("malformed record", lineno);
    }
    // The error column is recomputed, not trusted.
    r.error = finite(r.predicted)
                  ? distance(r.predicted, r.ground_truth)
                  : std::numeric_limits<double>::infinity();
    records.push_back(r);
  }
  return records;
}

std::string format_report_text(const AccuracyReport& report) {
  std::ostringstream out;
  out.precision(4);
  out << std::fixed;
  for (const ModeReport& mr : report.modes) {
    for (const ThresholdAccuracy& ta : mr.by_threshold) {
      out << mode_name(mr.mode) << ".accuracy_" << ta.threshold << "m: "
          << ta.percent << " % (" << ta.successes << '/' << ta.total << ")\n";
    }
  }
  return out.str();
}

void save_report_csv(const AccuracyReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file: " + path);
  out << "mode";
  if (!report.modes.empty())
    for (const ThresholdAccuracy& ta : report.modes[0].by_threshold)
      out << ",accuracy_" << ta.threshold << "m";
  out << '\n';
  out.precision(6);
  for (const ModeReport& mr : report.modes) {
    out << mode_name(mr.mode);
    for (const ThresholdAccuracy& ta : mr.by_threshold) out << ',' << ta.percent;
    out << '\n';
  }
}

}  // namespace polelm
