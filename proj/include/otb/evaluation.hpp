#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace otb {

// Genuine and impostor dissimilarity scores for one scenario.
struct ScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
    std::string scenario;     // "i".."iv"
    std::string dataset_tag;  // e.g. "synthetic-default"
};

// A calibrated threshold with its measured error rates. `flag` is empty
// for clean cells, "low_samples" when the impostor set is too small for
// the requested FAR, "no_anchor" where no external comparison exists,
// and "not_measured" for cells missing their inputs.
struct OperatingPoint {
    std::string name;  // "EER", "FAR=0.1", "FAR=0.01", "FAR=0.001"
    double threshold = 0.0;
    double far = 0.0;
    double frr = 0.0;
    std::string flag;
};

// far = fraction of impostor scores strictly below threshold (they would
// be accepted); frr = fraction of genuine scores at or above it.
std::pair<double, double> compute_far_frr(const ScoreSet& scores, double threshold);

// Sweeps candidate thresholds at every distinct observed score plus the
// midpoints between consecutive ones; returns (eer, threshold) at the
// candidate minimizing |FAR-FRR|, lowest threshold on ties.
std::pair<double, double> compute_eer(const ScoreSet& scores);

// Largest threshold whose measured FAR does not exceed target_far.
OperatingPoint threshold_at_far(const ScoreSet& scores, double target_far);

// Attack outcome curve: best-so-far score per iteration (non-increasing),
// entry 0 being the initial candidate's score.
struct TraceView {
    std::vector<double> best_scores;
};

// Fraction of traces whose best score dips strictly below the threshold.
double compute_asr(const std::vector<TraceView>& traces, const OperatingPoint& point);

// One scenario's calibrated metrics.
struct ScenarioReport {
    double eer = 0.0;
    std::vector<OperatingPoint> points;            // EER first, then FAR=...
    std::map<std::string, double> asr;             // by operating point name
    std::map<std::string, std::string> asr_flags;  // parallel flags
};

struct EvalReport {
    std::map<std::string, ScenarioReport> scenarios;  // by scenario name
    nlohmann::json metadata;                          // seeds, world config
};

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

struct HistogramSpec {
    int bins = 40;
};

// Writes report.json, report.csv (long form: scenario,metric,
// operating_point,value,flag), table.csv (wide, one row per scenario),
// and histograms.csv (scenario,kind,bin_left,bin_right,count) from the
// score sets. Parse-back of report.csv must reproduce the values exactly.
void export_report(const EvalReport& report, const std::vector<ScoreSet>& score_sets,
                   const std::string& out_dir, const HistogramSpec& hist = {});

// Reads values back from report.csv for round-trip checks:
// (scenario, metric, operating_point) -> (value, flag).
std::map<std::string, std::pair<double, std::string>> read_report_csv(const std::string& path);

}  // namespace otb
