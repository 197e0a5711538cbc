#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autoids/calibrate.hpp"
#include "autoids/detect.hpp"
#include "autoids/ingest.hpp"
#include "autoids/nn_core.hpp"
#include "autoids/preprocess.hpp"

namespace autoids::evaluate {

// Positive class is Anomaly throughout.
struct Confusion {
  std::uint64_t tp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;

  std::uint64_t total() const { return tp + fn + tn + fp; }
};

Confusion confusion(std::span<const detect::Verdict> verdicts,
                    std::span<const ingest::LabelKind> labels);
Confusion confusion(std::span<const ingest::LabelKind> predicted,
                    std::span<const ingest::LabelKind> labels);

// Scalar metrics. Ratios with zero denominators are absent rather than 0.
// fpr_std is FP/(FP+TN); fpr_alt is the FP/(FN+FP) variant some reports use.
// Both are computed; ROC-based calibration always uses the standard one.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f_score;
  std::optional<double> fpr_std;
  std::optional<double> fpr_alt;
};

Metrics metrics(const Confusion& c);

struct CategoryOutcome {
  std::uint64_t total = 0;
  std::uint64_t detected = 0;  // classified Anomaly

  std::optional<double> recall() const {
    if (total == 0) return std::nullopt;
    return static_cast<double>(detected) / static_cast<double>(total);
  }
};

enum class DetectorMode { kCascade, kD2Only, kD1Reconstruction };
std::string_view to_string(DetectorMode mode);

struct EvaluationReport {
  DetectorMode mode = DetectorMode::kCascade;
  Confusion matrix;
  Metrics scalar;
  std::map<ingest::AttackCategory, CategoryOutcome> per_category;
  double escalation_fraction = 0.0;  // cascade mode only
  std::uint64_t d1_decided = 0;
  std::uint64_t d2_decided = 0;
  preprocess::OovCounter oov;
  std::uint64_t seed = 0;
  std::uint64_t record_count = 0;

  std::string to_json() const;
  std::string format_table() const;
};

// ---------------------------------------------------------------------------
// Pipeline orchestration shared by the experiment runners and the CLI.

struct PipelineConfig {
  nn::TrainConfig sparse_train;
  nn::TrainConfig plain_train;
  Eigen::Index sparse_hidden = 140;
  Eigen::Index plain_hidden = 80;
  calibrate::BandSearchConfig band;
  double eps_active = detect::kDefaultEpsActive;
  std::uint64_t seed = 0;
  // Labeled calibration split drawn from the training file; these records are
  // held out of autoencoder training so calibration sees no training data.
  std::size_t validation_normals = 6735;
  std::size_t validation_anomalies = 6735;
  // Split experiment only: labeled test partition carved from the same file.
  std::size_t test_normals = 6735;
  std::size_t test_anomalies = 6735;
  // Normal-only fraction reserved from the training half for loss monitoring.
  double monitor_fraction = 0.1;
};

struct DataSplit {
  std::vector<ingest::LabeledFlow> train_normals;
  std::vector<ingest::LabeledFlow> validation;  // labeled, both classes
  std::vector<ingest::LabeledFlow> test;        // split experiment only
};

// Seeded, deterministic. validation takes the requested counts; test_* may be
// zero (then everything else stays in train_normals / is dropped for
// anomalies, matching semi-supervised training).
DataSplit split_dataset(std::span<const ingest::LabeledFlow> records,
                        std::size_t validation_normals, std::size_t validation_anomalies,
                        std::size_t test_normals, std::size_t test_anomalies,
                        std::uint64_t seed);

struct CalibrationOutcome {
  detect::Thresholds thresholds;
  // Reconstruction-error threshold for the sparse model evaluated standalone.
  double thr_d1r = 0.0;
  Confusion validation_confusion;  // cascade verdicts at the chosen thresholds
  double validation_escalation = 0.0;
  std::uint64_t validation_count = 0;

  std::string to_json() const;
  std::string format_table() const;
};

struct PipelineArtifacts {
  preprocess::TransformSpec spec;
  nn::AEModel sparse_model;
  nn::AEModel plain_model;
  nn::TrainHistory sparse_history;
  nn::TrainHistory plain_history;
  CalibrationOutcome calibration;
};

// fit + train both detectors on normal flows + calibrate thresholds on the
// held-out labeled validation split. Deterministic given config.seed.
PipelineArtifacts build_pipeline(std::span<const ingest::LabeledFlow> train_records,
                                 const PipelineConfig& config);

CalibrationOutcome calibrate_thresholds(const preprocess::TransformSpec& spec,
                                        const nn::AEModel& sparse_model,
                                        const nn::AEModel& plain_model,
                                        std::span<const ingest::LabeledFlow> validation,
                                        const calibrate::BandSearchConfig& band,
                                        double eps_active);

// Classifies test records under the given mode and assembles a full report.
EvaluationReport evaluate_dataset(const preprocess::TransformSpec& spec,
                                  const nn::AEModel& sparse_model,
                                  const nn::AEModel& plain_model,
                                  const detect::Thresholds& thresholds, double thr_d1r,
                                  std::span<const ingest::LabeledFlow> test_records,
                                  DetectorMode mode);

// ---------------------------------------------------------------------------
// Experiment runners.

struct KddTestPaths {
  std::filesystem::path train_file;
  std::filesystem::path test_file;
  std::filesystem::path categories_file;
};

// Full reproduction: train on the training file's normal flows, calibrate on
// a seeded held-out labeled split, evaluate every test record through the
// cascade. Also returns the standalone-detector reports used by the ablation.
struct KddTestResult {
  PipelineArtifacts artifacts;
  EvaluationReport cascade;
  EvaluationReport d2_only;
  EvaluationReport d1_reconstruction;
  ingest::DatasetSummary train_summary;
  ingest::DatasetSummary test_summary;
};

KddTestResult run_kddtest_experiment(const KddTestPaths& paths, const PipelineConfig& config);

// Within-training-file protocol: seeded split into train normals, labeled
// validation and labeled test, then train/calibrate/evaluate inside it.
struct SplitExperimentResult {
  EvaluationReport cascade;
  std::size_t train_normals = 0;
  std::size_t validation_normals = 0, validation_anomalies = 0;
  std::size_t test_normals = 0, test_anomalies = 0;
};

SplitExperimentResult run_split_experiment(std::span<const ingest::LabeledFlow> records,
                                           const PipelineConfig& config);

// F-score as the anomaly share of the test mix varies. For each ratio r (in
// percent) a seeded subsample of anomalies sized r% of the normal count joins
// all normal records.
struct RatioPoint {
  int ratio_percent = 0;
  double f_score = 0;
  std::size_t anomalies_used = 0;
};

std::vector<RatioPoint> ratio_sweep(const preprocess::TransformSpec& spec,
                                    const nn::AEModel& sparse_model,
                                    const nn::AEModel& plain_model,
                                    const detect::Thresholds& thresholds,
                                    std::span<const ingest::LabeledFlow> test_records,
                                    std::span<const int> ratios_percent,
                                    std::uint64_t seed);

// Single-threaded wall-clock comparison of the cascade against each detector
// run standalone over identical, already-featurized flows.
struct TimingReport {
  double cascade_ns_per_flow = 0;
  double d2_ns_per_flow = 0;
  double d1r_ns_per_flow = 0;
  double cascade_over_d2() const {
    return d2_ns_per_flow == 0 ? 0 : cascade_ns_per_flow / d2_ns_per_flow;
  }
  double escalation_fraction = 0;
  int repetitions = 0;
  std::uint64_t flows = 0;
  // Sum of all scores produced while timing; keeps the measured work live.
  double score_sink = 0;
  std::string hardware;

  std::string to_json() const;
  std::string format_table() const;
};

TimingReport bench_inference(const nn::AEModel& sparse_model, const nn::AEModel& plain_model,
                             const detect::Thresholds& thresholds, double thr_d1r,
                             const Eigen::MatrixXd& flows, int repetitions,
                             std::string hardware = {});

}  // namespace autoids::evaluate
