#include "autoids/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "autoids/errors.hpp"
#include "autoids/rng.hpp"

namespace autoids::evaluate {
namespace {

using json = nlohmann::json;

json optional_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::string percent(const std::optional<double>& v) {
  if (!v) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
  return buf;
}

json confusion_to_json(const Confusion& c) {
  return json{{"tp", c.tp}, {"fn", c.fn}, {"tn", c.tn}, {"fp", c.fp}};
}

std::vector<ingest::LabelKind> labels_of(std::span<const ingest::LabeledFlow> records) {
  std::vector<ingest::LabelKind> labels;
  labels.reserve(records.size());
  for (const auto& r : records) labels.push_back(r.label.kind);
  return labels;
}

}  // namespace

Confusion confusion(std::span<const detect::Verdict> verdicts,
                    std::span<const ingest::LabelKind> labels) {
  if (verdicts.size() != labels.size())
    throw ConfigError("confusion: verdicts and labels differ in length");
  Confusion c;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const bool anomaly = labels[i] == ingest::LabelKind::kAnomaly;
    const bool predicted = verdicts[i].label == ingest::LabelKind::kAnomaly;
    if (anomaly)
      predicted ? ++c.tp : ++c.fn;
    else
      predicted ? ++c.fp : ++c.tn;
  }
  return c;
}

Confusion confusion(std::span<const ingest::LabelKind> predicted,
                    std::span<const ingest::LabelKind> labels) {
  if (predicted.size() != labels.size())
    throw ConfigError("confusion: predictions and labels differ in length");
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool anomaly = labels[i] == ingest::LabelKind::kAnomaly;
    const bool pred = predicted[i] == ingest::LabelKind::kAnomaly;
    if (anomaly)
      pred ? ++c.tp : ++c.fn;
    else
      pred ? ++c.fp : ++c.tn;
  }
  return c;
}

Metrics metrics(const Confusion& c) {
  if (c.total() == 0) throw ConfigError("metrics: empty confusion matrix");
  Metrics m;
  const auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0)
    m.f_score = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  m.fpr_std = ratio(c.fp, c.fp + c.tn);
  m.fpr_alt = ratio(c.fp, c.fn + c.fp);
  return m;
}

std::string_view to_string(DetectorMode mode) {
  switch (mode) {
    case DetectorMode::kCascade: return "cascade";
    case DetectorMode::kD2Only: return "d2";
    case DetectorMode::kD1Reconstruction: return "d1r";
  }
  return "cascade";
}

std::string EvaluationReport::to_json() const {
  json doc;
  doc["mode"] = std::string(evaluate::to_string(mode));
  doc["records"] = record_count;
  doc["confusion"] = confusion_to_json(matrix);
  doc["metrics"] = {{"accuracy", optional_to_json(scalar.accuracy)},
                    {"precision", optional_to_json(scalar.precision)},
                    {"recall", optional_to_json(scalar.recall)},
                    {"f_score", optional_to_json(scalar.f_score)},
                    {"fpr_std", optional_to_json(scalar.fpr_std)},
                    {"fpr_alt", optional_to_json(scalar.fpr_alt)}};
  json categories = json::object();
  for (const auto& [category, outcome] : per_category) {
    categories[std::string(ingest::to_string(category))] = {
        {"total", outcome.total},
        {"detected", outcome.detected},
        {"recall", optional_to_json(outcome.recall())}};
  }
  doc["per_category"] = categories;
  doc["escalation_fraction"] = escalation_fraction;
  doc["d1_decided"] = d1_decided;
  doc["d2_decided"] = d2_decided;
  doc["out_of_vocabulary"] = {{"protocol", oov.protocol},
                              {"service", oov.service},
                              {"flag", oov.flag}};
  doc["seed"] = seed;
  return doc.dump(2);
}

std::string EvaluationReport::format_table() const {
  std::ostringstream out;
  out << "mode: " << evaluate::to_string(mode) << "   records: " << record_count
      << "   seed: " << seed << '\n';
  out << "  ACC% " << percent(scalar.accuracy) << "  PR% " << percent(scalar.precision)
      << "  RE% " << percent(scalar.recall) << "  FS% " << percent(scalar.f_score)
      << "  FPR%(FP/(FP+TN)) " << percent(scalar.fpr_std) << "  FPR%(FP/(FN+FP)) "
      << percent(scalar.fpr_alt) << '\n';
  out << "  confusion: TP " << matrix.tp << "  FN " << matrix.fn << "  TN " << matrix.tn
      << "  FP " << matrix.fp << '\n';
  out << "  decided at D1: " << d1_decided << "   at D2: " << d2_decided
      << "   escalation: " << percent(escalation_fraction) << "%\n";
  if (!per_category.empty()) {
    out << "  per-category recall:";
    for (const auto& [category, outcome] : per_category)
      out << "  " << ingest::to_string(category) << " " << percent(outcome.recall()) << "% ("
          << outcome.detected << "/" << outcome.total << ")";
    out << '\n';
  }
  if (oov.total() > 0)
    out << "  out-of-vocabulary tokens: protocol " << oov.protocol << ", service "
        << oov.service << ", flag " << oov.flag << '\n';
  return out.str();
}

DataSplit split_dataset(std::span<const ingest::LabeledFlow> records,
                        std::size_t validation_normals, std::size_t validation_anomalies,
                        std::size_t test_normals, std::size_t test_anomalies,
                        std::uint64_t seed) {
  std::vector<std::size_t> normals, anomalies;
  for (std::size_t i = 0; i < records.size(); ++i)
    (records[i].label.kind == ingest::LabelKind::kNormal ? normals : anomalies).push_back(i);

  if (normals.size() < validation_normals + test_normals)
    throw ConfigError("split: not enough normal records (" + std::to_string(normals.size()) +
                      " available)");
  if (anomalies.size() < validation_anomalies + test_anomalies)
    throw ConfigError("split: not enough anomaly records (" +
                      std::to_string(anomalies.size()) + " available)");

  Rng rng(Rng::derive(seed, 10));
  rng.shuffle(normals);
  rng.shuffle(anomalies);

  DataSplit split;
  std::size_t n = 0, a = 0;
  for (std::size_t i = 0; i < validation_normals; ++i)
    split.validation.push_back(records[normals[n++]]);
  for (std::size_t i = 0; i < validation_anomalies; ++i)
    split.validation.push_back(records[anomalies[a++]]);
  for (std::size_t i = 0; i < test_normals; ++i) split.test.push_back(records[normals[n++]]);
  for (std::size_t i = 0; i < test_anomalies; ++i)
    split.test.push_back(records[anomalies[a++]]);
  for (; n < normals.size(); ++n) split.train_normals.push_back(records[normals[n]]);
  return split;
}

CalibrationOutcome calibrate_thresholds(const preprocess::TransformSpec& spec,
                                        const nn::AEModel& sparse_model,
                                        const nn::AEModel& plain_model,
                                        std::span<const ingest::LabeledFlow> validation,
                                        const calibrate::BandSearchConfig& band,
                                        double eps_active) {
  if (validation.empty()) throw ConfigError("calibrate: empty validation set");

  const Eigen::MatrixXd features = spec.apply_all(validation);
  const std::vector<ingest::LabelKind> labels = labels_of(validation);

  const auto n = features.cols();
  std::vector<double> sparsities(static_cast<std::size_t>(n));
  std::vector<double> plain_errors(static_cast<std::size_t>(n));
  std::vector<double> sparse_errors(static_cast<std::size_t>(n));
  Eigen::VectorXd latent, reconstruction;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = features.col(i);
    nn::encode_into(sparse_model, x, latent);
    sparsities[static_cast<std::size_t>(i)] = detect::sparsity_value(latent, eps_active);
    nn::decode_into(sparse_model, latent, reconstruction);
    sparse_errors[static_cast<std::size_t>(i)] = (x - reconstruction).squaredNorm();
    nn::encode_into(plain_model, x, latent);
    nn::decode_into(plain_model, latent, reconstruction);
    plain_errors[static_cast<std::size_t>(i)] = (x - reconstruction).squaredNorm();
  }

  CalibrationOutcome outcome;
  outcome.thresholds.eps_active = eps_active;
  outcome.thresholds.thr_ae = calibrate::select_thr_ae(plain_errors, labels);
  outcome.thr_d1r = calibrate::select_thr_ae(sparse_errors, labels);
  const calibrate::Band band_choice = calibrate::select_tau_band(sparsities, labels, band);
  outcome.thresholds.tau_min = band_choice.tau_min;
  outcome.thresholds.tau_max = band_choice.tau_max;

  detect::CascadeStats stats;
  const auto verdicts =
      detect::cascade_classify_all(features, sparse_model, plain_model,
                                   outcome.thresholds, &stats);
  outcome.validation_confusion = confusion(verdicts, labels);
  outcome.validation_escalation = stats.escalation_fraction();
  outcome.validation_count = validation.size();
  return outcome;
}

std::string CalibrationOutcome::to_json() const {
  json doc;
  doc["tau_min"] = thresholds.tau_min;
  doc["tau_max"] = thresholds.tau_max;
  doc["thr_ae"] = thresholds.thr_ae;
  doc["eps_active"] = thresholds.eps_active;
  doc["thr_d1r"] = thr_d1r;
  doc["validation"] = {{"records", validation_count},
                       {"confusion", confusion_to_json(validation_confusion)},
                       {"escalation_fraction", validation_escalation}};
  return doc.dump(2);
}

std::string CalibrationOutcome::format_table() const {
  std::ostringstream out;
  out << "thresholds: tau_min " << thresholds.tau_min << "  tau_max " << thresholds.tau_max
      << "  thr_ae " << thresholds.thr_ae << "  thr_d1r " << thr_d1r << '\n';
  out << "  validation records: " << validation_count
      << "   escalation: " << percent(validation_escalation) << "%\n";
  const Metrics m = metrics(validation_confusion);
  out << "  validation ACC% " << percent(m.accuracy) << "  PR% " << percent(m.precision)
      << "  RE% " << percent(m.recall) << "  FS% " << percent(m.f_score) << '\n';
  return out.str();
}

namespace {

// Shared by build_pipeline and run_split_experiment once the split is made.
PipelineArtifacts train_and_calibrate(preprocess::TransformSpec spec, const DataSplit& split,
                                      const PipelineConfig& config) {
  PipelineArtifacts artifacts;
  artifacts.spec = std::move(spec);

  // Reserve a normal-only slice for loss monitoring.
  const std::size_t n_train = split.train_normals.size();
  if (n_train == 0) throw ConfigError("pipeline: no normal flows left for training");
  std::size_t n_monitor =
      static_cast<std::size_t>(std::floor(config.monitor_fraction * n_train));
  if (n_monitor >= n_train) n_monitor = 0;

  const Eigen::MatrixXd all_train = artifacts.spec.apply_all(split.train_normals);
  const Eigen::Index monitor_cols = static_cast<Eigen::Index>(n_monitor);
  const Eigen::MatrixXd monitor = all_train.rightCols(monitor_cols);
  const Eigen::MatrixXd training = all_train.leftCols(all_train.cols() - monitor_cols);

  nn::TrainConfig sparse_cfg = config.sparse_train;
  sparse_cfg.seed = Rng::derive(config.seed, 20);
  nn::TrainResult sparse =
      nn::train(nn::ModelKind::kSparse, config.sparse_hidden, training, monitor, sparse_cfg);

  nn::TrainConfig plain_cfg = config.plain_train;
  plain_cfg.seed = Rng::derive(config.seed, 21);
  nn::TrainResult plain =
      nn::train(nn::ModelKind::kPlain, config.plain_hidden, training, monitor, plain_cfg);

  const std::uint64_t hash = artifacts.spec.content_hash();
  sparse.model.transform_hash = hash;
  plain.model.transform_hash = hash;

  artifacts.calibration =
      calibrate_thresholds(artifacts.spec, sparse.model, plain.model, split.validation,
                           config.band, config.eps_active);
  artifacts.sparse_model = std::move(sparse.model);
  artifacts.plain_model = std::move(plain.model);
  artifacts.sparse_history = std::move(sparse.history);
  artifacts.plain_history = std::move(plain.history);
  return artifacts;
}

}  // namespace

PipelineArtifacts build_pipeline(std::span<const ingest::LabeledFlow> train_records,
                                 const PipelineConfig& config) {
  const DataSplit split = split_dataset(train_records, config.validation_normals,
                                        config.validation_anomalies, 0, 0, config.seed);
  // The transform is fitted on the whole training file: encoding vocabularies
  // and scaling are unsupervised statistics of the training data.
  return train_and_calibrate(preprocess::TransformSpec::fit(train_records), split, config);
}

EvaluationReport evaluate_dataset(const preprocess::TransformSpec& spec,
                                  const nn::AEModel& sparse_model,
                                  const nn::AEModel& plain_model,
                                  const detect::Thresholds& thresholds, double thr_d1r,
                                  std::span<const ingest::LabeledFlow> test_records,
                                  DetectorMode mode) {
  if (test_records.empty()) throw ConfigError("evaluate: empty test set");

  EvaluationReport report;
  report.mode = mode;
  report.record_count = test_records.size();

  const Eigen::MatrixXd features = spec.apply_all(test_records, &report.oov);
  const std::vector<ingest::LabelKind> labels = labels_of(test_records);

  std::vector<ingest::LabelKind> predicted;
  predicted.reserve(test_records.size());

  switch (mode) {
    case DetectorMode::kCascade: {
      detect::CascadeStats stats;
      const auto verdicts = detect::cascade_classify_all(features, sparse_model, plain_model,
                                                         thresholds, &stats);
      for (const auto& v : verdicts) predicted.push_back(v.label);
      report.escalation_fraction = stats.escalation_fraction();
      report.d1_decided = stats.d1_normal + stats.d1_anomaly;
      report.d2_decided = stats.escalated;
      break;
    }
    case DetectorMode::kD2Only:
    case DetectorMode::kD1Reconstruction: {
      const nn::AEModel& model =
          mode == DetectorMode::kD2Only ? plain_model : sparse_model;
      const double threshold = mode == DetectorMode::kD2Only ? thresholds.thr_ae : thr_d1r;
      Eigen::VectorXd latent, reconstruction;
      for (Eigen::Index i = 0; i < features.cols(); ++i) {
        nn::encode_into(model, features.col(i), latent);
        nn::decode_into(model, latent, reconstruction);
        const double err = (features.col(i) - reconstruction).squaredNorm();
        predicted.push_back(detect::d2_decide(err, threshold));
      }
      (mode == DetectorMode::kD2Only ? report.d2_decided : report.d1_decided) =
          test_records.size();
      break;
    }
  }

  report.matrix = confusion(predicted, labels);
  report.scalar = metrics(report.matrix);
  for (std::size_t i = 0; i < test_records.size(); ++i) {
    const auto& label = test_records[i].label;
    if (label.kind != ingest::LabelKind::kAnomaly) continue;
    auto& outcome = report.per_category[label.category.value_or(
        ingest::AttackCategory::kUnknown)];
    ++outcome.total;
    if (predicted[i] == ingest::LabelKind::kAnomaly) ++outcome.detected;
  }
  return report;
}

KddTestResult run_kddtest_experiment(const KddTestPaths& paths, const PipelineConfig& config) {
  const ingest::CategoryMap categories = ingest::CategoryMap::load(paths.categories_file);
  const ingest::ColumnSchema schema{true, true};
  const auto train = ingest::parse_records_file(paths.train_file, schema, categories,
                                                ingest::ParseMode::kStrict);
  const auto test = ingest::parse_records_file(paths.test_file, schema, categories,
                                               ingest::ParseMode::kStrict);

  KddTestResult result;
  result.train_summary = ingest::summarize(train.records);
  result.test_summary = ingest::summarize(test.records);
  result.artifacts = build_pipeline(train.records, config);

  const auto& a = result.artifacts;
  result.cascade = evaluate_dataset(a.spec, a.sparse_model, a.plain_model,
                                    a.calibration.thresholds, a.calibration.thr_d1r,
                                    test.records, DetectorMode::kCascade);
  result.d2_only = evaluate_dataset(a.spec, a.sparse_model, a.plain_model,
                                    a.calibration.thresholds, a.calibration.thr_d1r,
                                    test.records, DetectorMode::kD2Only);
  result.d1_reconstruction = evaluate_dataset(a.spec, a.sparse_model, a.plain_model,
                                              a.calibration.thresholds, a.calibration.thr_d1r,
                                              test.records, DetectorMode::kD1Reconstruction);
  result.cascade.seed = config.seed;
  result.d2_only.seed = config.seed;
  result.d1_reconstruction.seed = config.seed;
  return result;
}

SplitExperimentResult run_split_experiment(std::span<const ingest::LabeledFlow> records,
                                           const PipelineConfig& config) {
  const DataSplit split =
      split_dataset(records, config.validation_normals, config.validation_anomalies,
                    config.test_normals, config.test_anomalies, config.seed);
  PipelineArtifacts artifacts =
      train_and_calibrate(preprocess::TransformSpec::fit(records), split, config);

  SplitExperimentResult result;
  result.cascade = evaluate_dataset(artifacts.spec, artifacts.sparse_model,
                                    artifacts.plain_model, artifacts.calibration.thresholds,
                                    artifacts.calibration.thr_d1r, split.test,
                                    DetectorMode::kCascade);
  result.cascade.seed = config.seed;
  result.train_normals = split.train_normals.size();
  result.validation_normals = config.validation_normals;
  result.validation_anomalies = config.validation_anomalies;
  std::size_t test_normals = 0;
  for (const auto& r : split.test)
    if (r.label.kind == ingest::LabelKind::kNormal) ++test_normals;
  result.test_normals = test_normals;
  result.test_anomalies = split.test.size() - test_normals;
  return result;
}

std::vector<RatioPoint> ratio_sweep(const preprocess::TransformSpec& spec,
                                    const nn::AEModel& sparse_model,
                                    const nn::AEModel& plain_model,
                                    const detect::Thresholds& thresholds,
                                    std::span<const ingest::LabeledFlow> test_records,
                                    std::span<const int> ratios_percent, std::uint64_t seed) {
  std::vector<ingest::LabeledFlow> normals, anomalies;
  for (const auto& r : test_records)
    (r.label.kind == ingest::LabelKind::kNormal ? normals : anomalies).push_back(r);
  if (normals.empty() || anomalies.empty())
    throw ConfigError("ratio_sweep: both classes must be present");

  const Eigen::MatrixXd normal_features = spec.apply_all(normals);
  const Eigen::MatrixXd anomaly_features = spec.apply_all(anomalies);

  std::vector<RatioPoint> points;
  for (const int ratio : ratios_percent) {
    if (ratio <= 0) throw ConfigError("ratio_sweep: ratio must be positive");
    const auto k = static_cast<std::size_t>(
        std::llround(static_cast<double>(ratio) / 100.0 *
                     static_cast<double>(normals.size())));
    if (k == 0) throw ConfigError("ratio_sweep: subsample would be empty");
    if (k > anomalies.size())
      throw ConfigError("ratio_sweep: not enough anomalies for ratio " +
                        std::to_string(ratio) + "%");

    Rng rng(Rng::derive(seed, 0x5157u + static_cast<std::uint64_t>(ratio)));
    const auto chosen = rng.sample_indices(anomalies.size(), k);

    Eigen::MatrixXd mix(normal_features.rows(),
                        normal_features.cols() + static_cast<Eigen::Index>(k));
    mix.leftCols(normal_features.cols()) = normal_features;
    std::vector<ingest::LabelKind> labels(normals.size(), ingest::LabelKind::kNormal);
    for (std::size_t i = 0; i < k; ++i) {
      mix.col(normal_features.cols() + static_cast<Eigen::Index>(i)) =
          anomaly_features.col(static_cast<Eigen::Index>(chosen[i]));
      labels.push_back(ingest::LabelKind::kAnomaly);
    }

    const auto verdicts =
        detect::cascade_classify_all(mix, sparse_model, plain_model, thresholds);
    const Confusion c = confusion(verdicts, labels);
    const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
    RatioPoint point;
    point.ratio_percent = ratio;
    point.f_score =
        denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
    point.anomalies_used = k;
    points.push_back(point);
  }
  return points;
}

std::string TimingReport::to_json() const {
  json doc;
  doc["cascade_ns_per_flow"] = cascade_ns_per_flow;
  doc["d2_ns_per_flow"] = d2_ns_per_flow;
  doc["d1r_ns_per_flow"] = d1r_ns_per_flow;
  doc["cascade_over_d2"] = cascade_over_d2();
  doc["escalation_fraction"] = escalation_fraction;
  doc["repetitions"] = repetitions;
  doc["flows"] = flows;
  doc["score_sink"] = score_sink;
  doc["hardware"] = hardware;
  return doc.dump(2);
}

std::string TimingReport::format_table() const {
  std::ostringstream out;
  out << "per-flow classification time (" << flows << " flows, " << repetitions
      << " repetitions, median):\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "  cascade        %10.1f ns\n", cascade_ns_per_flow);
  out << buf;
  std::snprintf(buf, sizeof buf, "  d2 standalone  %10.1f ns\n", d2_ns_per_flow);
  out << buf;
  std::snprintf(buf, sizeof buf, "  d1r standalone %10.1f ns\n", d1r_ns_per_flow);
  out << buf;
  std::snprintf(buf, sizeof buf, "  cascade / d2   %10.3f   escalation %.2f%%\n",
                cascade_over_d2(), escalation_fraction * 100.0);
  out << buf;
  if (!hardware.empty()) out << "  hardware: " << hardware << '\n';
  return out.str();
}

TimingReport bench_inference(const nn::AEModel& sparse_model, const nn::AEModel& plain_model,
                             const detect::Thresholds& thresholds, double thr_d1r,
                             const Eigen::MatrixXd& flows, int repetitions,
                             std::string hardware) {
  if (flows.cols() == 0) throw ConfigError("bench: empty flow set");
  if (repetitions < 3) throw ConfigError("bench: repetitions must be >= 3");
  detect::check_compatible(sparse_model, plain_model);

  using clock = std::chrono::steady_clock;
  const auto per_flow_ns = [&](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::nano>(b - a).count() /
           static_cast<double>(flows.cols());
  };

  TimingReport report;
  report.repetitions = repetitions;
  report.flows = static_cast<std::uint64_t>(flows.cols());
  report.hardware = std::move(hardware);

  Eigen::VectorXd latent, reconstruction;
  const auto standalone_pass = [&](const nn::AEModel& model, double threshold) {
    double sink = 0;
    for (Eigen::Index i = 0; i < flows.cols(); ++i) {
      nn::encode_into(model, flows.col(i), latent);
      nn::decode_into(model, latent, reconstruction);
      const double err = (flows.col(i) - reconstruction).squaredNorm();
      sink += err;
      if (detect::d2_decide(err, threshold) == ingest::LabelKind::kAnomaly) sink += 1.0;
    }
    return sink;
  };

  // Warm-up: one untimed pass per mode.
  {
    detect::CascadeStats stats;
    const auto verdicts = detect::cascade_classify_all(flows, sparse_model, plain_model,
                                                       thresholds, &stats);
    report.escalation_fraction = stats.escalation_fraction();
    report.score_sink += verdicts.back().score;
  }
  report.score_sink += standalone_pass(plain_model, thresholds.thr_ae);
  report.score_sink += standalone_pass(sparse_model, thr_d1r);

  std::vector<double> cascade_ns, d2_ns, d1r_ns;
  for (int rep = 0; rep < repetitions; ++rep) {
    auto t0 = clock::now();
    const auto verdicts =
        detect::cascade_classify_all(flows, sparse_model, plain_model, thresholds);
    auto t1 = clock::now();
    cascade_ns.push_back(per_flow_ns(t0, t1));
    for (const auto& v : verdicts) report.score_sink += v.score;

    t0 = clock::now();
    report.score_sink += standalone_pass(plain_model, thresholds.thr_ae);
    t1 = clock::now();
    d2_ns.push_back(per_flow_ns(t0, t1));

    t0 = clock::now();
    report.score_sink += standalone_pass(sparse_model, thr_d1r);
    t1 = clock::now();
    d1r_ns.push_back(per_flow_ns(t0, t1));
  }

  const auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  };
  report.cascade_ns_per_flow = median(cascade_ns);
  report.d2_ns_per_flow = median(d2_ns);
  report.d1r_ns_per_flow = median(d1r_ns);
  return report;
}

}  // namespace autoids::evaluate
