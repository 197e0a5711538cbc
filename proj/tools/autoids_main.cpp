// autoids: semi-supervised network intrusion detection over NSL-KDD-format
// flow records. Two autoencoder detectors trained on normal traffic only,
// composed as a cascade: a sparsity test decides confident flows cheaply and
// escalates the rest to a reconstruction-error test.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "autoids/errors.hpp"
#include "autoids/evaluate.hpp"
#include "autoids/rng.hpp"

namespace {

using namespace autoids;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitArtifact = 3;

// Artifact files get their own exit code; wrap loads so a missing model file
// is not reported like a missing dataset.
template <typename Fn>
auto load_artifact(Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    throw ArtifactError(e.what());
  }
}

preprocess::TransformSpec load_spec(const fs::path& path) {
  return load_artifact([&] { return preprocess::TransformSpec::load_file(path); });
}

nn::AEModel load_model_checked(const fs::path& path, nn::ModelKind kind,
                               const preprocess::TransformSpec& spec) {
  auto model = load_artifact([&] { return nn::load_model_file(path, kind); });
  if (model.transform_hash != 0 && model.transform_hash != spec.content_hash())
    throw ArtifactError(path.string() + ": model was trained against a different transform");
  if (model.input_dim() != spec.dimension())
    throw ArtifactError(path.string() + ": model input dimension does not match transform");
  return model;
}

detect::ThresholdsFile load_thresholds_checked(const fs::path& path,
                                               const preprocess::TransformSpec& spec) {
  auto t = load_artifact([&] { return detect::load_thresholds_file(path); });
  if (t.transform_hash != 0 && t.transform_hash != spec.content_hash())
    throw ArtifactError(path.string() +
                        ": thresholds were calibrated against a different transform");
  return t;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
  if (!out) throw IoError("failed writing: " + path.string());
}

ingest::CategoryMap load_categories(const fs::path& path) {
  return ingest::CategoryMap::load(path);
}

struct DatasetFlags {
  std::string path;
  bool no_difficulty = false;
  bool no_label = false;
  bool lenient = false;
  std::string categories = "data/attack_categories.csv";

  ingest::ColumnSchema schema() const { return {!no_label, !no_difficulty}; }
  ingest::ParseMode mode() const {
    return lenient ? ingest::ParseMode::kLenient : ingest::ParseMode::kStrict;
  }
};

void add_dataset_flags(CLI::App* cmd, DatasetFlags& flags, const std::string& option,
                       const std::string& what, bool with_label_flag = false) {
  cmd->add_option(option, flags.path, what)->required();
  cmd->add_flag("--no-difficulty", flags.no_difficulty,
                "records carry no trailing difficulty column");
  cmd->add_flag("--lenient", flags.lenient, "skip malformed records instead of aborting");
  cmd->add_option("--categories", flags.categories, "attack-name,category mapping file")
      ->envname("AUTOIDS_CATEGORIES");
  if (with_label_flag)
    cmd->add_flag("--no-label", flags.no_label, "records carry no label column");
}

std::vector<ingest::LabeledFlow> parse_dataset(const DatasetFlags& flags) {
  const auto result = ingest::parse_records_file(flags.path, flags.schema(),
                                                 load_categories(flags.categories),
                                                 flags.mode());
  if (!result.diagnostics.empty())
    std::cerr << "warning: skipped " << result.diagnostics.size() << " malformed record(s), first at line "
              << result.diagnostics.front().line_number << '\n';
  if (result.records.empty()) throw ParseError(flags.path + ": empty dataset");
  return result.records;
}

struct TrainFlags {
  nn::TrainConfig config;
  Eigen::Index sparse_hidden = 140;
  Eigen::Index plain_hidden = 80;
  std::string regularizer = "kl";
  double monitor_fraction = 0.1;

  nn::TrainConfig resolved() const {
    nn::TrainConfig c = config;
    c.regularizer = regularizer == "l1" ? nn::RegularizerMode::kL1Activity
                                        : nn::RegularizerMode::kKl;
    return c;
  }
};

void add_train_flags(CLI::App* cmd, TrainFlags& flags) {
  cmd->add_option("--epochs", flags.config.epochs, "training epochs")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--batch", flags.config.batch_size, "mini-batch size")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lr", flags.config.learning_rate, "Adam learning rate");
  cmd->add_option("--rho", flags.config.sparsity_target, "sparsity target (KL mode)");
  cmd->add_option("--beta", flags.config.sparsity_weight, "KL penalty weight");
  cmd->add_option("--l1", flags.config.l1_weight, "L1 activity coefficient");
  cmd->add_option("--regularizer", flags.regularizer, "sparse regularizer: kl or l1")
      ->check(CLI::IsMember({"kl", "l1"}));
  cmd->add_option("--sparse-hidden", flags.sparse_hidden, "sparse detector hidden units");
  cmd->add_option("--plain-hidden", flags.plain_hidden, "plain detector hidden units");
  cmd->add_option("--monitor-fraction", flags.monitor_fraction,
                  "normal-only fraction held out for loss monitoring");
}

struct BandFlags {
  calibrate::BandSearchConfig config;
  std::string objective = "accuracy";
  double eps_active = detect::kDefaultEpsActive;

  calibrate::BandSearchConfig resolved() const {
    calibrate::BandSearchConfig c = config;
    c.objective = objective == "fscore"
                      ? calibrate::BandSearchConfig::Objective::kMaxFScore
                      : calibrate::BandSearchConfig::Objective::kMaxAccuracy;
    return c;
  }
};

void add_band_flags(CLI::App* cmd, BandFlags& flags) {
  cmd->add_option("--purity", flags.config.min_purity,
                  "minimum purity of each region decided at stage 1");
  cmd->add_option("--resolution", flags.config.resolution,
                  "quantile grid resolution for the band search");
  cmd->add_option("--objective", flags.objective, "band tie-break objective")
      ->check(CLI::IsMember({"accuracy", "fscore"}));
  cmd->add_option("--eps-active", flags.eps_active, "latent activity cutoff");
}

struct Artifacts {
  preprocess::TransformSpec spec;
  nn::AEModel sparse;
  nn::AEModel plain;
  detect::ThresholdsFile thresholds;
};

struct ArtifactFlags {
  std::string spec_path, sparse_path, plain_path, thresholds_path;

  Artifacts load() const {
    Artifacts a;
    a.spec = load_spec(spec_path);
    a.sparse = load_model_checked(sparse_path, nn::ModelKind::kSparse, a.spec);
    a.plain = load_model_checked(plain_path, nn::ModelKind::kPlain, a.spec);
    a.thresholds = load_thresholds_checked(thresholds_path, a.spec);
    return a;
  }
};

void add_artifact_flags(CLI::App* cmd, ArtifactFlags& flags, bool with_thresholds = true) {
  cmd->add_option("--spec", flags.spec_path, "transform spec file")->required();
  cmd->add_option("--sparse", flags.sparse_path, "sparse detector model file")->required();
  cmd->add_option("--plain", flags.plain_path, "plain detector model file")->required();
  if (with_thresholds)
    cmd->add_option("--thresholds", flags.thresholds_path, "thresholds file")->required();
}

// ---------------------------------------------------------------------------

int cmd_preprocess(const DatasetFlags& data, const std::string& out_path) {
  const auto records = parse_dataset(data);
  const auto spec = preprocess::TransformSpec::fit(std::span(records));
  spec.save_file(out_path);
  std::cout << "records: " << ingest::format_summary(ingest::summarize(records)) << '\n';
  std::cout << "dimension: " << spec.dimension() << '\n';
  std::cout << "transform hash: " << spec.content_hash() << '\n';
  std::cout << "wrote " << out_path << '\n';
  return kExitOk;
}

int cmd_split(const DatasetFlags& data, std::uint64_t seed, std::size_t val_normals,
              std::size_t val_anomalies, const std::string& out_train,
              const std::string& out_validation) {
  const auto records = parse_dataset(data);
  const auto split =
      evaluate::split_dataset(records, val_normals, val_anomalies, 0, 0, seed);

  const auto dump = [&](const std::string& path,
                        const std::vector<ingest::LabeledFlow>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const auto& r : rows) out << ingest::to_csv(r, data.schema()) << '\n';
    if (!out) throw IoError("failed writing: " + path);
  };
  dump(out_train, split.train_normals);
  dump(out_validation, split.validation);
  std::cout << "train normals: " << split.train_normals.size() << " -> " << out_train
            << '\n';
  std::cout << "validation: " << split.validation.size() << " (" << val_normals
            << " normal + " << val_anomalies << " anomaly) -> " << out_validation << '\n';
  return kExitOk;
}

int cmd_train(const DatasetFlags& data, const std::string& spec_path,
              const std::string& kind_name, const TrainFlags& train_flags,
              std::uint64_t seed, const std::string& out_path,
              const std::string& history_path) {
  const auto spec = load_spec(spec_path);
  const auto records = parse_dataset(data);

  std::vector<ingest::LabeledFlow> normals;
  for (const auto& r : records)
    if (r.label.kind == ingest::LabelKind::kNormal) normals.push_back(r);
  if (normals.empty()) throw ParseError("no normal flows in training input");

  const auto kind =
      kind_name == "sparse" ? nn::ModelKind::kSparse : nn::ModelKind::kPlain;
  nn::TrainConfig config = train_flags.resolved();
  config.seed = seed;

  // Normal-only monitoring split.
  Rng rng(Rng::derive(seed, 2));
  rng.shuffle(normals);
  std::size_t n_monitor =
      static_cast<std::size_t>(train_flags.monitor_fraction * normals.size());
  if (n_monitor >= normals.size()) n_monitor = 0;
  const std::span<const ingest::LabeledFlow> monitor_span(normals.data(), n_monitor);
  const std::span<const ingest::LabeledFlow> train_span(normals.data() + n_monitor,
                                                        normals.size() - n_monitor);
  const Eigen::MatrixXd monitor = spec.apply_all(monitor_span);
  const Eigen::MatrixXd training = spec.apply_all(train_span);

  const Eigen::Index hidden = kind == nn::ModelKind::kSparse ? train_flags.sparse_hidden
                                                             : train_flags.plain_hidden;
  std::cout << "training " << nn::to_string(kind) << " detector: " << training.cols()
            << " normal flows (" << monitor.cols() << " monitored), dimension "
            << spec.dimension() << ", hidden " << hidden << ", epochs " << config.epochs
            << ", seed " << seed << '\n';

  auto result = nn::train(kind, hidden, training, monitor, config);
  result.model.transform_hash = spec.content_hash();
  nn::save_model_file(result.model, out_path);

  std::cout << "loss: first epoch " << result.history.train_loss.front()
            << ", last epoch " << result.history.train_loss.back() << '\n';
  std::cout << "wrote " << out_path << '\n';

  if (!history_path.empty()) {
    nlohmann::json doc;
    doc["kind"] = std::string(nn::to_string(kind));
    doc["seed"] = seed;
    doc["train_loss"] = result.history.train_loss;
    doc["validation_loss"] = result.history.validation_loss;
    write_text_file(history_path, doc.dump(2));
  }
  return kExitOk;
}

int cmd_calibrate(const std::string& spec_path, const std::string& sparse_path,
                  const std::string& plain_path, const DatasetFlags& validation_data,
                  const DatasetFlags& sample_data, std::optional<std::uint64_t> seed,
                  std::size_t val_normals, std::size_t val_anomalies,
                  const BandFlags& band, const std::string& out_path,
                  const std::string& report_path) {
  const auto spec = load_spec(spec_path);
  const auto sparse = load_model_checked(sparse_path, nn::ModelKind::kSparse, spec);
  const auto plain = load_model_checked(plain_path, nn::ModelKind::kPlain, spec);

  std::vector<ingest::LabeledFlow> validation;
  if (!validation_data.path.empty()) {
    validation = parse_dataset(validation_data);
  } else {
    if (!seed) throw ConfigError("--seed is required when sampling with --input");
    const auto records = parse_dataset(sample_data);
    validation =
        evaluate::split_dataset(records, val_normals, val_anomalies, 0, 0, *seed)
            .validation;
  }

  const auto outcome = evaluate::calibrate_thresholds(spec, sparse, plain, validation,
                                                      band.resolved(), band.eps_active);
  detect::ThresholdsFile file;
  file.thresholds = outcome.thresholds;
  file.thr_d1r = outcome.thr_d1r;
  file.transform_hash = spec.content_hash();
  detect::save_thresholds_file(file, out_path);

  std::cout << outcome.format_table();
  std::cout << "wrote " << out_path << '\n';
  if (!report_path.empty()) write_text_file(report_path, outcome.to_json());
  return kExitOk;
}

evaluate::EvaluationReport evaluate_mode(const Artifacts& a,
                                         std::span<const ingest::LabeledFlow> records,
                                         evaluate::DetectorMode mode) {
  return evaluate::evaluate_dataset(a.spec, a.sparse, a.plain, a.thresholds.thresholds,
                                    a.thresholds.thr_d1r, records, mode);
}

int cmd_evaluate(const ArtifactFlags& artifact_flags, const DatasetFlags& data,
                 const std::string& mode_name, const std::string& report_path) {
  const auto artifacts = artifact_flags.load();
  const auto records = parse_dataset(data);
  const auto mode = mode_name == "d2"    ? evaluate::DetectorMode::kD2Only
                    : mode_name == "d1r" ? evaluate::DetectorMode::kD1Reconstruction
                                         : evaluate::DetectorMode::kCascade;
  const auto report = evaluate_mode(artifacts, records, mode);
  std::cout << report.format_table();
  if (!report_path.empty()) write_text_file(report_path, report.to_json());
  return kExitOk;
}

int cmd_ablate(const ArtifactFlags& artifact_flags, const DatasetFlags& data,
               const std::string& report_path) {
  const auto artifacts = artifact_flags.load();
  const auto records = parse_dataset(data);

  const auto cascade =
      evaluate_mode(artifacts, records, evaluate::DetectorMode::kCascade);
  const auto d2 = evaluate_mode(artifacts, records, evaluate::DetectorMode::kD2Only);
  const auto d1r =
      evaluate_mode(artifacts, records, evaluate::DetectorMode::kD1Reconstruction);

  const auto pct = [](const std::optional<double>& v) {
    if (!v) return std::string("--");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
    return std::string(buf);
  };
  std::cout << "metric      cascade       d2-only       d1-by-reconstruction\n";
  const auto row = [&](const char* name, auto field) {
    std::cout << name << "  " << pct(cascade.scalar.*field) << "        "
              << pct(d2.scalar.*field) << "        " << pct(d1r.scalar.*field) << '\n';
  };
  row("ACC%   ", &evaluate::Metrics::accuracy);
  row("PR%    ", &evaluate::Metrics::precision);
  row("RE%    ", &evaluate::Metrics::recall);
  row("FS%    ", &evaluate::Metrics::f_score);
  row("FPR%s  ", &evaluate::Metrics::fpr_std);
  row("FPR%a  ", &evaluate::Metrics::fpr_alt);
  std::cout << "escalation: " << pct(cascade.escalation_fraction) << "%\n";

  if (!report_path.empty()) {
    nlohmann::json doc;
    doc["cascade"] = nlohmann::json::parse(cascade.to_json());
    doc["d2"] = nlohmann::json::parse(d2.to_json());
    doc["d1r"] = nlohmann::json::parse(d1r.to_json());
    write_text_file(report_path, doc.dump(2));
  }
  return kExitOk;
}

int cmd_classify(const ArtifactFlags& artifact_flags, const DatasetFlags& input) {
  const auto artifacts = artifact_flags.load();
  detect::check_compatible(artifacts.sparse, artifacts.plain);

  std::ifstream file;
  std::istream* in = &std::cin;
  if (input.path != "-") {
    file.open(input.path);
    if (!file) throw IoError("cannot open input: " + input.path);
    in = &file;
  }
  const auto categories = input.no_label ? ingest::CategoryMap{}
                                         : load_categories(input.categories);
  const auto schema = input.schema();
  const bool strict = !input.lenient;

  detect::CascadeStats stats;
  std::uint64_t normal_count = 0, anomaly_count = 0, error_count = 0;
  std::uint64_t line_no = 0;
  std::string line;
  Eigen::VectorXd features;
  while (std::getline(*in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ingest::LabeledFlow record;
    try {
      std::istringstream one(line);
      auto parsed = ingest::parse_records(one, schema, categories,
                                          ingest::ParseMode::kStrict);
      record = std::move(parsed.records.at(0));
    } catch (const ParseError& e) {
      if (strict) throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      ++error_count;
      std::cout << line_no << ",Error,-," << e.what() << '\n';
      continue;
    }
    features = artifacts.spec.apply(record.flow);
    const auto verdict = detect::cascade_classify(features, artifacts.sparse,
                                                  artifacts.plain,
                                                  artifacts.thresholds.thresholds, &stats);
    verdict.label == ingest::LabelKind::kNormal ? ++normal_count : ++anomaly_count;
    std::cout << detect::format_verdict_line(line_no, verdict);
    if (schema.has_label) std::cout << ',' << record.label.token;
    std::cout << '\n';
  }
  std::cout << "# classified=" << normal_count + anomaly_count
            << " normal=" << normal_count << " anomaly=" << anomaly_count
            << " d1=" << stats.d1_normal + stats.d1_anomaly << " d2=" << stats.escalated
            << " escalation=" << stats.escalation_fraction() << " errors=" << error_count
            << '\n';
  return kExitOk;
}

int cmd_bench(const ArtifactFlags& artifact_flags, const DatasetFlags& data,
              int repetitions, const std::string& hardware,
              const std::string& report_path) {
  const auto artifacts = artifact_flags.load();
  const auto records = parse_dataset(data);
  const Eigen::MatrixXd flows = artifacts.spec.apply_all(std::span(records));
  const auto report =
      evaluate::bench_inference(artifacts.sparse, artifacts.plain,
                                artifacts.thresholds.thresholds,
                                artifacts.thresholds.thr_d1r, flows, repetitions, hardware);
  std::cout << report.format_table();
  if (!report_path.empty()) write_text_file(report_path, report.to_json());
  return kExitOk;
}

int cmd_ratio_sweep(const ArtifactFlags& artifact_flags, const DatasetFlags& data,
                    std::uint64_t seed, std::vector<int> ratios,
                    const std::string& report_path) {
  const auto artifacts = artifact_flags.load();
  const auto records = parse_dataset(data);
  if (ratios.empty()) ratios = {10, 20, 30, 40, 50};

  const auto points =
      evaluate::ratio_sweep(artifacts.spec, artifacts.sparse, artifacts.plain,
                            artifacts.thresholds.thresholds, records, ratios, seed);
  nlohmann::json doc = nlohmann::json::array();
  std::cout << "anomaly%   f-score   anomalies-used\n";
  for (const auto& p : points) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%7d   %7.4f   %zu\n", p.ratio_percent, p.f_score,
                  p.anomalies_used);
    std::cout << buf;
    doc.push_back({{"ratio_percent", p.ratio_percent},
                   {"f_score", p.f_score},
                   {"anomalies_used", p.anomalies_used}});
  }
  if (!report_path.empty())
    write_text_file(report_path, nlohmann::json{{"seed", seed}, {"points", doc}}.dump(2));
  return kExitOk;
}

int cmd_split_experiment(const DatasetFlags& data, std::uint64_t seed,
                         const TrainFlags& train_flags, const BandFlags& band,
                         std::size_t val_normals, std::size_t val_anomalies,
                         std::size_t test_normals, std::size_t test_anomalies,
                         const std::string& report_path) {
  const auto records = parse_dataset(data);

  evaluate::PipelineConfig config;
  config.sparse_train = train_flags.resolved();
  config.plain_train = train_flags.resolved();
  config.sparse_hidden = train_flags.sparse_hidden;
  config.plain_hidden = train_flags.plain_hidden;
  config.monitor_fraction = train_flags.monitor_fraction;
  config.band = band.resolved();
  config.eps_active = band.eps_active;
  config.seed = seed;
  config.validation_normals = val_normals;
  config.validation_anomalies = val_anomalies;
  config.test_normals = test_normals;
  config.test_anomalies = test_anomalies;

  const auto result = evaluate::run_split_experiment(records, config);
  std::cout << "split: train normals " << result.train_normals << ", validation "
            << result.validation_normals << "+" << result.validation_anomalies
            << ", test " << result.test_normals << "+" << result.test_anomalies << '\n';
  std::cout << result.cascade.format_table();
  if (!report_path.empty()) write_text_file(report_path, result.cascade.to_json());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"autoencoder-cascade intrusion detection over NSL-KDD flow records"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file");
  app.allow_config_extras(CLI::config_extras_mode::ignore);

  std::function<int()> action;

  // preprocess
  {
    auto* cmd = app.add_subcommand("preprocess",
                                   "fit the encoding pipeline on a training file");
    auto data = std::make_shared<DatasetFlags>();
    auto out = std::make_shared<std::string>();
    add_dataset_flags(cmd, *data, "--train", "training records (CSV)");
    cmd->add_option("--out", *out, "output transform spec path")->required();
    cmd->callback([&action, data, out] {
      action = [data, out] { return cmd_preprocess(*data, *out); };
    });
  }

  // split
  {
    auto* cmd = app.add_subcommand(
        "split", "carve a labeled validation split off a training file");
    auto data = std::make_shared<DatasetFlags>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto vn = std::make_shared<std::size_t>(6735);
    auto va = std::make_shared<std::size_t>(6735);
    auto out_train = std::make_shared<std::string>();
    auto out_val = std::make_shared<std::string>();
    add_dataset_flags(cmd, *data, "--input", "training records (CSV)");
    cmd->add_option("--seed", *seed, "sampling seed")->required();
    cmd->add_option("--val-normals", *vn, "validation normal count");
    cmd->add_option("--val-anomalies", *va, "validation anomaly count");
    cmd->add_option("--out-train", *out_train, "remaining normal records")->required();
    cmd->add_option("--out-validation", *out_val, "labeled validation records")
        ->required();
    cmd->callback([&action, data, seed, vn, va, out_train, out_val] {
      action = [=] { return cmd_split(*data, *seed, *vn, *va, *out_train, *out_val); };
    });
  }

  // train
  {
    auto* cmd = app.add_subcommand("train", "train one detector on normal flows");
    auto data = std::make_shared<DatasetFlags>();
    auto spec = std::make_shared<std::string>();
    auto kind = std::make_shared<std::string>();
    auto flags = std::make_shared<TrainFlags>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto out = std::make_shared<std::string>();
    auto history = std::make_shared<std::string>();
    add_dataset_flags(cmd, *data, "--input", "training records (CSV)");
    cmd->add_option("--spec", *spec, "transform spec file")->required();
    cmd->add_option("--kind", *kind, "detector kind")
        ->check(CLI::IsMember({"sparse", "plain"}))
        ->required();
    cmd->add_option("--seed", *seed, "training seed")->required();
    cmd->add_option("--out", *out, "output model path")->required();
    cmd->add_option("--history", *history, "optional per-epoch loss JSON");
    add_train_flags(cmd, *flags);
    cmd->callback([&action, data, spec, kind, flags, seed, out, history] {
      action = [=] {
        return cmd_train(*data, *spec, *kind, *flags, *seed, *out, *history);
      };
    });
  }

  // calibrate
  {
    auto* cmd = app.add_subcommand(
        "calibrate", "choose thresholds on a labeled validation set");
    auto spec = std::make_shared<std::string>();
    auto sparse = std::make_shared<std::string>();
    auto plain = std::make_shared<std::string>();
    auto validation = std::make_shared<DatasetFlags>();
    auto sample = std::make_shared<DatasetFlags>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto has_seed = std::make_shared<bool>(false);
    auto vn = std::make_shared<std::size_t>(6735);
    auto va = std::make_shared<std::size_t>(6735);
    auto band = std::make_shared<BandFlags>();
    auto out = std::make_shared<std::string>();
    auto report = std::make_shared<std::string>();

    cmd->add_option("--spec", *spec, "transform spec file")->required();
    cmd->add_option("--sparse", *sparse, "sparse detector model")->required();
    cmd->add_option("--plain", *plain, "plain detector model")->required();
    auto* val_opt = cmd->add_option("--validation", validation->path,
                                    "labeled validation records (CSV)");
    auto* input_opt = cmd->add_option(
        "--input", sample->path, "full training file to sample a validation split from");
    val_opt->excludes(input_opt);
    input_opt->excludes(val_opt);
    auto* seed_opt = cmd->add_option("--seed", *seed, "sampling seed (with --input)");
    cmd->add_option("--val-normals", *vn, "sampled validation normal count");
    cmd->add_option("--val-anomalies", *va, "sampled validation anomaly count");
    cmd->add_flag("--no-difficulty", validation->no_difficulty,
                  "records carry no trailing difficulty column");
    cmd->add_flag("--lenient", validation->lenient,
                  "skip malformed records instead of aborting");
    cmd->add_option("--categories", validation->categories,
                    "attack-name,category mapping file")
        ->envname("AUTOIDS_CATEGORIES");
    cmd->add_option("--out", *out, "output thresholds path")->required();
    cmd->add_option("--report", *report, "calibration report JSON path");
    add_band_flags(cmd, *band);

    cmd->callback([&action, spec, sparse, plain, validation, sample, seed, has_seed, vn,
                   va, band, out, report, seed_opt] {
      *has_seed = seed_opt->count() > 0;
      action = [=] {
        sample->no_difficulty = validation->no_difficulty;
        sample->lenient = validation->lenient;
        sample->categories = validation->categories;
        if (validation->path.empty() && sample->path.empty())
          throw ConfigError("one of --validation or --input is required");
        return cmd_calibrate(*spec, *sparse, *plain, *validation, *sample,
                             *has_seed ? std::optional(*seed) : std::nullopt, *vn, *va,
                             *band, *out, *report);
      };
    });
  }

  // evaluate
  {
    auto* cmd = app.add_subcommand("evaluate", "classify a labeled test file and report");
    auto artifacts = std::make_shared<ArtifactFlags>();
    auto data = std::make_shared<DatasetFlags>();
    auto mode = std::make_shared<std::string>("cascade");
    auto report = std::make_shared<std::string>();
    add_artifact_flags(cmd, *artifacts);
    add_dataset_flags(cmd, *data, "--test", "labeled test records (CSV)");
    cmd->add_option("--mode", *mode, "detector mode")
        ->check(CLI::IsMember({"cascade", "d2", "d1r"}));
    cmd->add_option("--report", *report, "report JSON path");
    cmd->callback([&action, artifacts, data, mode, report] {
      action = [=] { return cmd_evaluate(*artifacts, *data, *mode, *report); };
    });
  }

  // ablate
  {
    auto* cmd = app.add_subcommand(
        "ablate", "compare the cascade against each detector standalone");
    auto artifacts = std::make_shared<ArtifactFlags>();
    auto data = std::make_shared<DatasetFlags>();
    auto report = std::make_shared<std::string>();
    add_artifact_flags(cmd, *artifacts);
    add_dataset_flags(cmd, *data, "--test", "labeled test records (CSV)");
    cmd->add_option("--report", *report, "report JSON path");
    cmd->callback([&action, artifacts, data, report] {
      action = [=] { return cmd_ablate(*artifacts, *data, *report); };
    });
  }

  // classify
  {
    auto* cmd = app.add_subcommand("classify",
                                   "stream verdicts for records from a file or stdin");
    auto artifacts = std::make_shared<ArtifactFlags>();
    auto input = std::make_shared<DatasetFlags>();
    add_artifact_flags(cmd, *artifacts);
    cmd->add_option("--input", input->path, "input records, '-' for stdin")
        ->default_val("-");
    cmd->add_flag("--no-label", input->no_label, "records carry no label column");
    cmd->add_flag("--no-difficulty", input->no_difficulty,
                  "records carry no trailing difficulty column");
    cmd->add_flag("--lenient", input->lenient,
                  "emit an error line for malformed records and continue");
    cmd->add_option("--categories", input->categories,
                    "attack-name,category mapping file")
        ->envname("AUTOIDS_CATEGORIES");
    cmd->callback([&action, artifacts, input] {
      action = [=] { return cmd_classify(*artifacts, *input); };
    });
  }

  // bench
  {
    auto* cmd = app.add_subcommand(
        "bench", "time per-flow classification for cascade and standalone modes");
    auto artifacts = std::make_shared<ArtifactFlags>();
    auto data = std::make_shared<DatasetFlags>();
    auto reps = std::make_shared<int>(5);
    auto hardware = std::make_shared<std::string>();
    auto report = std::make_shared<std::string>();
    add_artifact_flags(cmd, *artifacts);
    add_dataset_flags(cmd, *data, "--input", "flow records (CSV)", true);
    cmd->add_option("--repetitions", *reps, "timed repetitions (>= 3)");
    cmd->add_option("--hardware", *hardware, "hardware descriptor for the report");
    cmd->add_option("--report", *report, "report JSON path");
    cmd->callback([&action, artifacts, data, reps, hardware, report] {
      action = [=] { return cmd_bench(*artifacts, *data, *reps, *hardware, *report); };
    });
  }

  // ratio-sweep
  {
    auto* cmd = app.add_subcommand(
        "ratio-sweep", "f-score as the anomaly share of the test mix varies");
    auto artifacts = std::make_shared<ArtifactFlags>();
    auto data = std::make_shared<DatasetFlags>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto ratios = std::make_shared<std::vector<int>>();
    auto report = std::make_shared<std::string>();
    add_artifact_flags(cmd, *artifacts);
    add_dataset_flags(cmd, *data, "--test", "labeled test records (CSV)");
    cmd->add_option("--seed", *seed, "subsampling seed")->required();
    cmd->add_option("--ratios", *ratios, "anomaly percentages (default 10..50)");
    cmd->add_option("--report", *report, "report JSON path");
    cmd->callback([&action, artifacts, data, seed, ratios, report] {
      action = [=] { return cmd_ratio_sweep(*artifacts, *data, *seed, *ratios, *report); };
    });
  }

  // split-experiment
  {
    auto* cmd = app.add_subcommand(
        "split-experiment",
        "train, calibrate and evaluate inside one labeled file (seeded split)");
    auto data = std::make_shared<DatasetFlags>();
    auto seed = std::make_shared<std::uint64_t>(0);
    auto train_flags = std::make_shared<TrainFlags>();
    auto band = std::make_shared<BandFlags>();
    auto vn = std::make_shared<std::size_t>(6735);
    auto va = std::make_shared<std::size_t>(6735);
    auto tn = std::make_shared<std::size_t>(6735);
    auto ta = std::make_shared<std::size_t>(6735);
    auto report = std::make_shared<std::string>();
    add_dataset_flags(cmd, *data, "--train", "labeled records (CSV)");
    cmd->add_option("--seed", *seed, "experiment seed")->required();
    cmd->add_option("--val-normals", *vn, "validation normal count");
    cmd->add_option("--val-anomalies", *va, "validation anomaly count");
    cmd->add_option("--test-normals", *tn, "test normal count");
    cmd->add_option("--test-anomalies", *ta, "test anomaly count");
    cmd->add_option("--report", *report, "report JSON path");
    add_train_flags(cmd, *train_flags);
    add_band_flags(cmd, *band);
    cmd->callback([&action, data, seed, train_flags, band, vn, va, tn, ta, report] {
      action = [=] {
        return cmd_split_experiment(*data, *seed, *train_flags, *band, *vn, *va, *tn,
                                    *ta, *report);
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return action();
  } catch (const ArtifactError& e) {
    std::cerr << "artifact error: " << e.what() << '\n';
    return kExitArtifact;
  } catch (const ParseError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const IoError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
