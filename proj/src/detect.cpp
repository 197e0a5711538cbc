#include "autoids/detect.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "autoids/errors.hpp"

namespace autoids::detect {

std::string_view to_string(D1Outcome outcome) {
  switch (outcome) {
    case D1Outcome::kNormal: return "Normal";
    case D1Outcome::kAnomaly: return "Anomaly";
    case D1Outcome::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::string_view to_string(Stage stage) { return stage == Stage::kD1 ? "D1" : "D2"; }

double sparsity_value(const Eigen::VectorXd& latent, double eps_active) {
  if (latent.size() == 0) throw ConfigError("sparsity_value: empty latent vector");
  const auto active = (latent.array() > eps_active).count();
  return static_cast<double>(active) / static_cast<double>(latent.size());
}

D1Outcome d1_decide(double sparsity, const Thresholds& thresholds) {
  if (sparsity < thresholds.tau_min) return D1Outcome::kNormal;
  if (sparsity > thresholds.tau_max) return D1Outcome::kAnomaly;
  return D1Outcome::kUnknown;
}

double reconstruction_error(const nn::AEModel& model, const Eigen::VectorXd& x) {
  return nn::loss_plain(x, nn::forward(model, x).reconstruction);
}

ingest::LabelKind d2_decide(double reconstruction_err, double thr_ae) {
  return reconstruction_err > thr_ae ? ingest::LabelKind::kAnomaly
                                     : ingest::LabelKind::kNormal;
}

void check_compatible(const nn::AEModel& sparse_model, const nn::AEModel& plain_model) {
  if (sparse_model.kind != nn::ModelKind::kSparse)
    throw ArtifactError("cascade: first model is not the sparse detector");
  if (plain_model.kind != nn::ModelKind::kPlain)
    throw ArtifactError("cascade: second model is not the plain detector");
  if (sparse_model.input_dim() != plain_model.input_dim())
    throw ArtifactError("cascade: detector input dimensions differ");
  if (sparse_model.transform_hash != 0 && plain_model.transform_hash != 0 &&
      sparse_model.transform_hash != plain_model.transform_hash)
    throw ArtifactError("cascade: models were trained against different transforms");
}

namespace {

// Shared by the single-sample and batch entry points; the workspace keeps the
// per-flow path allocation-free.
struct Workspace {
  Eigen::VectorXd latent;
  Eigen::VectorXd reconstruction;
};

Verdict classify_one(const Eigen::VectorXd& x, const nn::AEModel& sparse_model,
                     const nn::AEModel& plain_model, const Thresholds& thresholds,
                     CascadeStats* stats, Workspace& ws) {
  // Stage 1 uses only the sparse encoder.
  nn::encode_into(sparse_model, x, ws.latent);
  const double s = sparsity_value(ws.latent, thresholds.eps_active);
  switch (d1_decide(s, thresholds)) {
    case D1Outcome::kNormal:
      if (stats) ++stats->d1_normal;
      return {ingest::LabelKind::kNormal, Stage::kD1, s};
    case D1Outcome::kAnomaly:
      if (stats) ++stats->d1_anomaly;
      return {ingest::LabelKind::kAnomaly, Stage::kD1, s};
    case D1Outcome::kUnknown:
      break;
  }
  if (stats) {
    ++stats->escalated;
    ++stats->plain_forward_calls;
  }
  nn::encode_into(plain_model, x, ws.latent);
  nn::decode_into(plain_model, ws.latent, ws.reconstruction);
  const double err = (x - ws.reconstruction).squaredNorm();
  return {d2_decide(err, thresholds.thr_ae), Stage::kD2, err};
}

}  // namespace

Verdict cascade_classify(const Eigen::VectorXd& x, const nn::AEModel& sparse_model,
                         const nn::AEModel& plain_model, const Thresholds& thresholds,
                         CascadeStats* stats) {
  check_compatible(sparse_model, plain_model);
  if (x.size() != sparse_model.input_dim())
    throw ConfigError("cascade: input dimension mismatch");
  Workspace ws;
  return classify_one(x, sparse_model, plain_model, thresholds, stats, ws);
}

std::vector<Verdict> cascade_classify_all(const Eigen::MatrixXd& xs,
                                          const nn::AEModel& sparse_model,
                                          const nn::AEModel& plain_model,
                                          const Thresholds& thresholds,
                                          CascadeStats* stats) {
  check_compatible(sparse_model, plain_model);
  if (xs.rows() != sparse_model.input_dim())
    throw ConfigError("cascade: input dimension mismatch");
  Workspace ws;
  std::vector<Verdict> verdicts;
  verdicts.reserve(static_cast<std::size_t>(xs.cols()));
  for (Eigen::Index i = 0; i < xs.cols(); ++i)
    verdicts.push_back(
        classify_one(xs.col(i), sparse_model, plain_model, thresholds, stats, ws));
  return verdicts;
}

std::string format_verdict_line(std::uint64_t id, const Verdict& verdict) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%llu,%s,%s,%.6g", static_cast<unsigned long long>(id),
                std::string(ingest::to_string(verdict.label)).c_str(),
                std::string(to_string(verdict.stage)).c_str(), verdict.score);
  return buf;
}

void save_thresholds_file(const ThresholdsFile& t, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = "autoids/thresholds";
  doc["version"] = 1;
  doc["tau_min"] = t.thresholds.tau_min;
  doc["tau_max"] = t.thresholds.tau_max;
  doc["thr_ae"] = t.thresholds.thr_ae;
  doc["eps_active"] = t.thresholds.eps_active;
  doc["thr_d1r"] = t.thr_d1r;
  doc["transform_hash"] = t.transform_hash;
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing thresholds");
}

ThresholdsFile load_thresholds_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open thresholds: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    if (doc.at("format").get<std::string>() != "autoids/thresholds")
      throw ArtifactError("not a thresholds file");
    if (doc.at("version").get<int>() != 1)
      throw ArtifactError("unsupported thresholds version");
    ThresholdsFile t;
    t.thresholds.tau_min = doc.at("tau_min").get<double>();
    t.thresholds.tau_max = doc.at("tau_max").get<double>();
    t.thresholds.thr_ae = doc.at("thr_ae").get<double>();
    t.thresholds.eps_active = doc.at("eps_active").get<double>();
    t.thr_d1r = doc.at("thr_d1r").get<double>();
    t.transform_hash = doc.at("transform_hash").get<std::uint64_t>();
    if (t.thresholds.tau_min > t.thresholds.tau_max)
      throw ArtifactError("thresholds file violates tau_min <= tau_max");
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ArtifactError(std::string("corrupt thresholds file: ") + e.what());
  }
}

}  // namespace autoids::detect
