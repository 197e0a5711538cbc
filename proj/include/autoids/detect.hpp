#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "autoids/ingest.hpp"
#include "autoids/nn_core.hpp"

namespace autoids::detect {

struct Thresholds {
  double tau_min = 0.0;
  double tau_max = 1.0;
  double thr_ae = 0.0;
  // Activity cutoff for "non-zero" latent units. The rectifier produces
  // exact zeros, but accumulated arithmetic may not.
  double eps_active = 1e-6;
};

inline constexpr double kDefaultEpsActive = 1e-6;

enum class D1Outcome : std::uint8_t { kNormal, kAnomaly, kUnknown };
enum class Stage : std::uint8_t { kD1 = 1, kD2 = 2 };

std::string_view to_string(D1Outcome outcome);
std::string_view to_string(Stage stage);

struct Verdict {
  ingest::LabelKind label = ingest::LabelKind::kNormal;
  Stage stage = Stage::kD1;
  // Sparsity value for stage D1, reconstruction error for stage D2.
  double score = 0.0;
};

// Fraction of latent units with value > eps_active.
double sparsity_value(const Eigen::VectorXd& latent, double eps_active);

// s < tau_min -> Normal, s > tau_max -> Anomaly, otherwise Unknown.
// Both boundaries are inclusive to Unknown.
D1Outcome d1_decide(double sparsity, const Thresholds& thresholds);

// Squared euclidean error between x and the model's reconstruction of x.
// Normally called on the plain model; also valid on the sparse one when it
// is evaluated standalone as a reconstruction detector.
double reconstruction_error(const nn::AEModel& model, const Eigen::VectorXd& x);

// err > thr_ae -> Anomaly (strict), otherwise Normal.
ingest::LabelKind d2_decide(double reconstruction_err, double thr_ae);

// Mutable only on the test/reporting side; classification itself is pure.
struct CascadeStats {
  std::uint64_t d1_normal = 0;
  std::uint64_t d1_anomaly = 0;
  std::uint64_t escalated = 0;
  std::uint64_t plain_forward_calls = 0;

  std::uint64_t total() const { return d1_normal + d1_anomaly + escalated; }
  double escalation_fraction() const {
    const auto n = total();
    return n == 0 ? 0.0 : static_cast<double>(escalated) / static_cast<double>(n);
  }
};

// Two-stage classification. The sparse model contributes only its encoder
// (its decoder is never evaluated here), and the plain model runs only for
// flows the first stage leaves Unknown.
Verdict cascade_classify(const Eigen::VectorXd& x, const nn::AEModel& sparse_model,
                         const nn::AEModel& plain_model, const Thresholds& thresholds,
                         CascadeStats* stats = nullptr);

// Column-per-sample batch form with a reused workspace.
std::vector<Verdict> cascade_classify_all(const Eigen::MatrixXd& xs,
                                          const nn::AEModel& sparse_model,
                                          const nn::AEModel& plain_model,
                                          const Thresholds& thresholds,
                                          CascadeStats* stats = nullptr);

// Checks dimensions and transform hashes; throws ArtifactError on mismatch.
void check_compatible(const nn::AEModel& sparse_model, const nn::AEModel& plain_model);

// CLI stream format: id,label,stage,score with 6 significant digits.
std::string format_verdict_line(std::uint64_t id, const Verdict& verdict);

// Threshold artifact (JSON): the cascade thresholds plus the standalone
// reconstruction threshold for the sparse model and the transform hash the
// calibration ran against.
struct ThresholdsFile {
  Thresholds thresholds;
  double thr_d1r = 0.0;
  std::uint64_t transform_hash = 0;
};

void save_thresholds_file(const ThresholdsFile& t, const std::filesystem::path& path);
ThresholdsFile load_thresholds_file(const std::filesystem::path& path);

}  // namespace autoids::detect
