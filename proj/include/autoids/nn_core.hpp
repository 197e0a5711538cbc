#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace autoids::nn {

enum class ModelKind : std::uint8_t { kPlain = 0, kSparse = 1 };

enum class RegularizerMode : std::uint8_t { kKl = 0, kL1Activity = 1 };

std::string_view to_string(ModelKind kind);

// 140 for the sparse detector, 80 for the plain one.
Eigen::Index default_hidden_dim(ModelKind kind);

// Single hidden layer encoder-decoder: rectifier encoder, logistic-sigmoid
// decoder. The sparse variant is over-complete (hidden > input), the plain
// variant compresses.
struct AEModel {
  ModelKind kind = ModelKind::kPlain;
  Eigen::MatrixXd w1;  // hidden x n
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // n x hidden
  Eigen::VectorXd b2;  // n
  // content_hash() of the TransformSpec the model was trained against;
  // 0 when untracked (hand-built test models).
  std::uint64_t transform_hash = 0;

  Eigen::Index input_dim() const { return w1.cols(); }
  Eigen::Index hidden_dim() const { return w1.rows(); }
};

struct TrainConfig {
  double sparsity_target = 0.05;  // rho, KL mode
  double sparsity_weight = 1e-4;  // beta, KL mode
  double l1_weight = 1e-4;        // coefficient, L1-activity mode
  RegularizerMode regularizer = RegularizerMode::kKl;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int batch_size = 128;
  int epochs = 50;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  std::vector<double> train_loss;       // per-epoch mean over batches
  std::vector<double> validation_loss;  // per-epoch, empty if no validation set
};

// Scaled-uniform fan-based initialization (limit sqrt(6/(fan_in+fan_out))),
// biases zero, deterministic given seed.
AEModel init_model(ModelKind kind, Eigen::Index input_dim, Eigen::Index hidden_dim,
                   std::uint64_t seed);

struct Forward {
  Eigen::VectorXd latent;          // relu(w1 x + b1)
  Eigen::VectorXd reconstruction;  // sigmoid(w2 latent + b2)
};

Forward forward(const AEModel& model, const Eigen::VectorXd& x);

// Latent only; the decoder is never evaluated. This is the cascade fast path.
Eigen::VectorXd encode(const AEModel& model, const Eigen::VectorXd& x);
void encode_into(const AEModel& model, const Eigen::VectorXd& x, Eigen::VectorXd& latent);

// Decoder half: sigmoid(w2 latent + b2) into out (resized as needed).
void decode_into(const AEModel& model, const Eigen::VectorXd& latent, Eigen::VectorXd& out);

// Numerically stable logistic function.
double sigmoid(double a);

// Batch forms; columns are samples, outputs are resized as needed.
void forward_batch(const AEModel& model, const Eigen::MatrixXd& x,
                   Eigen::MatrixXd& latent, Eigen::MatrixXd& reconstruction);

// Squared euclidean reconstruction error of one sample.
double loss_plain(const Eigen::VectorXd& x, const Eigen::VectorXd& xhat);

// loss_plain plus beta * sum_j KL(rho || rho_hat_j). rho_hat is clamped into
// [1e-6, 1-1e-6] before the KL term.
double loss_sparse(const Eigen::VectorXd& x, const Eigen::VectorXd& xhat,
                   const Eigen::VectorXd& rho_hat, double rho, double beta);

double kl_penalty(const Eigen::VectorXd& rho_hat, double rho);

struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
};

struct BatchLoss {
  double reconstruction = 0;  // mean per-sample squared euclidean error
  double penalty = 0;         // regularizer term (0 for plain models)
  double total() const { return reconstruction + penalty; }
};

// Objective over a batch (columns = samples): mean per-sample loss_plain plus,
// for sparse models, the configured regularizer (KL on batch-mean activations,
// or L1 on activations). This is the quantity gradients() differentiates.
BatchLoss batch_loss(const AEModel& model, const Eigen::MatrixXd& batch,
                     const TrainConfig& config);

// Analytic gradients of batch_loss().total() with respect to all parameters.
Gradients gradients(const AEModel& model, const Eigen::MatrixXd& batch,
                    const TrainConfig& config);
BatchLoss loss_and_gradients(const AEModel& model, const Eigen::MatrixXd& batch,
                             const TrainConfig& config, Gradients& out);

struct AdamState {
  Eigen::ArrayXd m;  // first moments, flattened over all parameters
  Eigen::ArrayXd v;  // second moments
  long step = 0;
};

AdamState init_adam(const AEModel& model);

// Standard bias-corrected Adam update, applied elementwise over all
// parameters in declared order (w1, b1, w2, b2).
void adam_step(AEModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& config);

struct TrainResult {
  AEModel model;
  TrainHistory history;
};

// Mini-batch Adam over normal-only vectors (columns = samples), per-epoch
// seeded reshuffle. validation may have zero columns. Deterministic given
// (seed, data, config). Throws on an empty training set or a non-finite loss.
TrainResult train(ModelKind kind, Eigen::Index hidden_dim,
                  const Eigen::MatrixXd& training, const Eigen::MatrixXd& validation,
                  const TrainConfig& config);

// Binary model file: versioned header, parameter arrays, FNV-1a checksum.
// Byte layout in docs/FORMATS.md. Round trips are bit-exact.
void save_model(const AEModel& model, std::ostream& out);
void save_model_file(const AEModel& model, const std::filesystem::path& path);
AEModel load_model(std::istream& in, std::optional<ModelKind> expected_kind = {});
AEModel load_model_file(const std::filesystem::path& path,
                        std::optional<ModelKind> expected_kind = {});

}  // namespace autoids::nn
