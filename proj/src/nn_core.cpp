#include "autoids/nn_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

#include "autoids/errors.hpp"
#include "autoids/hash.hpp"
#include "autoids/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "model files are little-endian");

namespace autoids::nn {

double sigmoid(double a) {
  if (a >= 0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

namespace {

constexpr double kRhoHatFloor = 1e-6;
constexpr double kRhoHatCeil = 1.0 - 1e-6;

void check_input_dim(const AEModel& model, Eigen::Index got) {
  if (got != model.input_dim())
    throw ConfigError("input dimension " + std::to_string(got) + " does not match model (" +
                      std::to_string(model.input_dim()) + ")");
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kSparse ? "sparse" : "plain";
}

Eigen::Index default_hidden_dim(ModelKind kind) {
  return kind == ModelKind::kSparse ? 140 : 80;
}

AEModel init_model(ModelKind kind, Eigen::Index input_dim, Eigen::Index hidden_dim,
                   std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1)
    throw ConfigError("init_model: dimensions must be positive");

  AEModel model;
  model.kind = kind;
  model.w1.resize(hidden_dim, input_dim);
  model.b1 = Eigen::VectorXd::Zero(hidden_dim);
  model.w2.resize(input_dim, hidden_dim);
  model.b2 = Eigen::VectorXd::Zero(input_dim);

  Rng rng(seed);
  const double limit = std::sqrt(6.0 / static_cast<double>(input_dim + hidden_dim));
  // Row-major draw order so the sequence is independent of Eigen's storage.
  for (Eigen::Index r = 0; r < model.w1.rows(); ++r)
    for (Eigen::Index c = 0; c < model.w1.cols(); ++c)
      model.w1(r, c) = rng.uniform(-limit, limit);
  for (Eigen::Index r = 0; r < model.w2.rows(); ++r)
    for (Eigen::Index c = 0; c < model.w2.cols(); ++c)
      model.w2(r, c) = rng.uniform(-limit, limit);
  return model;
}

Forward forward(const AEModel& model, const Eigen::VectorXd& x) {
  check_input_dim(model, x.size());
  Forward f;
  f.latent = ((model.w1 * x + model.b1).array().max(0.0)).matrix();
  f.reconstruction = (model.w2 * f.latent + model.b2).unaryExpr([](double a) {
    return sigmoid(a);
  });
  return f;
}

Eigen::VectorXd encode(const AEModel& model, const Eigen::VectorXd& x) {
  Eigen::VectorXd latent;
  encode_into(model, x, latent);
  return latent;
}

void encode_into(const AEModel& model, const Eigen::VectorXd& x, Eigen::VectorXd& latent) {
  check_input_dim(model, x.size());
  latent.resize(model.hidden_dim());
  latent.noalias() = model.w1 * x;
  latent += model.b1;
  latent = latent.cwiseMax(0.0);
}

void decode_into(const AEModel& model, const Eigen::VectorXd& latent, Eigen::VectorXd& out) {
  if (latent.size() != model.hidden_dim())
    throw ConfigError("decode: latent dimension mismatch");
  out.resize(model.input_dim());
  out.noalias() = model.w2 * latent;
  out += model.b2;
  out = out.unaryExpr([](double a) { return sigmoid(a); });
}

void forward_batch(const AEModel& model, const Eigen::MatrixXd& x, Eigen::MatrixXd& latent,
                   Eigen::MatrixXd& reconstruction) {
  check_input_dim(model, x.rows());
  latent.noalias() = model.w1 * x;
  latent.colwise() += model.b1;
  latent = latent.cwiseMax(0.0);
  reconstruction.noalias() = model.w2 * latent;
  reconstruction.colwise() += model.b2;
  reconstruction = reconstruction.unaryExpr([](double a) { return sigmoid(a); });
}

double loss_plain(const Eigen::VectorXd& x, const Eigen::VectorXd& xhat) {
  if (x.size() != xhat.size())
    throw ConfigError("loss_plain: length mismatch");
  return (x - xhat).squaredNorm();
}

double kl_penalty(const Eigen::VectorXd& rho_hat, double rho) {
  double sum = 0;
  for (Eigen::Index j = 0; j < rho_hat.size(); ++j) {
    const double r = std::clamp(rho_hat[j], kRhoHatFloor, kRhoHatCeil);
    sum += rho * std::log(rho / r) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - r));
  }
  return sum;
}

double loss_sparse(const Eigen::VectorXd& x, const Eigen::VectorXd& xhat,
                   const Eigen::VectorXd& rho_hat, double rho, double beta) {
  return loss_plain(x, xhat) + beta * kl_penalty(rho_hat, rho);
}

BatchLoss batch_loss(const AEModel& model, const Eigen::MatrixXd& batch,
                     const TrainConfig& config) {
  if (batch.cols() == 0) throw ConfigError("batch_loss: empty batch");
  Eigen::MatrixXd latent, reconstruction;
  forward_batch(model, batch, latent, reconstruction);

  BatchLoss loss;
  loss.reconstruction =
      (batch - reconstruction).squaredNorm() / static_cast<double>(batch.cols());

  if (model.kind == ModelKind::kSparse) {
    if (config.regularizer == RegularizerMode::kKl) {
      if (config.sparsity_weight != 0.0) {
        const Eigen::VectorXd rho_hat = latent.rowwise().mean();
        loss.penalty = config.sparsity_weight * kl_penalty(rho_hat, config.sparsity_target);
      }
    } else {
      loss.penalty = config.l1_weight * latent.sum() / static_cast<double>(batch.cols());
    }
  }
  return loss;
}

BatchLoss loss_and_gradients(const AEModel& model, const Eigen::MatrixXd& batch,
                             const TrainConfig& config, Gradients& out) {
  if (batch.cols() == 0) throw ConfigError("gradients: empty batch");
  check_input_dim(model, batch.rows());

  const double inv_b = 1.0 / static_cast<double>(batch.cols());

  Eigen::MatrixXd pre1 = model.w1 * batch;
  pre1.colwise() += model.b1;
  const Eigen::MatrixXd latent = pre1.cwiseMax(0.0);
  Eigen::MatrixXd reconstruction = model.w2 * latent;
  reconstruction.colwise() += model.b2;
  reconstruction = reconstruction.unaryExpr([](double a) { return sigmoid(a); });

  BatchLoss loss;
  loss.reconstruction = (batch - reconstruction).squaredNorm() * inv_b;

  // d(mean squared-euclidean)/d(decoder pre-activation)
  const Eigen::MatrixXd delta2 =
      (2.0 * inv_b) * (reconstruction - batch).cwiseProduct(reconstruction)
          .cwiseProduct((1.0 - reconstruction.array()).matrix());

  out.w2.noalias() = delta2 * latent.transpose();
  out.b2 = delta2.rowwise().sum();

  Eigen::MatrixXd back = model.w2.transpose() * delta2;

  if (model.kind == ModelKind::kSparse) {
    if (config.regularizer == RegularizerMode::kKl) {
      if (config.sparsity_weight != 0.0) {
        const double rho = config.sparsity_target;
        const Eigen::VectorXd rho_hat = latent.rowwise().mean();
        loss.penalty = config.sparsity_weight * kl_penalty(rho_hat, rho);
        // The clamp's flat regions contribute zero gradient.
        Eigen::VectorXd kl_grad(rho_hat.size());
        for (Eigen::Index j = 0; j < rho_hat.size(); ++j) {
          const double r = rho_hat[j];
          kl_grad[j] = (r > kRhoHatFloor && r < kRhoHatCeil)
                           ? config.sparsity_weight * inv_b * (-rho / r + (1.0 - rho) / (1.0 - r))
                           : 0.0;
        }
        back.colwise() += kl_grad;
      }
    } else {
      loss.penalty = config.l1_weight * latent.sum() * inv_b;
      back.array() += config.l1_weight * inv_b;
    }
  }

  // Rectifier gate: strictly positive pre-activations pass gradient.
  const Eigen::MatrixXd delta1 =
      back.cwiseProduct((pre1.array() > 0.0).cast<double>().matrix());

  out.w1.noalias() = delta1 * batch.transpose();
  out.b1 = delta1.rowwise().sum();
  return loss;
}

Gradients gradients(const AEModel& model, const Eigen::MatrixXd& batch,
                    const TrainConfig& config) {
  Gradients g;
  loss_and_gradients(model, batch, config, g);
  return g;
}

AdamState init_adam(const AEModel& model) {
  const Eigen::Index total =
      model.w1.size() + model.b1.size() + model.w2.size() + model.b2.size();
  AdamState state;
  state.m = Eigen::ArrayXd::Zero(total);
  state.v = Eigen::ArrayXd::Zero(total);
  state.step = 0;
  return state;
}

void adam_step(AEModel& model, const Gradients& grads, AdamState& state,
               const TrainConfig& config) {
  if (grads.w1.rows() != model.w1.rows() || grads.w1.cols() != model.w1.cols() ||
      grads.w2.rows() != model.w2.rows() || grads.w2.cols() != model.w2.cols() ||
      grads.b1.size() != model.b1.size() || grads.b2.size() != model.b2.size())
    throw ConfigError("adam_step: gradient shapes do not match model");

  ++state.step;
  const double correction1 = 1.0 - std::pow(config.adam_beta1, state.step);
  const double correction2 = 1.0 - std::pow(config.adam_beta2, state.step);

  Eigen::Index offset = 0;
  const auto update = [&](double* params, const double* grad, Eigen::Index n) {
    auto m = state.m.segment(offset, n);
    auto v = state.v.segment(offset, n);
    Eigen::Map<Eigen::ArrayXd> p(params, n);
    Eigen::Map<const Eigen::ArrayXd> g(grad, n);
    m = config.adam_beta1 * m + (1.0 - config.adam_beta1) * g;
    v = config.adam_beta2 * v + (1.0 - config.adam_beta2) * g.square();
    p -= config.learning_rate * (m / correction1) /
         ((v / correction2).sqrt() + config.adam_epsilon);
    offset += n;
  };
  update(model.w1.data(), grads.w1.data(), model.w1.size());
  update(model.b1.data(), grads.b1.data(), model.b1.size());
  update(model.w2.data(), grads.w2.data(), model.w2.size());
  update(model.b2.data(), grads.b2.data(), model.b2.size());
}

TrainResult train(ModelKind kind, Eigen::Index hidden_dim, const Eigen::MatrixXd& training,
                  const Eigen::MatrixXd& validation, const TrainConfig& config) {
  if (training.cols() == 0) throw ConfigError("train: empty training set");
  if (config.epochs < 1) throw ConfigError("train: epochs must be >= 1");
  if (config.batch_size < 1) throw ConfigError("train: batch size must be >= 1");
  if (validation.cols() > 0 && validation.rows() != training.rows())
    throw ConfigError("train: validation dimension mismatch");

  TrainResult result;
  result.model = init_model(kind, training.rows(), hidden_dim, config.seed);
  AdamState adam = init_adam(result.model);
  Rng shuffle_rng(Rng::derive(config.seed, 1));

  const Eigen::Index n = training.cols();
  const Eigen::Index batch_size = std::min<Eigen::Index>(config.batch_size, n);
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Eigen::MatrixXd batch(training.rows(), batch_size);
  Gradients grads;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0;
    Eigen::Index seen = 0;
    for (Eigen::Index start = 0; start < n; start += batch_size) {
      const Eigen::Index b = std::min(batch_size, n - start);
      for (Eigen::Index i = 0; i < b; ++i)
        batch.col(i) = training.col(static_cast<Eigen::Index>(order[start + i]));
      const auto& view = batch.leftCols(b);

      const BatchLoss loss = loss_and_gradients(result.model, view, config, grads);
      if (!std::isfinite(loss.total()))
        throw Error("training diverged: non-finite loss at epoch " +
                    std::to_string(epoch + 1) + ", sample offset " + std::to_string(start));
      adam_step(result.model, grads, adam, config);
      epoch_loss += loss.total() * static_cast<double>(b);
      seen += b;
    }
    result.history.train_loss.push_back(epoch_loss / static_cast<double>(seen));
    if (validation.cols() > 0) {
      const double val = batch_loss(result.model, validation, config).total();
      if (!std::isfinite(val))
        throw Error("training diverged: non-finite validation loss at epoch " +
                    std::to_string(epoch + 1));
      result.history.validation_loss.push_back(val);
    }
  }
  return result;
}

// --------------------------------------------------------------------------
// Persistence. Layout documented in docs/FORMATS.md.

namespace {

constexpr char kMagic[4] = {'A', 'I', 'D', 'M'};
constexpr std::uint32_t kModelVersion = 1;
constexpr std::uint8_t kActRelu = 1;
constexpr std::uint8_t kActSigmoid = 2;

class HashingWriter {
 public:
  explicit HashingWriter(std::ostream& out) : out_(out) {}

  void write(const void* data, std::size_t len) {
    hash_.update(data, len);
    out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
  }

  template <typename T>
  void write_value(T v) {
    write(&v, sizeof v);
  }

  std::uint64_t digest() const { return hash_.digest(); }

 private:
  std::ostream& out_;
  Fnv1a64 hash_;
};

class HashingReader {
 public:
  explicit HashingReader(std::istream& in) : in_(in) {}

  void read(void* data, std::size_t len) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (in_.gcount() != static_cast<std::streamsize>(len))
      throw ArtifactError("model file truncated");
    hash_.update(data, len);
  }

  template <typename T>
  T read_value() {
    T v;
    read(&v, sizeof v);
    return v;
  }

  std::uint64_t digest() const { return hash_.digest(); }

 private:
  std::istream& in_;
  Fnv1a64 hash_;
};

void write_matrix_row_major(HashingWriter& w, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.write_value(m(r, c));
}

void read_matrix_row_major(HashingReader& r, Eigen::MatrixXd& m) {
  for (Eigen::Index row = 0; row < m.rows(); ++row)
    for (Eigen::Index col = 0; col < m.cols(); ++col) m(row, col) = r.read_value<double>();
}

}  // namespace

void save_model(const AEModel& model, std::ostream& out) {
  HashingWriter w(out);
  w.write(kMagic, sizeof kMagic);
  w.write_value(kModelVersion);
  w.write_value(static_cast<std::uint8_t>(model.kind));
  w.write_value(kActRelu);
  w.write_value(kActSigmoid);
  w.write_value(std::uint8_t{0});
  w.write_value(static_cast<std::uint32_t>(model.input_dim()));
  w.write_value(static_cast<std::uint32_t>(model.hidden_dim()));
  w.write_value(model.transform_hash);
  write_matrix_row_major(w, model.w1);
  for (Eigen::Index i = 0; i < model.b1.size(); ++i) w.write_value(model.b1[i]);
  write_matrix_row_major(w, model.w2);
  for (Eigen::Index i = 0; i < model.b2.size(); ++i) w.write_value(model.b2[i]);
  const std::uint64_t checksum = w.digest();
  out.write(reinterpret_cast<const char*>(&checksum), sizeof checksum);
  if (!out) throw IoError("failed writing model");
}

void save_model_file(const AEModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save_model(model, out);
}

AEModel load_model(std::istream& in, std::optional<ModelKind> expected_kind) {
  HashingReader r(in);
  char magic[4];
  r.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw ArtifactError("not a model file (bad magic)");
  if (r.read_value<std::uint32_t>() != kModelVersion)
    throw ArtifactError("unsupported model version");

  const auto kind_byte = r.read_value<std::uint8_t>();
  if (kind_byte > 1) throw ArtifactError("unknown model kind");
  const auto kind = static_cast<ModelKind>(kind_byte);
  if (expected_kind && kind != *expected_kind)
    throw ArtifactError(std::string("model kind mismatch: expected ") +
                        std::string(to_string(*expected_kind)) + ", file holds " +
                        std::string(to_string(kind)));
  if (r.read_value<std::uint8_t>() != kActRelu || r.read_value<std::uint8_t>() != kActSigmoid)
    throw ArtifactError("unsupported activation configuration");
  (void)r.read_value<std::uint8_t>();  // reserved

  const auto input_dim = r.read_value<std::uint32_t>();
  const auto hidden_dim = r.read_value<std::uint32_t>();
  constexpr std::uint32_t kDimLimit = 1u << 20;
  if (input_dim == 0 || hidden_dim == 0 || input_dim > kDimLimit || hidden_dim > kDimLimit)
    throw ArtifactError("implausible model dimensions");

  AEModel model;
  model.kind = kind;
  model.transform_hash = r.read_value<std::uint64_t>();
  model.w1.resize(hidden_dim, input_dim);
  model.b1.resize(hidden_dim);
  model.w2.resize(input_dim, hidden_dim);
  model.b2.resize(input_dim);
  read_matrix_row_major(r, model.w1);
  for (Eigen::Index i = 0; i < model.b1.size(); ++i) model.b1[i] = r.read_value<double>();
  read_matrix_row_major(r, model.w2);
  for (Eigen::Index i = 0; i < model.b2.size(); ++i) model.b2[i] = r.read_value<double>();

  const std::uint64_t expected = r.digest();
  std::uint64_t stored = 0;
  in.read(reinterpret_cast<char*>(&stored), sizeof stored);
  if (in.gcount() != sizeof stored) throw ArtifactError("model file truncated");
  if (stored != expected) throw ArtifactError("model checksum mismatch");

  for (const double v : {model.w1.norm(), model.w2.norm(), model.b1.norm(), model.b2.norm()})
    if (!std::isfinite(v)) throw ArtifactError("model contains non-finite weights");
  return model;
}

AEModel load_model_file(const std::filesystem::path& path,
                        std::optional<ModelKind> expected_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model: " + path.string());
  return load_model(in, expected_kind);
}

}  // namespace autoids::nn
