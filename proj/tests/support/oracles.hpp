#pragma once

// Test-only oracles: independent routes to the quantities the implementation
// computes analytically or with shortcuts. Shared by the unit tests and the
// acceptance suite; must not call the code paths they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "autoids/calibrate.hpp"
#include "autoids/evaluate.hpp"
#include "autoids/ingest.hpp"
#include "autoids/nn_core.hpp"
#include "autoids/rng.hpp"

namespace autoids::testing {

// Central finite differences of the batch objective with respect to every
// parameter, step h on each coordinate.
inline nn::Gradients fd_gradients(const nn::AEModel& model, const Eigen::MatrixXd& batch,
                                  const nn::TrainConfig& config, double h = 1e-8) {
  nn::AEModel probe = model;
  const auto eval = [&]() { return nn::batch_loss(probe, batch, config).total(); };
  const auto differentiate = [&](double& theta) {
    const double saved = theta;
    theta = saved + h;
    const double up = eval();
    theta = saved - h;
    const double down = eval();
    theta = saved;
    return (up - down) / (2.0 * h);
  };

  nn::Gradients g;
  g.w1.resize(model.w1.rows(), model.w1.cols());
  g.b1.resize(model.b1.size());
  g.w2.resize(model.w2.rows(), model.w2.cols());
  g.b2.resize(model.b2.size());
  for (Eigen::Index r = 0; r < probe.w1.rows(); ++r)
    for (Eigen::Index c = 0; c < probe.w1.cols(); ++c)
      g.w1(r, c) = differentiate(probe.w1(r, c));
  for (Eigen::Index i = 0; i < probe.b1.size(); ++i) g.b1[i] = differentiate(probe.b1[i]);
  for (Eigen::Index r = 0; r < probe.w2.rows(); ++r)
    for (Eigen::Index c = 0; c < probe.w2.cols(); ++c)
      g.w2(r, c) = differentiate(probe.w2(r, c));
  for (Eigen::Index i = 0; i < probe.b2.size(); ++i) g.b2[i] = differentiate(probe.b2[i]);
  return g;
}

// Worst relative disagreement between two gradient sets. Components are
// compared as |a-b| / max(|a|, |b|, floor); the floor keeps finite-difference
// round-off on near-zero components from registering as disagreement.
inline double gradient_disagreement(const nn::Gradients& a, const nn::Gradients& b,
                                    double floor = 1e-3) {
  double worst = 0.0;
  const auto scan = [&](const double* x, const double* y, Eigen::Index n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double denom = std::max({std::abs(x[i]), std::abs(y[i]), floor});
      worst = std::max(worst, std::abs(x[i] - y[i]) / denom);
    }
  };
  scan(a.w1.data(), b.w1.data(), a.w1.size());
  scan(a.b1.data(), b.b1.data(), a.b1.size());
  scan(a.w2.data(), b.w2.data(), a.w2.size());
  scan(a.b2.data(), b.b2.data(), a.b2.size());
  return worst;
}

// Random small model with weights away from rectifier kinks.
inline nn::AEModel random_model(nn::ModelKind kind, Eigen::Index n, Eigen::Index m,
                                Rng& rng, double scale = 0.9) {
  nn::AEModel model;
  model.kind = kind;
  model.w1.resize(m, n);
  model.b1.resize(m);
  model.w2.resize(n, m);
  model.b2.resize(n);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < n; ++c) model.w1(r, c) = rng.uniform(-scale, scale);
  for (Eigen::Index i = 0; i < m; ++i) model.b1[i] = rng.uniform(-0.5, 0.5);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < m; ++c) model.w2(r, c) = rng.uniform(-scale, scale);
  for (Eigen::Index i = 0; i < n; ++i) model.b2[i] = rng.uniform(-0.5, 0.5);
  return model;
}

inline Eigen::MatrixXd random_batch(Eigen::Index dim, Eigen::Index count, Rng& rng) {
  Eigen::MatrixXd batch(dim, count);
  for (Eigen::Index c = 0; c < count; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) batch(r, c) = rng.unit();
  return batch;
}

// Brute-force recount of every scalar metric straight from the labels, with
// no confusion-matrix intermediate shared with the implementation.
struct NaiveMetrics {
  double accuracy = -1, precision = -1, recall = -1, f_score = -1;
  double fpr_std = -1, fpr_alt = -1;  // -1 encodes "undefined"
};

inline NaiveMetrics naive_metrics(std::span<const ingest::LabelKind> predicted,
                                  std::span<const ingest::LabelKind> actual) {
  double tp = 0, fn = 0, tn = 0, fp = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool is_anomaly = actual[i] == ingest::LabelKind::kAnomaly;
    const bool said_anomaly = predicted[i] == ingest::LabelKind::kAnomaly;
    tp += is_anomaly && said_anomaly;
    fn += is_anomaly && !said_anomaly;
    tn += !is_anomaly && !said_anomaly;
    fp += !is_anomaly && said_anomaly;
  }
  NaiveMetrics m;
  const double total = tp + fn + tn + fp;
  if (total > 0) m.accuracy = (tp + tn) / total;
  if (tp + fp > 0) m.precision = tp / (tp + fp);
  if (tp + fn > 0) m.recall = tp / (tp + fn);
  if (m.precision >= 0 && m.recall >= 0 && m.precision + m.recall > 0)
    m.f_score = 2 * m.precision * m.recall / (m.precision + m.recall);
  if (fp + tn > 0) m.fpr_std = fp / (fp + tn);
  if (fn + fp > 0) m.fpr_alt = fp / (fn + fp);
  return m;
}

// Exhaustive tau-band search: same candidate grid, same selection chain, but
// every count re-derived by scanning the raw values per pair.
inline calibrate::Band exhaustive_tau_band(std::span<const double> values,
                                           std::span<const ingest::LabelKind> labels,
                                           const calibrate::BandSearchConfig& config) {
  const bool all_equal = std::all_of(values.begin(), values.end(),
                                     [&](double v) { return v == values.front(); });
  if (all_equal) return {0.0, 1.0};

  const auto candidates = calibrate::band_candidates(values, config.resolution);
  const double max_error = 1.0 - config.min_purity;

  bool found = false;
  std::size_t best_decided = 0;
  double best_metric = -1, best_width = -1;
  calibrate::Band best{0.0, 1.0};

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    for (std::size_t j = i; j < candidates.size(); ++j) {
      const double tau_min = candidates[i], tau_max = candidates[j];
      std::size_t dec_n = 0, err_n = 0, dec_a = 0, err_a = 0;
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] < tau_min) {
          ++dec_n;
          if (labels[k] == ingest::LabelKind::kAnomaly) ++err_n;
        } else if (values[k] > tau_max) {
          ++dec_a;
          if (labels[k] == ingest::LabelKind::kNormal) ++err_a;
        }
      }
      if (static_cast<double>(err_n) > max_error * static_cast<double>(dec_n)) continue;
      if (static_cast<double>(err_a) > max_error * static_cast<double>(dec_a)) continue;

      const std::size_t decided = dec_n + dec_a;
      double metric = 0.0;
      if (decided > 0) {
        if (config.objective == calibrate::BandSearchConfig::Objective::kMaxAccuracy) {
          metric = static_cast<double>(decided - err_n - err_a) /
                   static_cast<double>(decided);
        } else {
          const std::size_t tp = dec_a - err_a;
          const std::size_t denom = 2 * tp + err_a + err_n;
          metric =
              denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
        }
      }
      const double width = tau_max - tau_min;
      const bool better =
          !found || decided > best_decided ||
          (decided == best_decided &&
           (metric > best_metric ||
            (metric == best_metric &&
             (width > best_width || (width == best_width && tau_min < best.tau_min)))));
      if (better) {
        found = true;
        best_decided = decided;
        best_metric = metric;
        best_width = width;
        best = {tau_min, tau_max};
      }
    }
  }
  if (!found || best_decided == 0) return {0.0, 1.0};
  return best;
}

}  // namespace autoids::testing
