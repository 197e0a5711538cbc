#pragma once

#include <span>
#include <vector>

#include "autoids/ingest.hpp"

namespace autoids::calibrate {

struct RocPoint {
  double threshold = 0;
  double recall = 0;  // TPR
  double fpr = 0;     // FP / (FP + TN)
};

// One point per distinct score (decision rule: score >= threshold is
// anomalous) plus sentinel endpoints at (0,0) and (1,1). Higher score means
// more anomalous. Throws ConfigError unless both classes are present.
std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const ingest::LabelKind> labels);

// Candidate thresholds are midpoints between consecutive distinct sorted
// scores plus outer sentinels. Returns the candidate minimizing
// |recall(t) - (1 - FPR(t))| under the decision rule score > t; ties break
// toward the larger threshold.
double select_thr_ae(std::span<const double> scores,
                     std::span<const ingest::LabelKind> labels);

struct BandSearchConfig {
  // Number of quantile-derived candidate thresholds (0 and 1 are always
  // included as well).
  int resolution = 101;
  // Each decided region of a feasible band has error rate <= 1 - min_purity.
  double min_purity = 0.95;
  // Tie-break metric among bands deciding equally many flows.
  enum class Objective { kMaxAccuracy, kMaxFScore };
  Objective objective = Objective::kMaxAccuracy;
};

struct Band {
  double tau_min = 0.0;
  double tau_max = 1.0;
};

// Deterministic grid search over candidate (tau_min, tau_max) pairs drawn
// from quantiles of the observed sparsity values. Feasible pairs keep the
// error rate of each decided region within 1 - min_purity; among those the
// pair deciding the most flows wins, with ties broken by the objective
// metric over decided flows, then by wider Unknown band, then by smaller
// tau_min. Falls back to (0,1) when nothing decidable is feasible or all
// sparsity values are identical.
Band select_tau_band(std::span<const double> sparsity_values,
                     std::span<const ingest::LabelKind> labels,
                     const BandSearchConfig& config);

// The candidate threshold grid select_tau_band searches: {0, 1}, `resolution`
// quantiles of the values, and the midpoints between neighbouring quantiles,
// deduplicated and sorted. Exposed so exhaustive cross-checks can enumerate
// the identical grid.
std::vector<double> band_candidates(std::span<const double> values, int resolution);

}  // namespace autoids::calibrate
