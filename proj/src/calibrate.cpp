#include "autoids/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "autoids/errors.hpp"

namespace autoids::calibrate {
namespace {

struct ClassCounts {
  std::size_t anomalies = 0;
  std::size_t normals = 0;
};

ClassCounts check_two_classes(std::span<const double> scores,
                              std::span<const ingest::LabelKind> labels,
                              const char* caller) {
  if (scores.size() != labels.size())
    throw ConfigError(std::string(caller) + ": scores and labels differ in length");
  ClassCounts counts;
  for (const auto label : labels)
    label == ingest::LabelKind::kAnomaly ? ++counts.anomalies : ++counts.normals;
  if (counts.anomalies == 0 || counts.normals == 0)
    throw ConfigError(std::string(caller) + ": both classes must be present");
  return counts;
}

}  // namespace

std::vector<RocPoint> roc_curve(std::span<const double> scores,
                                std::span<const ingest::LabelKind> labels) {
  const ClassCounts counts = check_two_classes(scores, labels, "roc_curve");

  std::vector<std::pair<double, ingest::LabelKind>> items;
  items.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) items.emplace_back(scores[i], labels[i]);
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<RocPoint> curve;
  curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

  const double inv_p = 1.0 / static_cast<double>(counts.anomalies);
  const double inv_n = 1.0 / static_cast<double>(counts.normals);
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < items.size();) {
    const double threshold = items[i].first;
    // Consume the whole tie group: the point includes every score >= threshold.
    for (; i < items.size() && items[i].first == threshold; ++i)
      items[i].second == ingest::LabelKind::kAnomaly ? ++tp : ++fp;
    curve.push_back({threshold, static_cast<double>(tp) * inv_p,
                     static_cast<double>(fp) * inv_n});
  }
  curve.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  return curve;
}

double select_thr_ae(std::span<const double> scores,
                     std::span<const ingest::LabelKind> labels) {
  check_two_classes(scores, labels, "select_thr_ae");

  std::vector<double> anomaly_scores, normal_scores;
  for (std::size_t i = 0; i < scores.size(); ++i)
    (labels[i] == ingest::LabelKind::kAnomaly ? anomaly_scores : normal_scores)
        .push_back(scores[i]);
  std::sort(anomaly_scores.begin(), anomaly_scores.end());
  std::sort(normal_scores.begin(), normal_scores.end());

  std::vector<double> distinct(scores.begin(), scores.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates;
  candidates.reserve(distinct.size() + 1);
  candidates.push_back(distinct.front() - 1.0);
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
    candidates.push_back(0.5 * (distinct[i] + distinct[i + 1]));
  candidates.push_back(distinct.back() + 1.0);

  const auto count_above = [](const std::vector<double>& sorted, double t) {
    return sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
  };

  double best_threshold = candidates.front();
  double best_diff = std::numeric_limits<double>::infinity();
  for (const double t : candidates) {
    const double recall = static_cast<double>(count_above(anomaly_scores, t)) /
                          static_cast<double>(anomaly_scores.size());
    const double fpr = static_cast<double>(count_above(normal_scores, t)) /
                       static_cast<double>(normal_scores.size());
    const double diff = std::abs(recall - (1.0 - fpr));
    // Ties go to the larger threshold (fewer false positives); candidates
    // are scanned in increasing order, so >= keeps the later one.
    if (diff < best_diff || (diff == best_diff && t > best_threshold)) {
      best_diff = diff;
      best_threshold = t;
    }
  }
  return best_threshold;
}

std::vector<double> band_candidates(std::span<const double> values, int resolution) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> quantiles;
  const std::size_t n = sorted.size();
  for (int k = 0; k < resolution; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(n - 1) /
                       static_cast<double>(resolution - 1);
    quantiles.push_back(sorted[static_cast<std::size_t>(std::llround(pos))]);
  }
  std::sort(quantiles.begin(), quantiles.end());
  quantiles.erase(std::unique(quantiles.begin(), quantiles.end()), quantiles.end());

  // Quantile values themselves plus the midpoints between neighbours: bands
  // that separate adjacent score groups need thresholds strictly between them.
  std::vector<double> candidates{0.0, 1.0};
  candidates.insert(candidates.end(), quantiles.begin(), quantiles.end());
  for (std::size_t i = 0; i + 1 < quantiles.size(); ++i)
    candidates.push_back(0.5 * (quantiles[i] + quantiles[i + 1]));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  return candidates;
}

Band select_tau_band(std::span<const double> sparsity_values,
                     std::span<const ingest::LabelKind> labels,
                     const BandSearchConfig& config) {
  check_two_classes(sparsity_values, labels, "select_tau_band");
  if (config.resolution < 2) throw ConfigError("select_tau_band: resolution must be >= 2");
  if (config.min_purity <= 0.0 || config.min_purity > 1.0)
    throw ConfigError("select_tau_band: min_purity must be in (0,1]");

  const bool all_equal =
      std::all_of(sparsity_values.begin(), sparsity_values.end(),
                  [&](double v) { return v == sparsity_values.front(); });
  if (all_equal) return {0.0, 1.0};

  // Sorted values with an anomaly prefix count make every candidate pair an
  // O(log n) evaluation.
  std::vector<std::pair<double, ingest::LabelKind>> items;
  items.reserve(sparsity_values.size());
  for (std::size_t i = 0; i < sparsity_values.size(); ++i)
    items.emplace_back(sparsity_values[i], labels[i]);
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::size_t n = items.size();
  std::vector<double> vals(n);
  std::vector<std::size_t> anomaly_prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = items[i].first;
    anomaly_prefix[i + 1] =
        anomaly_prefix[i] + (items[i].second == ingest::LabelKind::kAnomaly ? 1 : 0);
  }
  const std::size_t total_anomalies = anomaly_prefix[n];
  const double max_error_rate = 1.0 - config.min_purity;

  const std::vector<double> candidates = band_candidates(sparsity_values, config.resolution);

  struct Best {
    bool found = false;
    std::size_t decided = 0;
    double metric = -1.0;
    double width = -1.0;
    double tau_min = 0.0, tau_max = 1.0;
  } best;

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double tau_min = candidates[i];
    // Normal region: s < tau_min (strict).
    const std::size_t below =
        static_cast<std::size_t>(std::lower_bound(vals.begin(), vals.end(), tau_min) -
                                 vals.begin());
    const std::size_t err_normal_region = anomaly_prefix[below];
    if (static_cast<double>(err_normal_region) >
        max_error_rate * static_cast<double>(below))
      continue;  // larger tau_max never shrinks this region

    for (std::size_t j = i; j < candidates.size(); ++j) {
      const double tau_max = candidates[j];
      // Anomaly region: s > tau_max (strict).
      const std::size_t upto =
          static_cast<std::size_t>(std::upper_bound(vals.begin(), vals.end(), tau_max) -
                                   vals.begin());
      const std::size_t region = n - upto;
      const std::size_t anomalies_in_region = total_anomalies - anomaly_prefix[upto];
      const std::size_t err_anomaly_region = region - anomalies_in_region;
      if (static_cast<double>(err_anomaly_region) >
          max_error_rate * static_cast<double>(region))
        continue;

      const std::size_t decided = below + region;
      double metric = 0.0;
      if (decided > 0) {
        if (config.objective == BandSearchConfig::Objective::kMaxAccuracy) {
          metric = static_cast<double>(decided - err_normal_region - err_anomaly_region) /
                   static_cast<double>(decided);
        } else {
          const auto tp = anomalies_in_region;
          const auto fp = err_anomaly_region;
          const auto fn = err_normal_region;
          const std::size_t denom = 2 * tp + fp + fn;
          metric = denom == 0 ? 0.0
                              : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
        }
      }
      const double width = tau_max - tau_min;

      const bool better =
          !best.found || decided > best.decided ||
          (decided == best.decided &&
           (metric > best.metric ||
            (metric == best.metric &&
             (width > best.width || (width == best.width && tau_min < best.tau_min)))));
      if (better) {
        best = {true, decided, metric, width, tau_min, tau_max};
      }
    }
  }

  if (!best.found || best.decided == 0) return {0.0, 1.0};
  return {best.tau_min, best.tau_max};
}

}  // namespace autoids::calibrate
