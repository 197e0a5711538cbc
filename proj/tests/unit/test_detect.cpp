#include <doctest.h>

#include <sstream>

#include "../support/oracles.hpp"
#include "autoids/detect.hpp"
#include "autoids/errors.hpp"
#include "autoids/rng.hpp"

using namespace autoids;
using namespace autoids::detect;

namespace {

// Zero decoder: reconstruction is 0.5 everywhere regardless of input.
nn::AEModel half_model(Eigen::Index n, Eigen::Index m) {
  nn::AEModel model;
  model.kind = nn::ModelKind::kPlain;
  model.w1 = Eigen::MatrixXd::Zero(m, n);
  model.b1 = Eigen::VectorXd::Zero(m);
  model.w2 = Eigen::MatrixXd::Zero(n, m);
  model.b2 = Eigen::VectorXd::Zero(n);
  return model;
}

struct CascadePair {
  nn::AEModel sparse;
  nn::AEModel plain;
};

CascadePair random_pair(Eigen::Index n, Rng& rng) {
  CascadePair pair;
  pair.sparse = testing::random_model(nn::ModelKind::kSparse, n, n + 3, rng);
  pair.plain = testing::random_model(nn::ModelKind::kPlain, n, n - 2, rng);
  return pair;
}

}  // namespace

TEST_CASE("sparsity_value: counting rule and cutoff") {
  CHECK(sparsity_value(Eigen::VectorXd::Zero(140), 1e-6) == 0.0);

  Eigen::VectorXd half = Eigen::VectorXd::Zero(140);
  half.head(70).setConstant(0.2);
  CHECK(sparsity_value(half, 1e-6) == 0.5);

  Eigen::VectorXd edge(2);
  const double eps = 1e-6;
  edge << eps / 2, 2 * eps;
  CHECK(sparsity_value(edge, eps) == 0.5);

  // Value exactly at the cutoff counts as inactive (strict >).
  Eigen::VectorXd at(1);
  at << eps;
  CHECK(sparsity_value(at, eps) == 0.0);

  CHECK(sparsity_value(Eigen::VectorXd::Constant(9, 1.0), 1e-6) == 1.0);
  CHECK_THROWS_AS(sparsity_value(Eigen::VectorXd(), 1e-6), ConfigError);
}

TEST_CASE("d1_decide: rule application and inclusive-unknown boundaries") {
  Thresholds t;
  t.tau_min = 0.2;
  t.tau_max = 0.6;
  CHECK(d1_decide(0.1, t) == D1Outcome::kNormal);
  CHECK(d1_decide(0.7, t) == D1Outcome::kAnomaly);
  CHECK(d1_decide(0.4, t) == D1Outcome::kUnknown);
  CHECK(d1_decide(0.2, t) == D1Outcome::kUnknown);
  CHECK(d1_decide(0.6, t) == D1Outcome::kUnknown);
}

TEST_CASE("d1_decide: partition and monotonicity properties") {
  Rng rng(64);
  for (int trial = 0; trial < 500; ++trial) {
    Thresholds t;
    t.tau_min = rng.unit();
    t.tau_max = t.tau_min + (1.0 - t.tau_min) * rng.unit();

    double previous = -1;  // Normal=0 < Unknown=1 < Anomaly=2 ordering
    for (int step = 0; step <= 50; ++step) {
      const double s = static_cast<double>(step) / 50.0;
      const auto outcome = d1_decide(s, t);
      const double rank = outcome == D1Outcome::kNormal ? 0
                          : outcome == D1Outcome::kUnknown ? 1 : 2;
      CHECK(rank >= previous);  // raising s never moves toward Normal
      previous = rank;
    }
  }
}

TEST_CASE("reconstruction_error: exact values against the constant-half model") {
  const auto model = half_model(122, 80);

  CHECK(reconstruction_error(model, Eigen::VectorXd::Constant(122, 0.5)) == 0.0);
  CHECK(reconstruction_error(model, Eigen::VectorXd::Zero(122)) ==
        doctest::Approx(30.5).epsilon(1e-12));

  CHECK_THROWS_AS(reconstruction_error(model, Eigen::VectorXd::Zero(5)), ConfigError);
}

TEST_CASE("d2_decide: strict threshold boundary") {
  CHECK(d2_decide(0.0, 1.0) == ingest::LabelKind::kNormal);
  CHECK(d2_decide(1.0, 1.0) == ingest::LabelKind::kNormal);
  CHECK(d2_decide(1.0 + 1e-9, 1.0) == ingest::LabelKind::kAnomaly);
}

TEST_CASE("cascade: degenerate band escalates everything and matches D2 alone") {
  Rng rng(7);
  const auto pair = random_pair(10, rng);
  Thresholds t;
  t.tau_min = 0.0;
  t.tau_max = 1.0;
  t.thr_ae = 2.0;

  const auto xs = testing::random_batch(10, 64, rng);
  CascadeStats stats;
  const auto verdicts = cascade_classify_all(xs, pair.sparse, pair.plain, t, &stats);

  CHECK(stats.escalated == 64);
  CHECK(stats.d1_normal == 0);
  CHECK(stats.d1_anomaly == 0);
  for (Eigen::Index i = 0; i < xs.cols(); ++i) {
    const auto& v = verdicts[static_cast<std::size_t>(i)];
    CHECK(v.stage == Stage::kD2);
    const double err = reconstruction_error(pair.plain, xs.col(i));
    CHECK(v.score == doctest::Approx(err).epsilon(1e-12));
    CHECK(v.label == d2_decide(err, t.thr_ae));
  }
}

TEST_CASE("cascade: tight band decides everything except exact boundary at D1") {
  Rng rng(8);
  const auto pair = random_pair(10, rng);
  Thresholds t;
  t.tau_min = 0.5;
  t.tau_max = 0.5;

  const auto xs = testing::random_batch(10, 32, rng);
  CascadeStats stats;
  const auto verdicts = cascade_classify_all(xs, pair.sparse, pair.plain, t, &stats);
  for (const auto& v : verdicts) {
    if (v.stage == Stage::kD1) {
      CHECK(v.score != 0.5);
      CHECK(v.label == (v.score < 0.5 ? ingest::LabelKind::kNormal
                                      : ingest::LabelKind::kAnomaly));
    } else {
      // Only sparsity exactly 0.5 escalates.
    }
  }
  CHECK(stats.total() == 32);
}

TEST_CASE("cascade: early-exit contract, plain model runs once per escalation") {
  Rng rng(9);
  const auto pair = random_pair(12, rng);
  Thresholds t;
  t.tau_min = 0.3;
  t.tau_max = 0.8;
  t.thr_ae = 1.5;

  const auto xs = testing::random_batch(12, 200, rng);
  CascadeStats stats;
  const auto verdicts = cascade_classify_all(xs, pair.sparse, pair.plain, t, &stats);

  std::uint64_t unknown = 0;
  for (const auto& v : verdicts)
    if (v.stage == Stage::kD2) ++unknown;
  CHECK(stats.plain_forward_calls == unknown);
  CHECK(stats.escalated == unknown);
  CHECK(stats.total() == 200);
  CHECK(stats.escalation_fraction() ==
        doctest::Approx(static_cast<double>(unknown) / 200.0));
}

TEST_CASE("cascade: D1 verdicts carry sparsity scores in [0,1]") {
  Rng rng(10);
  const auto pair = random_pair(8, rng);
  Thresholds t;
  t.tau_min = 0.4;
  t.tau_max = 0.6;
  const auto xs = testing::random_batch(8, 50, rng);
  for (const auto& v : cascade_classify_all(xs, pair.sparse, pair.plain, t)) {
    if (v.stage == Stage::kD1) {
      CHECK(v.score >= 0.0);
      CHECK(v.score <= 1.0);
    }
  }
}

TEST_CASE("cascade: model compatibility is enforced") {
  Rng rng(11);
  auto pair = random_pair(10, rng);
  Thresholds t;

  const Eigen::VectorXd x = testing::random_batch(10, 1, rng).col(0);
  CHECK_THROWS_AS(cascade_classify(x, pair.plain, pair.plain, t), ArtifactError);
  CHECK_THROWS_AS(cascade_classify(x, pair.sparse, pair.sparse, t), ArtifactError);

  pair.sparse.transform_hash = 1;
  pair.plain.transform_hash = 2;
  CHECK_THROWS_AS(cascade_classify(x, pair.sparse, pair.plain, t), ArtifactError);

  pair.plain.transform_hash = 1;
  CHECK_NOTHROW(cascade_classify(x, pair.sparse, pair.plain, t));

  const auto other = random_pair(11, rng);
  CHECK_THROWS_AS(cascade_classify(x, pair.sparse, other.plain, t), ArtifactError);
}

TEST_CASE("verdict line format") {
  CHECK(format_verdict_line(12, {ingest::LabelKind::kAnomaly, Stage::kD1, 0.912345678}) ==
        "12,Anomaly,D1,0.912346");
  CHECK(format_verdict_line(1, {ingest::LabelKind::kNormal, Stage::kD2, 0.25}) ==
        "1,Normal,D2,0.25");
}

TEST_CASE("thresholds file: round trip and validation") {
  ThresholdsFile t;
  t.thresholds.tau_min = 0.21;
  t.thresholds.tau_max = 0.84;
  t.thresholds.thr_ae = 3.25;
  t.thresholds.eps_active = 1e-6;
  t.thr_d1r = 4.5;
  t.transform_hash = 0x1234ABCDull;

  const auto path = std::filesystem::temp_directory_path() / "autoids_thresholds.json";
  save_thresholds_file(t, path);
  const auto loaded = load_thresholds_file(path);
  CHECK(loaded.thresholds.tau_min == t.thresholds.tau_min);
  CHECK(loaded.thresholds.tau_max == t.thresholds.tau_max);
  CHECK(loaded.thresholds.thr_ae == t.thresholds.thr_ae);
  CHECK(loaded.thr_d1r == t.thr_d1r);
  CHECK(loaded.transform_hash == t.transform_hash);
  std::filesystem::remove(path);
}
