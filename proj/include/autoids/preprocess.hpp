#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "autoids/ingest.hpp"

namespace autoids::preprocess {

using FeatureVector = Eigen::VectorXd;

// Counts categorical tokens that were not in the fitted vocabularies.
// Surfaced in evaluation reports; an out-of-vocabulary token encodes as an
// all-zero block rather than an error.
struct OovCounter {
  std::uint64_t protocol = 0;
  std::uint64_t service = 0;
  std::uint64_t flag = 0;

  std::uint64_t total() const { return protocol + service + flag; }
};

// Fitted encoding pipeline: one-hot expansion of protocol/service/flag,
// per-feature standardization, then min-max scaling into [0,1]. Immutable
// after fit; apply() is reentrant.
class TransformSpec {
 public:
  TransformSpec() = default;

  // Vocabularies are the distinct tokens seen, in first-occurrence order,
  // except the protocol block which is seeded as (icmp, udp, tcp) so that
  // tcp encodes as (0,0,1). Mean/std are population statistics of the
  // one-hot-expanded training columns; min/max are taken over the
  // standardized training set.
  static TransformSpec fit(std::span<const ingest::RawFlow> training);
  static TransformSpec fit(std::span<const ingest::LabeledFlow> training);

  Eigen::Index dimension() const { return mean_.size(); }
  const std::vector<std::string>& protocol_vocab() const { return protocol_vocab_; }
  const std::vector<std::string>& service_vocab() const { return service_vocab_; }
  const std::vector<std::string>& flag_vocab() const { return flag_vocab_; }

  // Raw expanded vector: categorical blocks then the 38 numerics, pre-scaling.
  Eigen::VectorXd one_hot(const ingest::RawFlow& flow, OovCounter* oov = nullptr) const;

  // (x - mean) / std per feature; zero-std features map to 0.
  void standardize(Eigen::VectorXd& v) const;

  // (x - min) / (max - min) per feature; zero-range features map to 0 and
  // out-of-range values clamp to [0,1].
  void normalize(Eigen::VectorXd& v) const;

  // normalize(standardize(one_hot(flow))).
  FeatureVector apply(const ingest::RawFlow& flow, OovCounter* oov = nullptr) const;

  // Columns are samples.
  Eigen::MatrixXd apply_all(std::span<const ingest::RawFlow> flows,
                            OovCounter* oov = nullptr) const;
  Eigen::MatrixXd apply_all(std::span<const ingest::LabeledFlow> records,
                            OovCounter* oov = nullptr) const;

  // Versioned JSON document; doubles use shortest round-trip formatting, so
  // save/load reproduce the transform bit-exactly. See docs/FORMATS.md.
  void save(std::ostream& out) const;
  void save_file(const std::filesystem::path& path) const;
  static TransformSpec load(std::istream& in);
  static TransformSpec load_file(const std::filesystem::path& path);

  // FNV-1a 64 over the canonical serialized form. Models record this value
  // so that mismatched spec/model pairs are refused.
  std::uint64_t content_hash() const;

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& stddev() const { return std_; }
  const Eigen::VectorXd& post_std_min() const { return min_; }
  const Eigen::VectorXd& post_std_max() const { return max_; }

 private:
  std::string canonical_json() const;

  std::vector<std::string> protocol_vocab_;
  std::vector<std::string> service_vocab_;
  std::vector<std::string> flag_vocab_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd std_;
  Eigen::VectorXd min_;
  Eigen::VectorXd max_;
};

}  // namespace autoids::preprocess
