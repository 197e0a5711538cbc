#include "autoids/preprocess.hpp"

#include <array>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <unordered_map>

#include "autoids/errors.hpp"
#include "autoids/hash.hpp"

namespace autoids::preprocess {
namespace {

using json = nlohmann::json;

// Index lookup preserving insertion order of the vocabulary vector.
class VocabIndex {
 public:
  explicit VocabIndex(const std::vector<std::string>& vocab) {
    for (std::size_t i = 0; i < vocab.size(); ++i) index_.emplace(vocab[i], i);
  }
  std::optional<std::size_t> find(const std::string& token) const {
    const auto it = index_.find(token);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

void collect_token(const std::string& token, std::vector<std::string>& vocab,
                   std::unordered_map<std::string, std::size_t>& seen) {
  if (seen.emplace(token, vocab.size()).second) vocab.push_back(token);
}

}  // namespace

TransformSpec TransformSpec::fit(std::span<const ingest::LabeledFlow> training) {
  std::vector<ingest::RawFlow> flows;
  flows.reserve(training.size());
  for (const auto& r : training) flows.push_back(r.flow);
  return fit(std::span<const ingest::RawFlow>(flows));
}

TransformSpec TransformSpec::fit(std::span<const ingest::RawFlow> training) {
  if (training.empty()) throw ConfigError("fit: empty training set");

  TransformSpec spec;

  // Vocabulary pass. The protocol ordering is seeded (icmp, udp, tcp); any
  // seed token absent from the data is dropped, extra tokens follow in
  // first-occurrence order. Service and flag order is first occurrence.
  {
    std::unordered_map<std::string, std::size_t> proto_seen, service_seen, flag_seen;
    std::vector<std::string> proto_extra;
    for (const auto& seed : {"icmp", "udp", "tcp"}) proto_seen.emplace(seed, 0);
    std::array<bool, 3> seed_present{};
    for (const auto& flow : training) {
      if (flow.protocol == "icmp") seed_present[0] = true;
      else if (flow.protocol == "udp") seed_present[1] = true;
      else if (flow.protocol == "tcp") seed_present[2] = true;
      else collect_token(flow.protocol, proto_extra, proto_seen);
      collect_token(flow.service, spec.service_vocab_, service_seen);
      collect_token(flow.flag, spec.flag_vocab_, flag_seen);
    }
    const std::array<const char*, 3> seeds{"icmp", "udp", "tcp"};
    for (std::size_t i = 0; i < seeds.size(); ++i)
      if (seed_present[i]) spec.protocol_vocab_.emplace_back(seeds[i]);
    for (auto& token : proto_extra) spec.protocol_vocab_.push_back(std::move(token));
  }

  const Eigen::Index dim =
      static_cast<Eigen::Index>(spec.protocol_vocab_.size() + spec.service_vocab_.size() +
                                spec.flag_vocab_.size() + ingest::kNumericCount);

  // Population mean/std per expanded column, Welford over the training set.
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(dim);
  spec.mean_ = Eigen::VectorXd::Zero(dim);
  spec.std_ = Eigen::VectorXd::Zero(dim);

  Eigen::VectorXd x(dim);
  Eigen::VectorXd delta(dim);
  std::size_t n = 0;
  for (const auto& flow : training) {
    x = spec.one_hot(flow);
    ++n;
    delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2.array() += delta.array() * (x - mean).array();
  }
  spec.mean_ = mean;
  spec.std_ = (m2 / static_cast<double>(n)).array().max(0.0).sqrt();

  // Min/max of the standardized training set.
  spec.min_ = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::infinity());
  spec.max_ = Eigen::VectorXd::Constant(dim, -std::numeric_limits<double>::infinity());
  for (const auto& flow : training) {
    x = spec.one_hot(flow);
    spec.standardize(x);
    spec.min_ = spec.min_.cwiseMin(x);
    spec.max_ = spec.max_.cwiseMax(x);
  }
  return spec;
}

Eigen::VectorXd TransformSpec::one_hot(const ingest::RawFlow& flow, OovCounter* oov) const {
  const std::size_t np = protocol_vocab_.size();
  const std::size_t ns = service_vocab_.size();
  const std::size_t nf = flag_vocab_.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(np + ns + nf + ingest::kNumericCount));

  // Vocab lookups are linear scans; the blocks are small (3/70/11) and the
  // scan beats building hash indexes for every call pattern we have.
  const auto encode_block = [&out](const std::vector<std::string>& vocab,
                                   const std::string& token, std::size_t offset,
                                   std::uint64_t* miss) {
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      if (vocab[i] == token) {
        out[static_cast<Eigen::Index>(offset + i)] = 1.0;
        return;
      }
    }
    if (miss) ++*miss;
  };

  encode_block(protocol_vocab_, flow.protocol, 0, oov ? &oov->protocol : nullptr);
  encode_block(service_vocab_, flow.service, np, oov ? &oov->service : nullptr);
  encode_block(flag_vocab_, flow.flag, np + ns, oov ? &oov->flag : nullptr);

  const std::size_t base = np + ns + nf;
  for (std::size_t i = 0; i < ingest::kNumericCount; ++i)
    out[static_cast<Eigen::Index>(base + i)] = flow.numeric[i];
  return out;
}

void TransformSpec::standardize(Eigen::VectorXd& v) const {
  if (v.size() != dimension())
    throw ConfigError("standardize: vector dimension " + std::to_string(v.size()) +
                      " != spec dimension " + std::to_string(dimension()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = std_[i] > 0 ? (v[i] - mean_[i]) / std_[i] : 0.0;
}

void TransformSpec::normalize(Eigen::VectorXd& v) const {
  if (v.size() != dimension())
    throw ConfigError("normalize: vector dimension " + std::to_string(v.size()) +
                      " != spec dimension " + std::to_string(dimension()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double range = max_[i] - min_[i];
    if (range > 0) {
      const double scaled = (v[i] - min_[i]) / range;
      v[i] = scaled < 0.0 ? 0.0 : (scaled > 1.0 ? 1.0 : scaled);
    } else {
      v[i] = 0.0;
    }
  }
}

FeatureVector TransformSpec::apply(const ingest::RawFlow& flow, OovCounter* oov) const {
  Eigen::VectorXd v = one_hot(flow, oov);
  standardize(v);
  normalize(v);
  return v;
}

Eigen::MatrixXd TransformSpec::apply_all(std::span<const ingest::RawFlow> flows,
                                         OovCounter* oov) const {
  Eigen::MatrixXd out(dimension(), static_cast<Eigen::Index>(flows.size()));
  for (std::size_t i = 0; i < flows.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = apply(flows[i], oov);
  return out;
}

Eigen::MatrixXd TransformSpec::apply_all(std::span<const ingest::LabeledFlow> records,
                                         OovCounter* oov) const {
  Eigen::MatrixXd out(dimension(), static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i)
    out.col(static_cast<Eigen::Index>(i)) = apply(records[i].flow, oov);
  return out;
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) v[i++] = x.get<double>();
  return v;
}

constexpr const char* kFormatTag = "autoids/transform-spec";
constexpr int kVersion = 1;

}  // namespace

std::string TransformSpec::canonical_json() const {
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kVersion;
  doc["dimension"] = dimension();
  doc["protocol_vocab"] = protocol_vocab_;
  doc["service_vocab"] = service_vocab_;
  doc["flag_vocab"] = flag_vocab_;
  doc["mean"] = vector_to_json(mean_);
  doc["std"] = vector_to_json(std_);
  doc["min"] = vector_to_json(min_);
  doc["max"] = vector_to_json(max_);
  // nlohmann::json keeps object keys sorted, and doubles serialize with
  // shortest round-trip formatting, so this string is canonical.
  return doc.dump();
}

std::uint64_t TransformSpec::content_hash() const { return fnv1a64(canonical_json()); }

void TransformSpec::save(std::ostream& out) const {
  out << json::parse(canonical_json()).dump(2) << '\n';
  if (!out) throw IoError("failed writing transform spec");
}

void TransformSpec::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  save(out);
}

TransformSpec TransformSpec::load(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ArtifactError(std::string("corrupt transform spec: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatTag)
      throw ArtifactError("not a transform spec file");
    if (doc.at("version").get<int>() != kVersion)
      throw ArtifactError("unsupported transform spec version");
    TransformSpec spec;
    spec.protocol_vocab_ = doc.at("protocol_vocab").get<std::vector<std::string>>();
    spec.service_vocab_ = doc.at("service_vocab").get<std::vector<std::string>>();
    spec.flag_vocab_ = doc.at("flag_vocab").get<std::vector<std::string>>();
    spec.mean_ = vector_from_json(doc.at("mean"));
    spec.std_ = vector_from_json(doc.at("std"));
    spec.min_ = vector_from_json(doc.at("min"));
    spec.max_ = vector_from_json(doc.at("max"));
    const auto dim = doc.at("dimension").get<Eigen::Index>();
    if (dim != spec.dimension() || spec.std_.size() != dim || spec.min_.size() != dim ||
        spec.max_.size() != dim)
      throw ArtifactError("transform spec dimension mismatch");
    return spec;
  } catch (const json::exception& e) {
    throw ArtifactError(std::string("corrupt transform spec: ") + e.what());
  }
}

TransformSpec TransformSpec::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open transform spec: " + path.string());
  return load(in);
}

}  // namespace autoids::preprocess
