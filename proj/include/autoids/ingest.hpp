#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace autoids::ingest {

// NSL-KDD record geometry: 41 attributes, of which protocol/service/flag are
// categorical and the remaining 38 (duration plus 37 trailing columns) are
// numeric.
inline constexpr std::size_t kAttributeCount = 41;
inline constexpr std::size_t kNumericCount = 38;

enum class LabelKind : std::uint8_t { kNormal = 0, kAnomaly = 1 };

enum class AttackCategory : std::uint8_t {
  kDos = 0,
  kProbing = 1,
  kR2L = 2,
  kU2R = 3,
  kUnknown = 4,
};

std::string_view to_string(LabelKind kind);
std::string_view to_string(AttackCategory category);
std::optional<AttackCategory> category_from_string(std::string_view name);

// One flow record, pre-encoding. numeric[0] is the duration column; the rest
// follow file order (src_bytes .. dst_host_srv_rerror_rate).
struct RawFlow {
  std::string protocol;
  std::string service;
  std::string flag;
  std::array<double, kNumericCount> numeric{};

  bool operator==(const RawFlow&) const = default;
};

struct FlowLabel {
  LabelKind kind = LabelKind::kNormal;
  // Present only when kind == kAnomaly.
  std::optional<AttackCategory> category;
  // Raw label token as it appeared in the file ("normal", "neptune", ...).
  std::string token;

  bool operator==(const FlowLabel&) const = default;
};

struct LabeledFlow {
  RawFlow flow;
  FlowLabel label;
  std::optional<int> difficulty;
};

// Attack-name -> category table, loaded from a data file so that new attack
// names are classifiable without code changes. "normal" is never an entry.
class CategoryMap {
 public:
  CategoryMap() = default;

  static CategoryMap load(const std::filesystem::path& path);
  static CategoryMap parse(std::istream& in);

  void insert(std::string name, AttackCategory category);
  std::size_t size() const { return entries_.size(); }

  // Total function: "normal" -> Normal, known attacks -> their category,
  // anything else -> Anomaly with category Unknown.
  FlowLabel map_label(std::string_view token) const;

 private:
  std::map<std::string, AttackCategory, std::less<>> entries_;
};

struct ColumnSchema {
  bool has_label = true;
  bool has_difficulty = true;
};

enum class ParseMode { kStrict, kLenient };

struct ParseDiagnostic {
  std::size_t line_number = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  std::vector<LabeledFlow> records;
  std::vector<ParseDiagnostic> diagnostics;  // lenient mode: skipped lines
};

// Parses comma-separated records, one per line. Strict mode throws ParseError
// at the first bad record; lenient mode skips it and records a diagnostic.
// With schema.has_label == false the label of every record is Normal with an
// empty token (classification input does not carry labels).
ParseResult parse_records(std::istream& in, const ColumnSchema& schema,
                          const CategoryMap& categories, ParseMode mode);
ParseResult parse_records_file(const std::filesystem::path& path,
                               const ColumnSchema& schema,
                               const CategoryMap& categories, ParseMode mode);

// Parses the 41 attribute fields (plus optional trailing columns already
// split off by the caller). Used by parse_records and by the CLI stream mode.
RawFlow parse_flow_fields(std::span<const std::string_view> fields);

// Serializes back to the CSV layout parse_records accepts. Numeric columns
// use shortest round-trip formatting, so parse(to_csv(r)) == r bit-exactly.
std::string to_csv(const RawFlow& flow);
std::string to_csv(const LabeledFlow& record, const ColumnSchema& schema);

struct DatasetSummary {
  std::uint64_t total = 0;
  std::uint64_t normal = 0;
  std::uint64_t dos = 0;
  std::uint64_t probing = 0;
  std::uint64_t r2l = 0;
  std::uint64_t u2r = 0;
  std::uint64_t unknown_category = 0;

  std::uint64_t anomalies() const {
    return dos + probing + r2l + u2r + unknown_category;
  }
};

DatasetSummary summarize(std::span<const LabeledFlow> records);
std::string format_summary(const DatasetSummary& summary);

}  // namespace autoids::ingest
