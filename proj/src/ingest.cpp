#include "autoids/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "autoids/errors.hpp"

namespace autoids::ingest {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view field, std::size_t column) {
  double value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw ParseError("column " + std::to_string(column + 1) + ": not a number: '" +
                     std::string(field) + "'");
  if (!std::isfinite(value))
    throw ParseError("column " + std::to_string(column + 1) + ": non-finite value");
  if (value < 0)
    throw ParseError("column " + std::to_string(column + 1) + ": negative value '" +
                     std::string(field) + "'");
  return value;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string_view to_string(LabelKind kind) {
  return kind == LabelKind::kNormal ? "Normal" : "Anomaly";
}

std::string_view to_string(AttackCategory category) {
  switch (category) {
    case AttackCategory::kDos: return "DoS";
    case AttackCategory::kProbing: return "Probing";
    case AttackCategory::kR2L: return "R2L";
    case AttackCategory::kU2R: return "U2R";
    case AttackCategory::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<AttackCategory> category_from_string(std::string_view name) {
  if (name == "DoS" || name == "dos" || name == "DOS") return AttackCategory::kDos;
  if (name == "Probing" || name == "probing" || name == "probe" || name == "Probe")
    return AttackCategory::kProbing;
  if (name == "R2L" || name == "r2l") return AttackCategory::kR2L;
  if (name == "U2R" || name == "u2r") return AttackCategory::kU2R;
  if (name == "Unknown" || name == "unknown") return AttackCategory::kUnknown;
  return std::nullopt;
}

CategoryMap CategoryMap::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open category map: " + path.string());
  return parse(in);
}

CategoryMap CategoryMap::parse(std::istream& in) {
  CategoryMap map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t comma = stripped.find(',');
    if (comma == std::string_view::npos)
      throw ParseError("category map line " + std::to_string(line_no) +
                       ": expected name,category");
    const std::string_view name = trim(stripped.substr(0, comma));
    const std::string_view cat = trim(stripped.substr(comma + 1));
    const auto category = category_from_string(cat);
    if (name.empty() || !category)
      throw ParseError("category map line " + std::to_string(line_no) +
                       ": unknown category '" + std::string(cat) + "'");
    map.insert(std::string(name), *category);
  }
  return map;
}

void CategoryMap::insert(std::string name, AttackCategory category) {
  entries_.insert_or_assign(std::move(name), category);
}

FlowLabel CategoryMap::map_label(std::string_view token) const {
  FlowLabel label;
  label.token = std::string(token);
  if (token == "normal") {
    label.kind = LabelKind::kNormal;
    return label;
  }
  label.kind = LabelKind::kAnomaly;
  if (const auto it = entries_.find(token); it != entries_.end())
    label.category = it->second;
  else
    label.category = AttackCategory::kUnknown;
  return label;
}

RawFlow parse_flow_fields(std::span<const std::string_view> fields) {
  if (fields.size() != kAttributeCount)
    throw ParseError("expected " + std::to_string(kAttributeCount) +
                     " attribute fields, got " + std::to_string(fields.size()));
  RawFlow flow;
  flow.numeric[0] = parse_double(fields[0], 0);  // duration
  flow.protocol = std::string(fields[1]);
  flow.service = std::string(fields[2]);
  flow.flag = std::string(fields[3]);
  if (flow.protocol.empty()) throw ParseError("column 2: empty protocol token");
  if (flow.service.empty()) throw ParseError("column 3: empty service token");
  if (flow.flag.empty()) throw ParseError("column 4: empty flag token");
  for (std::size_t i = 4; i < kAttributeCount; ++i)
    flow.numeric[i - 3] = parse_double(fields[i], i);
  return flow;
}

namespace {

LabeledFlow parse_line(std::string_view line, const ColumnSchema& schema,
                       const CategoryMap& categories) {
  auto fields = split_fields(line);
  for (auto& f : fields) f = trim(f);

  std::size_t expected = kAttributeCount;
  if (schema.has_label) ++expected;
  if (schema.has_difficulty) ++expected;
  if (fields.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " fields, got " +
                     std::to_string(fields.size()));

  LabeledFlow record;
  record.flow = parse_flow_fields(std::span(fields).first(kAttributeCount));

  std::size_t next = kAttributeCount;
  if (schema.has_label) {
    const std::string_view token = fields[next++];
    if (token.empty()) throw ParseError("empty label token");
    record.label = categories.map_label(token);
  }
  if (schema.has_difficulty) {
    const std::string_view field = fields[next];
    int difficulty = 0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), difficulty);
    if (ec != std::errc{} || ptr != field.data() + field.size())
      throw ParseError("bad difficulty value '" + std::string(field) + "'");
    record.difficulty = difficulty;
  }
  return record;
}

}  // namespace

ParseResult parse_records(std::istream& in, const ColumnSchema& schema,
                          const CategoryMap& categories, ParseMode mode) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      result.records.push_back(parse_line(line, schema, categories));
    } catch (const ParseError& e) {
      if (mode == ParseMode::kStrict)
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      result.diagnostics.push_back({line_no, e.what()});
    }
  }
  if (in.bad()) throw IoError("stream read failure after line " + std::to_string(line_no));
  return result;
}

ParseResult parse_records_file(const std::filesystem::path& path, const ColumnSchema& schema,
                               const CategoryMap& categories, ParseMode mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path.string());
  return parse_records(in, schema, categories, mode);
}

std::string to_csv(const RawFlow& flow) {
  std::string out;
  out.reserve(256);
  append_double(out, flow.numeric[0]);
  out += ',';
  out += flow.protocol;
  out += ',';
  out += flow.service;
  out += ',';
  out += flow.flag;
  for (std::size_t i = 1; i < kNumericCount; ++i) {
    out += ',';
    append_double(out, flow.numeric[i]);
  }
  return out;
}

std::string to_csv(const LabeledFlow& record, const ColumnSchema& schema) {
  std::string out = to_csv(record.flow);
  if (schema.has_label) {
    out += ',';
    out += record.label.token;
  }
  if (schema.has_difficulty) {
    out += ',';
    out += std::to_string(record.difficulty.value_or(0));
  }
  return out;
}

DatasetSummary summarize(std::span<const LabeledFlow> records) {
  DatasetSummary s;
  s.total = records.size();
  for (const auto& r : records) {
    if (r.label.kind == LabelKind::kNormal) {
      ++s.normal;
      continue;
    }
    switch (r.label.category.value_or(AttackCategory::kUnknown)) {
      case AttackCategory::kDos: ++s.dos; break;
      case AttackCategory::kProbing: ++s.probing; break;
      case AttackCategory::kR2L: ++s.r2l; break;
      case AttackCategory::kU2R: ++s.u2r; break;
      case AttackCategory::kUnknown: ++s.unknown_category; break;
    }
  }
  return s;
}

std::string format_summary(const DatasetSummary& s) {
  std::ostringstream out;
  out << "total " << s.total << "  normal " << s.normal << "  DoS " << s.dos
      << "  Probing " << s.probing << "  R2L " << s.r2l << "  U2R " << s.u2r;
  if (s.unknown_category > 0) out << "  unknown-category " << s.unknown_category;
  return out.str();
}

}  // namespace autoids::ingest
