#include "lowres/validate.h"

#include <cstdlib>
#include <fstream>
#include <istream>
#include <regex>
#include <set>

#include <json.hpp>

#include "lowres/error.h"
#include "lowres/gazetteer.h"
#include "lowres/situation_frames.h"
#include "lowres/text_util.h"
#include "lowres/types.h"

namespace lowres {

std::optional<OutputSchema> parse_output_schema(const std::string& name) {
  if (name == "conll") return OutputSchema::kConll;
  if (name == "edl-tsv") return OutputSchema::kEdlTsv;
  if (name == "frames-jsonl") return OutputSchema::kFramesJsonl;
  return std::nullopt;
}

void ValidationReport::throw_if_invalid() const {
  if (ok()) return;
  const auto& v = violations.front();
  std::string msg = "line " + std::to_string(v.line) + ": " + v.message;
  if (violations.size() > 1) msg += " (+" + std::to_string(violations.size() - 1) + " more)";
  throw SchemaViolation(msg);
}

namespace {

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

ValidationReport check_conll(std::istream& in) {
  ValidationReport r;
  std::string line;
  std::size_t lineno = 0;
  std::optional<Tag> prev;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) {
      prev.reset();
      continue;
    }
    const auto cols = split(line, '\t');
    if (cols.size() != 2 && cols.size() != 3) {
      r.violations.push_back({lineno, "expected 2 or 3 tab-separated columns"});
      continue;
    }
    ++r.records;
    if (cols[0].empty()) r.violations.push_back({lineno, "empty token"});
    const auto tag = Tag::parse(cols[1]);
    if (!tag || tag->kind == TagKind::kUnk) {
      r.violations.push_back({lineno, "bad tag '" + cols[1] + "'"});
      prev.reset();
      continue;
    }
    if (cols.size() == 3 && cols[2] != "UNK" && cols[2] != "-")
      r.violations.push_back({lineno, "third column must be UNK or -"});
    if (tag->kind == TagKind::kI) {
      const bool continues = prev && (prev->kind == TagKind::kB || prev->kind == TagKind::kI) &&
                             prev->type == tag->type;
      if (!continues)
        r.violations.push_back({lineno, cols[1] + " does not continue a " +
                                            std::string(to_string(tag->type)) + " span"});
    }
    prev = tag;
  }
  return r;
}

ValidationReport check_edl(std::istream& in) {
  static const std::regex kSpan(R"(^.+:-?\d+:\d+-\d+$)");
  static const std::regex kNil(R"(^NIL\d+$)");
  ValidationReport r;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto c = split(line, '\t');
    if (c.size() != 7) {
      r.violations.push_back({lineno, "expected 7 columns, got " + std::to_string(c.size())});
      continue;
    }
    ++r.records;
    if (c[0].empty()) r.violations.push_back({lineno, "empty doc_id"});
    if (c[1].empty() || !ids.insert(c[1]).second)
      r.violations.push_back({lineno, "missing or duplicate mention id '" + c[1] + "'"});
    if (c[2].empty()) r.violations.push_back({lineno, "empty surface"});
    if (!std::regex_match(c[3], kSpan))
      r.violations.push_back({lineno, "span '" + c[3] + "' is not doc:seg:begin-end"});
    const bool nil_like = starts_with(c[4], "NIL");
    if (c[4].empty() || (nil_like && !std::regex_match(c[4], kNil)))
      r.violations.push_back({lineno, "kb column must hold a KB id or a NIL id"});
    if (!parse_entity_type(c[5]))
      r.violations.push_back({lineno, "bad entity type '" + c[5] + "'"});
    char* end = nullptr;
    const double conf = std::strtod(c[6].c_str(), &end);
    if (c[6].empty() || *end != '\0' || !(conf >= 0.0 && conf <= 1.0))
      r.violations.push_back({lineno, "confidence '" + c[6] + "' not in [0, 1]"});
  }
  return r;
}

ValidationReport check_frames(std::istream& in) {
  ValidationReport r;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      r.violations.push_back({lineno, "not valid JSON"});
      continue;
    }
    if (!j.is_object()) {
      r.violations.push_back({lineno, "not a JSON object"});
      continue;
    }
    ++r.records;
    for (const char* key : {"doc_id", "type", "place_kb_id", "status", "resolution"})
      if (!j.contains(key) || !j[key].is_string())
        r.violations.push_back({lineno, std::string("missing string field ") + key});
    if (!j.contains("justification_seg") || !j["justification_seg"].is_number_integer())
      r.violations.push_back({lineno, "missing integer field justification_seg"});
    if (j.contains("type") && j["type"].is_string() && !parse_sf_type(j["type"].get<std::string>()))
      r.violations.push_back({lineno, "unknown frame type"});
    if (j.contains("urgency") && !j["urgency"].is_boolean())
      r.violations.push_back({lineno, "urgency must be boolean"});
  }
  return r;
}

}  // namespace

ValidationReport validate_stream(std::istream& in, OutputSchema schema) {
  switch (schema) {
    case OutputSchema::kConll: return check_conll(in);
    case OutputSchema::kEdlTsv: return check_edl(in);
    case OutputSchema::kFramesJsonl: return check_frames(in);
  }
  return {};
}

ValidationReport validate_file(const std::string& path, OutputSchema schema) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return validate_stream(in, schema);
}

}  // namespace lowres
