#ifndef LOWRES_VALIDATE_H_
#define LOWRES_VALIDATE_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lowres {

enum class OutputSchema { kConll, kEdlTsv, kFramesJsonl };

std::optional<OutputSchema> parse_output_schema(const std::string& name);

struct Violation {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ValidationReport {
  std::size_t records = 0;  // tokens, mentions or frames
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  // Throws SchemaViolation describing the first violation.
  void throw_if_invalid() const;
};

// conll: token<TAB>tag[<TAB>UNK|-], blank line between segments, BIO-valid.
// edl-tsv: seven columns, unique mention ids, doc:seg:begin-end spans, the
//   kb column is either a KB id or a NIL id, confidence in [0, 1].
// frames-jsonl: doc_id, type, place_kb_id, justification_seg, status and
//   resolution present and well-typed; urgency boolean when present.
ValidationReport validate_stream(std::istream& in, OutputSchema schema);
ValidationReport validate_file(const std::string& path, OutputSchema schema);

}  // namespace lowres

#endif  // LOWRES_VALIDATE_H_
