#ifndef LOWRES_CORPUS_H_
#define LOWRES_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lowres/types.h"

namespace lowres {

struct Token {
  std::string surface;
  std::size_t start = 0;  // byte offsets into the segment's raw text
  std::size_t end = 0;
  bool is_capitalized = false;
};

struct Segment {
  int seg_id = 0;
  std::string raw;
  std::vector<Token> tokens;

  std::vector<std::string> surfaces() const;
};

struct Document {
  std::string doc_id;
  Genre genre = Genre::kOther;
  std::vector<Segment> segments;
};

using Corpus = std::vector<Document>;

enum class SpecialToken { kNone, kUrl, kEmail, kMention, kHashtag };

// Tokens are maximal runs of letters/digits/marks or single punctuation and
// symbol characters. URLs, emails, @mentions and #hashtags are recognized
// first and kept whole. Offsets are exact byte offsets into `text`.
std::vector<Token> tokenize(std::string_view text);

// Classifies a whole token as one of the atomic special patterns.
SpecialToken classify_special(std::string_view token);

struct Ngram {
  std::vector<std::string> tokens;
  std::size_t start = 0;
};

// All contiguous windows of length 1..n_max, ordered by (start, length).
std::vector<Ngram> extract_ngrams(std::span<const std::string> tokens,
                                  std::size_t n_max);

// Builds a document with NFC-normalized, tokenized segments numbered 0..n-1.
Document make_document(std::string doc_id, Genre genre,
                       const std::vector<std::string>& segments);

// JSON-lines corpus: {"doc_id": str, "genre": "NW"|"SN"|"WL", "segments": [str]}.
// Throws ParseError on malformed lines or duplicate doc ids.
Corpus read_corpus_jsonl(std::istream& in);
Corpus load_corpus(const std::string& path);
void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);

// Flattened view of every segment in corpus order.
std::vector<std::vector<std::string>> sentence_tokens(const Corpus& corpus);

}  // namespace lowres

#endif  // LOWRES_CORPUS_H_
