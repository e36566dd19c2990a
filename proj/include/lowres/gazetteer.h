#ifndef LOWRES_GAZETTEER_H_
#define LOWRES_GAZETTEER_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lowres/types.h"

namespace lowres {

using TokenKey = std::vector<std::string>;

// ---------------------------------------------------------------------------
// Tags

enum class TagKind { kO, kB, kI, kUnk };

struct Tag {
  TagKind kind = TagKind::kO;
  EntityType type = EntityType::kPER;  // meaningful for B and I only

  static Tag O() { return {}; }
  static Tag B(EntityType t) { return {TagKind::kB, t}; }
  static Tag I(EntityType t) { return {TagKind::kI, t}; }
  static Tag Unk() { return {TagKind::kUnk, EntityType::kPER}; }

  bool untagged() const { return kind == TagKind::kO || kind == TagKind::kUnk; }
  std::string str() const;
  static std::optional<Tag> parse(std::string_view s);

  friend bool operator==(const Tag& a, const Tag& b) {
    if (a.kind != b.kind) return false;
    return (a.kind != TagKind::kB && a.kind != TagKind::kI) || a.type == b.type;
  }
};

using TagSequence = std::vector<Tag>;

// I-X only after B-X or I-X. Returns the index of the first offending tag.
std::optional<std::size_t> find_bio_violation(std::span<const Tag> tags);
inline bool is_valid_bio(std::span<const Tag> tags) { return !find_bio_violation(tags); }

struct TaggedSpan {
  std::size_t begin = 0, end = 0;
  EntityType type = EntityType::kPER;
};

std::vector<TaggedSpan> spans_of(std::span<const Tag> tags);

// ---------------------------------------------------------------------------
// Normalization

// Strips punctuation (including '#' and '@'); lowercases tokens that contain
// Latin letters. Other scripts keep their case.
std::string normalize_token(std::string_view token);

// Normalized key of a gazetteer surface: empty tokens are dropped.
TokenKey normalize_key(std::span<const std::string> tokens);

// Normalized form of a text span, or nullopt when any token normalizes to
// nothing (a span never matches across bare punctuation).
std::optional<TokenKey> normalize_span(std::span<const std::string> tokens);

// ---------------------------------------------------------------------------
// Gazetteer

struct GazEntry {
  EntityType type = EntityType::kPER;
  std::optional<std::string> kb_id;
};

struct RawGazEntry {
  std::string surface;
  EntityType type = EntityType::kPER;
  std::optional<std::string> kb_id;
};

class Gazetteer {
 public:
  // Normalized keys, each normalization-stable.
  const std::map<TokenKey, GazEntry>& entries() const { return entries_; }
  // Keys exactly as tokenized from the raw surfaces.
  const std::map<TokenKey, GazEntry>& originals() const { return originals_; }
  const std::set<std::string>& negatives() const { return negatives_; }
  std::size_t max_key_length() const { return max_len_; }

  // Negatives are normalized, and single-token keys they hit are removed.
  void set_negatives(const std::set<std::string>& words);
  // Adds a normalized single- or multi-token entry unless the key exists.
  void add_entry(const TokenKey& key, GazEntry entry);

  // Exact original match first, then the normalized form. Single-token spans
  // whose normalized token is a negative never match.
  const GazEntry* lookup(std::span<const std::string> raw,
                         std::span<const std::string> normalized) const;
  const GazEntry* lookup(std::span<const std::string> raw) const;

  friend Gazetteer normalize_gazetteer(std::span<const RawGazEntry> raw);

 private:
  void prune_negatives();

  std::map<TokenKey, GazEntry> entries_;
  std::map<TokenKey, GazEntry> originals_;
  std::set<std::string> negatives_;
  std::size_t max_len_ = 0;
};

// Each raw surface contributes its tokenized key and its normalized key.
// Conflicting types are settled by majority, then PER > GPE > LOC > ORG.
Gazetteer normalize_gazetteer(std::span<const RawGazEntry> raw);

std::vector<RawGazEntry> read_gazetteer_tsv(std::istream& in);
std::set<std::string> read_word_list(std::istream& in);
Gazetteer load_gazetteer(const std::string& path, const std::string& negatives_path = "");

// ---------------------------------------------------------------------------
// Capitalization statistics

struct CapCount {
  std::size_t capitalized = 0;
  std::size_t total = 0;
};

class CapStats {
 public:
  static CapStats from_sentences(std::span<const std::vector<std::string>> sentences);

  // (capitalized + 0.5) / (total + 1); 0.5 for unseen words.
  static double ratio(const CapCount& c);
  double ratio(const std::string& word) const;
  CapCount count(const std::string& word) const;
  const std::map<std::string, CapCount>& counts() const { return counts_; }

 private:
  std::map<std::string, CapCount> counts_;  // keyed by lowercased word
};

// min(floor(ratio * n_buckets), n_buckets - 1).
std::size_t cap_bucket(double ratio, std::size_t n_buckets = 10);

// Words by ratio descending, then frequency descending, then lexicographic.
std::vector<std::string> negative_candidates(const CapStats& stats, std::size_t top_k = 1500);

// ---------------------------------------------------------------------------
// Label propagation

// Greedy left-to-right scan trying spans of length window..1 at each unread
// position; the first gazetteer hit is tagged and skipped over.
TagSequence propagate_gazetteer(std::span<const std::string> tokens, const Gazetteer& gaz,
                                std::size_t window = 5);

// O-tagged capitalized tokens that are not negatives become UNK.
TagSequence mark_unknown_capitalized(std::span<const Tag> tags,
                                     std::span<const std::string> tokens,
                                     const std::set<std::string>& negatives);

// Vocabulary words missing from the gazetteer receive the majority type of
// the single-token keys within Levenshtein distance < min_edit_dist.
std::map<std::string, EntityType> propagate_edit_distance(const std::set<std::string>& vocabulary,
                                                          const Gazetteer& gaz,
                                                          std::size_t min_edit_dist = 2);

struct TaggedSegment {
  std::vector<std::string> tokens;
  TagSequence tags;
};

struct TaggedDocument {
  std::string doc_id;
  std::vector<TaggedSegment> segments;
};

using TaggedCorpus = std::vector<TaggedDocument>;

// Re-tags untagged occurrences of every predicted surface. The type comes
// from the majority within the document when the surface was predicted
// there, otherwise from the corpus-wide majority. Longer surfaces go first;
// existing tags are never overwritten.
TaggedCorpus propagate_documents(const TaggedCorpus& corpus);

// ---------------------------------------------------------------------------
// KB exact matching

class KbNameIndex {
 public:
  // Names are lowercased; a name listed under several types keeps the
  // majority type, ties by PER > GPE > LOC > ORG.
  static KbNameIndex build(std::span<const std::pair<std::string, EntityType>> names);

  std::optional<EntityType> find(const std::string& lowered) const;
  std::optional<EntityType> find_without_spaces(const std::string& lowered) const;

 private:
  std::map<std::string, EntityType> names_;
  std::map<std::string, EntityType> compact_;
};

// Longest-first lowercased n-gram matching without overlaps; n-grams with a
// stopword are skipped. Remaining #hashtag tokens match with '#' stripped
// against names with spaces removed.
TagSequence kb_exact_match(std::span<const std::string> tokens, const KbNameIndex& index,
                           const std::set<std::string>& stopwords, std::size_t n_max = 4);

// ---------------------------------------------------------------------------
// CoNLL output

// token<TAB>tag per line, blank line between segments. With `unk_column`, a
// third column carries UNK or '-' and UNK tokens show as O in the tag column.
void write_conll(const TaggedCorpus& corpus, std::ostream& out, bool unk_column = false);

}  // namespace lowres

#endif  // LOWRES_GAZETTEER_H_
