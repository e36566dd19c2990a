#ifndef LOWRES_SITUATION_FRAMES_H_
#define LOWRES_SITUATION_FRAMES_H_

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lowres/corpus.h"

namespace lowres {

// The eleven situation-frame types in canonical order. The order is also the
// tie-break whenever two types score the same.
enum class SfType {
  kEvac,
  kFood,
  kInfra,
  kMed,
  kSearch,
  kShelter,
  kUtils,
  kWater,
  kCrimeViolence,
  kRegimeChange,
  kTerrorism,
};

inline constexpr std::size_t kNumSfTypes = 11;
std::string_view to_string(SfType t);
std::optional<SfType> parse_sf_type(std::string_view s);
const std::array<SfType, kNumSfTypes>& all_sf_types();

// ---------------------------------------------------------------------------
// Keyword induction

struct ScoredWord {
  std::string word;
  double score = 0.0;
};

using LabeledDocs = std::map<SfType, std::vector<std::vector<std::string>>>;

// TF over each type's concatenated documents times 1/DF over every labeled
// document. Top n per type, ties lexicographic. Throws EmptyClass.
std::map<SfType, std::vector<ScoredWord>> candidate_keywords(const LabeledDocs& labeled,
                                                             std::size_t top_n = 100);

struct NeighborEntry {
  std::string word;
  double cosine = 0.0;
};
using EmbeddingNeighbors = std::map<std::string, std::vector<NeighborEntry>>;

struct ExpandedWord {
  std::string word;
  double provenance = 1.0;  // 1 for seed candidates, else the max neighbour cosine
};

// Appends up to max_neighbors neighbours with cosine > min_cosine for every
// candidate; duplicates per type keep the max provenance.
std::map<SfType, std::vector<ExpandedWord>> expand_keywords(
    const std::map<SfType, std::vector<ScoredWord>>& candidates,
    const EmbeddingNeighbors& neighbors, std::size_t max_neighbors = 30,
    double min_cosine = 0.70);

struct KeywordEntry {
  std::string keyword;
  SfType type = SfType::kEvac;
  double confidence = 0.0;
};

using AffinityMap = std::map<std::pair<std::string, SfType>, double>;

// Keeps (word, type) with affinity >= th1; confidence is the affinity.
std::vector<KeywordEntry> filter_by_affinity(
    const std::map<SfType, std::vector<ExpandedWord>>& expanded, const AffinityMap& affinity,
    double th1 = 0.8);

// ---------------------------------------------------------------------------
// Tagging and filtering

// One (sentence, type) prediction.
struct SentencePrediction {
  std::string doc_id;
  int seg_id = 0;
  SfType type = SfType::kEvac;
  double score = 0.0;
  std::vector<std::string> keywords;  // matched keywords of this type
};

using LemmaMap = std::map<std::string, std::string>;

// Sums keyword confidences per type (each distinct keyword once per
// sentence) and emits the top_t positive types. Tokens match on their
// lowercased form or, when a lemma map is given, on their lemma.
std::vector<SentencePrediction> tag_sentences(const Corpus& corpus,
                                              std::span<const KeywordEntry> keywords,
                                              const LemmaMap* lemmas = nullptr,
                                              std::size_t top_t = 2, unsigned threads = 1);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

std::map<SfType, MeanStd> score_stats(std::span<const SentencePrediction> predictions);

// Drops predictions whose score falls below mean + lambda * stddev of their type.
std::vector<SentencePrediction> filter_mean_std(std::span<const SentencePrediction> predictions,
                                                double lambda = -1.5);

// Per document keeps the k = min(cap, sentences) types with the highest
// maximum sentence score, then applies the mean-std filter with lambda = 0.
std::vector<SentencePrediction> filter_topk_per_doc(
    std::span<const SentencePrediction> predictions,
    const std::map<std::string, std::size_t>& sentences_per_doc, std::size_t cap = 3);

// ---------------------------------------------------------------------------
// Locations and frames

struct LocationMention {
  int seg_id = 0;
  std::size_t begin = 0;
  std::string place_id;  // KB id or NIL cluster id
};

inline constexpr std::size_t kUnboundedWindow = std::numeric_limits<std::size_t>::max();

// Nearest GPE/LOC mention within n_window segments of the justification
// (distance, then earlier segment, then leftmost); otherwise the location of
// the most recently placed earlier prediction in the document; otherwise "".
std::vector<std::string> assign_locations(
    std::span<const SentencePrediction> predictions,
    const std::map<std::string, std::vector<LocationMention>>& locations,
    std::size_t n_window = 1);

struct SituationFrame {
  std::string doc_id;
  SfType type = SfType::kEvac;
  std::string place_kb_id;
  int justification_seg = 0;
  double score = 0.0;
  std::string status = "current";
  std::string resolution = "insufficient";
  std::optional<bool> urgency;
};

using UrgencyLabels = std::map<std::pair<std::string, SfType>, bool>;

// One frame per (doc, type): the highest-scoring justification (ties to the
// earlier segment). Frames are ordered by first document appearance, then
// type order.
std::vector<SituationFrame> finalize_frames(std::span<const SentencePrediction> predictions,
                                            std::span<const std::string> places,
                                            const UrgencyLabels* urgency = nullptr);

void write_frames_jsonl(std::span<const SituationFrame> frames, std::ostream& out);

// ---------------------------------------------------------------------------
// File formats

std::vector<KeywordEntry> read_keywords_tsv(std::istream& in);
void write_keywords_tsv(std::span<const KeywordEntry> keywords, std::ostream& out);
EmbeddingNeighbors read_neighbors_tsv(std::istream& in);
AffinityMap read_affinity_tsv(std::istream& in);
LemmaMap read_lemmas_tsv(std::istream& in);
UrgencyLabels read_urgency_tsv(std::istream& in);

}  // namespace lowres

#endif  // LOWRES_SITUATION_FRAMES_H_
