#ifndef LOWRES_CONFIG_H_
#define LOWRES_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lowres {

// Flat "section.key" -> raw value map from a TOML-like file:
//   # comment
//   [ner]
//   gazetteer = "gaz.tsv"
//   window = 5
// Strings may be quoted; lists are ["a", "b"] or a comma-separated string.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::istream& in);

struct PipelineConfig {
  std::string recipe;
  std::string base_dir;  // relative paths resolve against this
  std::string output_dir = "out";
  std::uint64_t seed = 1;

  std::string corpus;

  // select
  std::string terms;
  std::size_t select_budget = 0;  // 0 keeps every sentence
  std::string genre_ratio;        // empty: the corpus's own ratio

  // ner
  std::string gazetteer;
  std::string negatives;
  std::size_t window = 5;
  std::size_t min_edit_dist = 2;
  bool edit_propagate = true;
  bool doc_propagate = true;
  bool mark_unknown = false;
  std::size_t negative_top_k = 1500;
  bool auto_negatives = false;

  // edl
  std::string kb;
  std::vector<std::string> lexicons;
  std::string stopwords;
  double link_threshold = 0.5;
  std::vector<std::string> incident_countries;
  std::vector<std::string> neighbor_countries;
  std::int64_t population_floor = 50000;
  std::size_t k_per_token = 3;
  std::size_t max_candidates = 64;
  bool gpe_loc_compatible = true;
  std::optional<double> nil_margin;

  // mt
  std::string parallel_docs;  // JSONL {doc_id, src: [..], tgt: [..]}
  std::string lexicon;
  std::string entity_lexicon;
  double swap_rate = 0.1;
  double filter_threshold = 0.5;
  std::size_t epochs = 100;
  double learning_rate = 0.5;
  double l2 = 1e-4;
  std::size_t batch_size = 32;
  double skip_cost = 4.0;
  double merge_cost = 1.5;
  std::size_t augment_copies = 1;
  std::size_t ni_n_max = 4;
  std::size_t ni_top_n = 100;

  // sf
  std::string keywords;
  std::string labeled;
  std::string neighbors;
  std::string affinity;
  std::string lemmas;
  std::string urgency;
  std::size_t keyword_top_n = 100;
  std::size_t max_neighbors = 30;
  double min_cosine = 0.70;
  double th1 = 0.8;
  std::size_t top_t = 2;
  double lambda = -1.5;
  std::size_t k_cap = 3;
  std::string filter_mode = "both";  // both | lambda | topk
  std::size_t location_window = 1;   // kUnboundedWindow for "inf"

  // Unknown keys and malformed values throw ConfigError naming the field.
  static PipelineConfig from_key_values(const KeyValues& kv, const std::string& base_dir);
  static PipelineConfig load(const std::string& path);

  // Absolute or base_dir-relative path of a configured file.
  std::string resolve(const std::string& path) const;

  // Throws ConfigError (naming the field) when a referenced file is missing,
  // a recipe's required input is unset, or a tunable is out of range.
  void validate() const;

  // Canonical JSON of every tunable (no paths, no thread count).
  std::string tunables_json() const;
};

}  // namespace lowres

#endif  // LOWRES_CONFIG_H_
