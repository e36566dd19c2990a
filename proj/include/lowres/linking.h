#ifndef LOWRES_LINKING_H_
#define LOWRES_LINKING_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lowres/gazetteer.h"
#include "lowres/lexicon.h"
#include "lowres/types.h"

namespace lowres {

struct KbEntry {
  std::string kb_id;
  EntityType type = EntityType::kGPE;
  std::string name;
  std::string ascii_name;
  std::vector<std::string> alternate_names;
  std::string country_code;
  std::int64_t population = 0;
};

// TSV: kb_id, type, name, ascii_name, alternate_names (|-separated), country,
// population. Throws ParseError on duplicate ids or bad types.
std::vector<KbEntry> read_kb_tsv(std::istream& in);
std::vector<KbEntry> load_kb(const std::string& path);

// PER and ORG always survive. GPE/LOC survive when their country is the
// incident country or a neighbour, or when population > population_floor.
std::vector<KbEntry> prune_kb(std::span<const KbEntry> kb,
                              const std::set<std::string>& incident_countries,
                              const std::set<std::string>& neighbor_countries,
                              std::int64_t population_floor = 50000);

// Every (name, type) pair of the KB, for exact-match tagging.
std::vector<std::pair<std::string, EntityType>> kb_names(std::span<const KbEntry> kb);

struct Mention {
  std::string doc_id;
  int seg_id = 0;
  std::size_t begin = 0, end = 0;  // token range in the segment
  std::vector<std::string> tokens;
  EntityType type = EntityType::kGPE;

  std::string surface() const;
};

std::vector<Mention> mentions_from_tags(const std::string& doc_id, int seg_id,
                                        std::span<const std::string> tokens,
                                        std::span<const Tag> tags);

// Jaccard over lowercased whitespace-token sets. Both empty -> 1, one empty -> 0.
double jaccard_similarity(std::string_view a, std::string_view b);

// Per token the union of the top-k translations across lexicons (in list
// order), or the token itself when no lexicon knows it. Candidates are the
// cartesian products joined by spaces, ranked by summed option rank, capped
// at max_candidates, with the untranslated surface appended.
std::vector<std::string> candidate_translations(std::span<const std::string> tokens,
                                                std::span<const Lexicon> lexicons,
                                                std::size_t k_per_token = 3,
                                                std::size_t max_candidates = 64);

struct LinkOptions {
  double threshold = 0.5;
  bool gpe_loc_compatible = true;
  // When set, a best score within this margin of the runner-up entry is NIL.
  std::optional<double> nil_margin;
  std::size_t k_per_token = 3;
  std::size_t max_candidates = 64;
};

enum class LinkMethod { kTranslation, kExact, kNil };
std::string_view to_string(LinkMethod m);

struct LinkResult {
  std::size_t mention = 0;  // index into the mention list
  std::string kb_id;        // KB id, or NIL cluster id once clustered
  double score = 0.0;
  LinkMethod method = LinkMethod::kNil;

  bool is_nil() const { return method == LinkMethod::kNil; }
};

// Lowercased name token sets per entry plus an inverted token index.
class KbIndex {
 public:
  explicit KbIndex(std::vector<KbEntry> kb);

  const std::vector<KbEntry>& entries() const { return kb_; }
  const std::vector<std::vector<std::string>>& name_sets(std::size_t entry) const {
    return names_[entry];
  }
  // Entries with at least one name containing `token`.
  const std::vector<std::size_t>* with_token(const std::string& token) const;

 private:
  std::vector<KbEntry> kb_;
  std::vector<std::vector<std::vector<std::string>>> names_;
  std::unordered_map<std::string, std::vector<std::size_t>> postings_;
};

bool types_compatible(EntityType mention, EntityType entry, bool gpe_loc_compatible);

// Best (entry, Jaccard) over candidates x compatible entries x names. Ties
// go to the larger population, then the smaller kb_id. NIL below threshold.
LinkResult link_mention(const Mention& mention, std::size_t mention_index, const KbIndex& kb,
                        std::span<const Lexicon> lexicons, const LinkOptions& options = {});

std::vector<LinkResult> link_mentions(std::span<const Mention> mentions, const KbIndex& kb,
                                      std::span<const Lexicon> lexicons,
                                      const LinkOptions& options = {}, unsigned threads = 1);

// Lowercased, punctuation-stripped surface used for NIL clustering.
std::string nil_surface_key(const Mention& m);

// NIL results sharing a surface key share an id NIL0001, NIL0002, ... in
// order of first occurrence.
void cluster_nil(std::vector<LinkResult>& results, std::span<const Mention> mentions);

// doc_id, mention_id, surface, span, kb_id_or_NIL, type, confidence.
void write_edl_tsv(std::span<const LinkResult> results, std::span<const Mention> mentions,
                   std::ostream& out);

}  // namespace lowres

#endif  // LOWRES_LINKING_H_
