#ifndef LOWRES_PIPELINE_H_
#define LOWRES_PIPELINE_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lowres/config.h"
#include "lowres/corpus.h"
#include "lowres/gazetteer.h"
#include "lowres/linking.h"
#include "lowres/parallel_corpus.h"
#include "lowres/situation_frames.h"

namespace lowres {

struct RunSummary {
  std::string recipe;
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> outputs;  // file names inside the output directory
  std::string manifest_path;
};

// Validates the config, runs the recipe and writes its artifacts plus
// manifest.json into `output_dir`. Stage failures surface as StageError;
// configuration problems as ConfigError. Logs go to `log`.
RunSummary run_recipe(const PipelineConfig& config, const std::string& output_dir,
                      unsigned threads, std::ostream& log);

// ---------------------------------------------------------------------------
// Building blocks shared with the command-line tool.

struct ParallelDocument {
  std::string doc_id;
  std::vector<std::string> src;
  std::vector<std::string> tgt;
};

// JSONL {"doc_id", "src": [segments], "tgt": [segments]}.
std::vector<ParallelDocument> read_parallel_docs_jsonl(std::istream& in);

// Realigns every document and tokenizes the merged bead text. Beads with an
// empty side are dropped.
std::vector<SentencePair> realign_documents(const std::vector<ParallelDocument>& docs,
                                            const AlignmentCosts& costs);

// JSONL {"type": sf_type, "tokens": [..]} or {"type", "text"}.
LabeledDocs read_labeled_docs_jsonl(std::istream& in);

// Token-level entity span pairs for augmentation: a source token listed in
// the entity lexicon paired with the first unused target token that is one
// of its translations.
std::vector<std::vector<SpanPair>> find_entity_spans(std::span<const SentencePair> pairs,
                                                     const Lexicon& entity_lexicon);

// Gazetteer tags for every segment, in corpus order.
TaggedCorpus tag_corpus(const Corpus& corpus, const Gazetteer& gaz, std::size_t window,
                        unsigned threads);

// Applies edit-distance propagated single-token types to untagged tokens.
std::size_t apply_edit_propagation(TaggedCorpus& tagged,
                                   const std::map<std::string, EntityType>& types);

std::vector<Mention> collect_mentions(const TaggedCorpus& tagged, const Corpus& corpus);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace lowres

#endif  // LOWRES_PIPELINE_H_
