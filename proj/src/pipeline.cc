#include "lowres/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lowres/concurrency.h"
#include "lowres/error.h"
#include "lowres/filter_model.h"
#include "lowres/lexicon.h"
#include "lowres/relevance.h"
#include "lowres/text_util.h"
#include "lowres/unicode.h"
#include "lowres/version.h"

namespace lowres {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << content;
  if (!out) throw InvalidArgument("write failed for " + path);
}

std::vector<ParallelDocument> read_parallel_docs_jsonl(std::istream& in) {
  std::vector<ParallelDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ParallelDocument d;
      d.doc_id = j.at("doc_id").get<std::string>();
      for (const auto& s : j.at("src")) d.src.push_back(unicode::nfc(s.get<std::string>()));
      for (const auto& s : j.at("tgt")) d.tgt.push_back(unicode::nfc(s.get<std::string>()));
      docs.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("parallel docs line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return docs;
}

namespace {

std::vector<std::string> token_surfaces(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : tokenize(text)) out.push_back(std::move(t.surface));
  return out;
}

std::string join_range(const std::vector<std::string>& segs, const Range& r) {
  std::string out;
  for (std::size_t i = r.begin; i < r.end; ++i) {
    if (i > r.begin) out += ' ';
    out += segs[i];
  }
  return out;
}

}  // namespace

std::vector<SentencePair> realign_documents(const std::vector<ParallelDocument>& docs,
                                            const AlignmentCosts& costs) {
  std::vector<SentencePair> pairs;
  for (const auto& d : docs) {
    if (d.src.empty() || d.tgt.empty()) continue;
    const auto r = realign_document(d.src, d.tgt, costs);
    for (const auto& b : r.beads) {
      if (b.src.size() == 0 || b.tgt.size() == 0) continue;
      SentencePair p;
      p.src = token_surfaces(join_range(d.src, b.src));
      p.tgt = token_surfaces(join_range(d.tgt, b.tgt));
      p.origin_doc = d.doc_id;
      p.index = pairs.size();
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

LabeledDocs read_labeled_docs_jsonl(std::istream& in) {
  LabeledDocs out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto type = parse_sf_type(j.at("type").get<std::string>());
      if (!type) throw ParseError("unknown SF type");
      std::vector<std::string> tokens;
      if (j.contains("tokens")) {
        for (const auto& t : j["tokens"]) tokens.push_back(unicode::nfc(t.get<std::string>()));
      } else {
        tokens = token_surfaces(unicode::nfc(j.at("text").get<std::string>()));
      }
      out[*type].push_back(std::move(tokens));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("labeled docs line " + std::to_string(lineno) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError("labeled docs line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::vector<SpanPair>> find_entity_spans(std::span<const SentencePair> pairs,
                                                     const Lexicon& entity_lexicon) {
  std::vector<std::vector<SpanPair>> spans(pairs.size());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::vector<bool> used(pairs[p].tgt.size(), false);
    for (std::size_t i = 0; i < pairs[p].src.size(); ++i) {
      const auto* tr = entity_lexicon.find(pairs[p].src[i]);
      if (!tr) continue;
      for (std::size_t j = 0; j < pairs[p].tgt.size(); ++j) {
        if (used[j]) continue;
        const bool hit = std::any_of(tr->begin(), tr->end(), [&](const Translation& t) {
          return t.target == pairs[p].tgt[j];
        });
        if (hit) {
          used[j] = true;
          spans[p].push_back({{i, i + 1}, {j, j + 1}});
          break;
        }
      }
    }
  }
  return spans;
}

TaggedCorpus tag_corpus(const Corpus& corpus, const Gazetteer& gaz, std::size_t window,
                        unsigned threads) {
  TaggedCorpus tagged(corpus.size());
  parallel_for(corpus.size(), threads, [&](std::size_t d) {
    tagged[d].doc_id = corpus[d].doc_id;
    for (const auto& seg : corpus[d].segments) {
      TaggedSegment ts;
      ts.tokens = seg.surfaces();
      ts.tags = propagate_gazetteer(ts.tokens, gaz, window);
      tagged[d].segments.push_back(std::move(ts));
    }
  });
  return tagged;
}

std::size_t apply_edit_propagation(TaggedCorpus& tagged,
                                   const std::map<std::string, EntityType>& types) {
  std::size_t added = 0;
  for (auto& doc : tagged)
    for (auto& seg : doc.segments)
      for (std::size_t i = 0; i < seg.tokens.size(); ++i) {
        if (!seg.tags[i].untagged()) continue;
        // Single-token spans; B is valid after any tag.
        auto it = types.find(normalize_token(seg.tokens[i]));
        if (it == types.end()) continue;
        seg.tags[i] = Tag::B(it->second);
        ++added;
      }
  return added;
}

std::vector<Mention> collect_mentions(const TaggedCorpus& tagged, const Corpus& corpus) {
  std::vector<Mention> mentions;
  for (std::size_t d = 0; d < tagged.size(); ++d)
    for (std::size_t s = 0; s < tagged[d].segments.size(); ++s) {
      const auto& seg = tagged[d].segments[s];
      auto m = mentions_from_tags(tagged[d].doc_id, corpus[d].segments[s].seg_id, seg.tokens,
                                  seg.tags);
      for (auto& x : m) mentions.push_back(std::move(x));
    }
  return mentions;
}

namespace {

std::size_t count_spans(const TaggedCorpus& tagged) {
  std::size_t n = 0;
  for (const auto& d : tagged)
    for (const auto& s : d.segments) n += spans_of(s.tags).size();
  return n;
}

class RunContext {
 public:
  RunContext(const PipelineConfig& cfg, std::string out_dir, unsigned threads, std::ostream& log)
      : cfg_(cfg), out_dir_(std::move(out_dir)), threads_(threads), log_(log) {}

  const PipelineConfig& cfg() const { return cfg_; }
  unsigned threads() const { return threads_; }
  std::ostream& log() { return log_; }

  // Resolved path of a configured input; its content hash is recorded.
  std::string input(const std::string& field, const std::string& path) {
    const std::string full = cfg_.resolve(path);
    inputs_.push_back({field, fs::path(full).filename().string(), sha256_hex(read_file(full))});
    return full;
  }

  void output(const std::string& name, const std::string& content) {
    write_file((fs::path(out_dir_) / name).string(), content);
    outputs_.push_back({name, sha256_hex(content)});
    log_ << "  wrote " << name << " (" << content.size() << " bytes)\n";
  }

  void count(const std::string& key, std::size_t n) { counts_[key] = n; }

  template <typename Fn>
  auto stage(const std::string& name, Fn&& fn) {
    log_ << "[" << cfg_.recipe << "] " << name << "\n";
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(name, e.what());
    }
  }

  RunSummary finish() {
    ojson m;
    m["tool"] = "lowres-kit";
    m["version"] = kVersion;
    m["recipe"] = cfg_.recipe;
    const std::string tunables = cfg_.tunables_json();
    m["config_sha256"] = sha256_hex(tunables);
    m["tunables"] = ojson::parse(tunables);
    std::sort(inputs_.begin(), inputs_.end());
    inputs_.erase(std::unique(inputs_.begin(), inputs_.end()), inputs_.end());
    ojson in = ojson::array();
    for (const auto& [field, name, hash] : inputs_)
      in.push_back({{"field", field}, {"name", name}, {"sha256", hash}});
    m["inputs"] = in;
    ojson out = ojson::array();
    for (const auto& [name, hash] : outputs_) out.push_back({{"name", name}, {"sha256", hash}});
    m["outputs"] = out;
    ojson counts = ojson::object();
    for (const auto& [k, v] : counts_) counts[k] = v;
    m["counts"] = counts;

    RunSummary s;
    s.recipe = cfg_.recipe;
    s.counts = counts_;
    for (const auto& [name, hash] : outputs_) s.outputs.push_back(name);
    s.manifest_path = (fs::path(out_dir_) / "manifest.json").string();
    write_file(s.manifest_path, m.dump(2) + "\n");
    log_ << "  wrote manifest.json\n";
    return s;
  }

 private:
  const PipelineConfig& cfg_;
  std::string out_dir_;
  unsigned threads_;
  std::ostream& log_;
  std::vector<std::tuple<std::string, std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  std::map<std::string, std::size_t> counts_;
};

Corpus load_corpus_input(RunContext& ctx) {
  const std::string path = ctx.input("corpus", ctx.cfg().corpus);
  Corpus corpus = load_corpus(path);
  std::size_t segs = 0;
  for (const auto& d : corpus) segs += d.segments.size();
  ctx.count("documents", corpus.size());
  ctx.count("segments", segs);
  return corpus;
}

std::set<std::string> load_word_list_input(RunContext& ctx, const std::string& field,
                                           const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(ctx.input(field, path));
  return read_word_list(in);
}

Gazetteer load_gazetteer_input(RunContext& ctx, const Corpus* corpus_for_negatives) {
  const auto& c = ctx.cfg();
  std::ifstream in(ctx.input("ner.gazetteer", c.gazetteer));
  const auto raw = read_gazetteer_tsv(in);
  Gazetteer gaz = normalize_gazetteer(raw);
  auto negatives = load_word_list_input(ctx, "ner.negatives", c.negatives);
  if (c.auto_negatives && corpus_for_negatives) {
    const auto sentences = sentence_tokens(*corpus_for_negatives);
    const auto stats = CapStats::from_sentences(sentences);
    for (auto& w : negative_candidates(stats, c.negative_top_k)) negatives.insert(std::move(w));
  }
  gaz.set_negatives(negatives);
  ctx.count("gazetteer_keys", gaz.entries().size());
  ctx.count("negatives", gaz.negatives().size());
  return gaz;
}

// Selected (doc, seg) indices in corpus order.
std::vector<std::pair<std::size_t, std::size_t>> select_segments(RunContext& ctx,
                                                                 const Corpus& corpus) {
  const auto& c = ctx.cfg();
  std::vector<std::pair<std::size_t, std::size_t>> all;
  std::vector<std::vector<std::string>> sentences;
  std::map<Genre, std::size_t> genre_counts;
  for (std::size_t d = 0; d < corpus.size(); ++d)
    for (std::size_t s = 0; s < corpus[d].segments.size(); ++s) {
      all.emplace_back(d, s);
      sentences.push_back(corpus[d].segments[s].surfaces());
      ++genre_counts[corpus[d].genre];
    }
  if (c.terms.empty() || c.select_budget == 0) return all;

  std::ifstream in(ctx.input("select.terms", c.terms));
  const auto query = read_query_terms_tsv(in);
  const auto table = DfTable::build(sentences);
  const auto ranked = rank_by_relevance(sentences, query, table, ctx.threads());
  std::vector<ScoredCandidate> scored(sentences.size());
  for (const auto& r : ranked) {
    const auto [d, s] = all[r.index];
    scored[r.index] = {r.index, corpus[d].genre, r.score};
  }
  const GenreRatio ratio =
      c.genre_ratio.empty() ? GenreRatio::from_counts(genre_counts) : GenreRatio::parse(c.genre_ratio);
  auto picked = select_with_genre_ratio(scored, ratio, c.select_budget);
  std::sort(picked.begin(), picked.end());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i : picked) out.push_back(all[i]);
  return out;
}

void run_ner_data(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const Corpus corpus = ctx.stage("load", [&] { return load_corpus_input(ctx); });
  const auto selected = ctx.stage("select", [&] { return select_segments(ctx, corpus); });
  ctx.count("selected_segments", selected.size());

  const Gazetteer gaz = ctx.stage("gazetteer", [&] { return load_gazetteer_input(ctx, &corpus); });

  TaggedCorpus tagged = ctx.stage("propagate", [&] {
    TaggedCorpus out;
    std::vector<TaggedSegment> segs(selected.size());
    parallel_for(selected.size(), ctx.threads(), [&](std::size_t i) {
      const auto& seg = corpus[selected[i].first].segments[selected[i].second];
      segs[i].tokens = seg.surfaces();
      segs[i].tags = propagate_gazetteer(segs[i].tokens, gaz, c.window);
    });
    for (std::size_t i = 0; i < selected.size(); ++i) {
      const auto& doc_id = corpus[selected[i].first].doc_id;
      if (out.empty() || out.back().doc_id != doc_id) out.push_back({doc_id, {}});
      out.back().segments.push_back(std::move(segs[i]));
    }
    return out;
  });
  ctx.count("gazetteer_spans", count_spans(tagged));

  if (c.edit_propagate) {
    const std::size_t added = ctx.stage("edit-propagate", [&] {
      std::set<std::string> vocab;
      for (const auto& d : tagged)
        for (const auto& s : d.segments)
          for (std::size_t i = 0; i < s.tokens.size(); ++i)
            if (s.tags[i].untagged()) vocab.insert(s.tokens[i]);
      const auto types = propagate_edit_distance(vocab, gaz, c.min_edit_dist);
      return apply_edit_propagation(tagged, types);
    });
    ctx.count("edit_propagated_tokens", added);
  }

  if (c.doc_propagate) {
    tagged = ctx.stage("doc-propagate", [&] { return propagate_documents(tagged); });
  }
  ctx.count("entity_spans", count_spans(tagged));

  if (c.mark_unknown) {
    ctx.stage("mark-unknown", [&] {
      for (auto& d : tagged)
        for (auto& s : d.segments) s.tags = mark_unknown_capitalized(s.tags, s.tokens, gaz.negatives());
      return 0;
    });
  }

  ctx.stage("write", [&] {
    std::ostringstream out;
    write_conll(tagged, out, c.mark_unknown);
    ctx.output("ner.conll", out.str());
    return 0;
  });
}

std::vector<Lexicon> load_lexicons(RunContext& ctx, const std::vector<std::string>& paths,
                                   const std::string& field) {
  std::vector<Lexicon> lex;
  for (const auto& p : paths) {
    Lexicon l = load_lexicon(ctx.input(field, p));
    l.sort_by_weight();
    lex.push_back(std::move(l));
  }
  return lex;
}

TaggedCorpus tag_for_linking(RunContext& ctx, const Corpus& corpus,
                             const std::vector<KbEntry>& kb) {
  const auto& c = ctx.cfg();
  if (!c.gazetteer.empty()) {
    const Gazetteer gaz = load_gazetteer_input(ctx, &corpus);
    return tag_corpus(corpus, gaz, c.window, ctx.threads());
  }
  const auto stop = load_word_list_input(ctx, "edl.stopwords", c.stopwords);
  const auto names = kb_names(kb);
  const auto index = KbNameIndex::build(names);
  TaggedCorpus tagged(corpus.size());
  parallel_for(corpus.size(), ctx.threads(), [&](std::size_t d) {
    tagged[d].doc_id = corpus[d].doc_id;
    for (const auto& seg : corpus[d].segments) {
      TaggedSegment ts;
      ts.tokens = seg.surfaces();
      ts.tags = kb_exact_match(ts.tokens, index, stop);
      tagged[d].segments.push_back(std::move(ts));
    }
  });
  return tagged;
}

LinkOptions link_options(const PipelineConfig& c) {
  LinkOptions o;
  o.threshold = c.link_threshold;
  o.gpe_loc_compatible = c.gpe_loc_compatible;
  o.nil_margin = c.nil_margin;
  o.k_per_token = c.k_per_token;
  o.max_candidates = c.max_candidates;
  return o;
}

std::vector<KbEntry> load_pruned_kb(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto kb = load_kb(ctx.input("edl.kb", c.kb));
  const std::set<std::string> incident(c.incident_countries.begin(), c.incident_countries.end());
  const std::set<std::string> neighbors(c.neighbor_countries.begin(), c.neighbor_countries.end());
  auto pruned = prune_kb(kb, incident, neighbors, c.population_floor);
  ctx.count("kb_entries", kb.size());
  ctx.count("kb_entries_kept", pruned.size());
  return pruned;
}

void run_edl(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const Corpus corpus = ctx.stage("load", [&] { return load_corpus_input(ctx); });
  const auto kb = ctx.stage("prune", [&] { return load_pruned_kb(ctx); });
  const TaggedCorpus tagged = ctx.stage("tag", [&] { return tag_for_linking(ctx, corpus, kb); });
  const auto mentions = collect_mentions(tagged, corpus);
  ctx.count("mentions", mentions.size());

  const auto lexicons = ctx.stage("lexicons", [&] { return load_lexicons(ctx, c.lexicons, "edl.lexicons"); });
  auto results = ctx.stage("link", [&] {
    const KbIndex index(kb);
    return link_mentions(mentions, index, lexicons, link_options(c), ctx.threads());
  });
  ctx.stage("cluster", [&] {
    cluster_nil(results, mentions);
    return 0;
  });
  std::size_t nil = 0;
  std::set<std::string> clusters;
  for (const auto& r : results)
    if (r.is_nil()) {
      ++nil;
      clusters.insert(r.kb_id);
    }
  ctx.count("linked", results.size() - nil);
  ctx.count("nil", nil);
  ctx.count("nil_clusters", clusters.size());
  ctx.stage("write", [&] {
    std::ostringstream out;
    write_edl_tsv(results, mentions, out);
    ctx.output("edl.tsv", out.str());
    return 0;
  });
}

void run_mt_data(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const auto pairs = ctx.stage("realign", [&] {
    std::ifstream in(ctx.input("mt.parallel_docs", c.parallel_docs));
    const auto docs = read_parallel_docs_jsonl(in);
    ctx.count("parallel_documents", docs.size());
    return realign_documents(docs, AlignmentCosts{0.0, c.skip_cost, c.merge_cost});
  });
  ctx.count("pairs", pairs.size());
  {
    std::ostringstream out;
    write_parallel_tsv(pairs, out);
    ctx.output("realigned.tsv", out.str());
  }

  Lexicon lex = load_lexicon(ctx.input("mt.lexicon", c.lexicon));
  lex.sort_by_weight();
  const auto decision = ctx.stage("filter", [&] {
    TrainOptions opts;
    opts.l2 = c.l2;
    opts.epochs = c.epochs;
    opts.lr = c.learning_rate;
    opts.batch_size = c.batch_size;
    opts.seed = c.seed;
    const auto report = train_filter_on_clean(pairs, lex, c.swap_rate, opts);
    ctx.output("filter_model.json", report.model.to_json() + "\n");
    return filter_parallel(pairs, report.model, lex, c.filter_threshold, ctx.threads());
  });
  std::vector<SentencePair> kept;
  for (std::size_t i : decision.kept) kept.push_back(pairs[i]);
  ctx.count("kept", decision.kept.size());
  ctx.count("removed", decision.removed.size());
  {
    std::ostringstream out;
    write_parallel_tsv(kept, out);
    ctx.output("filtered.tsv", out.str());
    std::ostringstream rem;
    char buf[32];
    for (std::size_t i : decision.removed) {
      std::snprintf(buf, sizeof buf, "%.6f", decision.p_noisy[i]);
      rem << join(pairs[i].src, " ") << '\t' << join(pairs[i].tgt, " ") << '\t' << buf << '\n';
    }
    ctx.output("removed.tsv", rem.str());
  }

  ctx.stage("dnt", [&] {
    std::ostringstream masked, slots;
    std::size_t n = 0;
    for (std::size_t p = 0; p < kept.size(); ++p) {
      const auto m = dnt_tag(kept[p].src);
      n += m.order.size();
      masked << join(m.masked, " ") << '\t' << join(kept[p].tgt, " ") << '\n';
      ojson j;
      j["pair"] = p;
      ojson s = ojson::object();
      for (const auto& ph : m.order) s[ph] = m.slots.at(ph);
      j["slots"] = s;
      slots << j.dump() << '\n';
    }
    ctx.count("dnt_tokens", n);
    ctx.output("dnt.tsv", masked.str());
    ctx.output("dnt_slots.jsonl", slots.str());
    return 0;
  });

  if (!c.entity_lexicon.empty()) {
    ctx.stage("augment", [&] {
      const Lexicon elex = load_lexicon(ctx.input("mt.entity_lexicon", c.entity_lexicon));
      const auto spans = find_entity_spans(kept, elex);
      const auto augmented = augment_with_entities(kept, spans, elex, c.augment_copies, c.seed);
      ctx.count("augmented_pairs", augmented.size());
      std::ostringstream out;
      write_parallel_tsv(augmented, out);
      ctx.output("augmented.tsv", out.str());
      return 0;
    });
  }

  if (!c.corpus.empty()) {
    ctx.stage("ni-phrases", [&] {
      const Corpus mono = load_corpus(ctx.input("corpus", c.corpus));
      const auto sentences = sentence_tokens(mono);
      std::vector<std::vector<std::string>> bilingual;
      for (const auto& p : pairs) bilingual.push_back(p.src);
      const auto phrases = select_ni_phrases(sentences, bilingual, c.ni_n_max, c.ni_top_n);
      ctx.count("ni_phrases", phrases.size());
      std::ostringstream out;
      for (const auto& ph : phrases) out << join(ph.phrase, " ") << '\t' << ph.frequency << '\n';
      ctx.output("ni_phrases.tsv", out.str());
      return 0;
    });
  }
}

std::vector<KeywordEntry> build_keywords(RunContext& ctx) {
  const auto& c = ctx.cfg();
  if (!c.keywords.empty()) {
    std::ifstream in(ctx.input("sf.keywords", c.keywords));
    return read_keywords_tsv(in);
  }
  std::ifstream lin(ctx.input("sf.labeled", c.labeled));
  const auto labeled = read_labeled_docs_jsonl(lin);
  const auto candidates = candidate_keywords(labeled, c.keyword_top_n);
  EmbeddingNeighbors neighbors;
  if (!c.neighbors.empty()) {
    std::ifstream nin(ctx.input("sf.neighbors", c.neighbors));
    neighbors = read_neighbors_tsv(nin);
  }
  const auto expanded = expand_keywords(candidates, neighbors, c.max_neighbors, c.min_cosine);
  std::ifstream ain(ctx.input("sf.affinity", c.affinity));
  const auto affinity = read_affinity_tsv(ain);
  auto keywords = filter_by_affinity(expanded, affinity, c.th1);
  std::ostringstream out;
  write_keywords_tsv(keywords, out);
  ctx.output("keywords.tsv", out.str());
  return keywords;
}

std::map<std::string, std::vector<LocationMention>> locate(RunContext& ctx, const Corpus& corpus) {
  const auto& c = ctx.cfg();
  std::map<std::string, std::vector<LocationMention>> out;
  if (c.gazetteer.empty() && c.kb.empty()) return out;

  std::vector<KbEntry> kb;
  if (!c.kb.empty()) kb = load_pruned_kb(ctx);
  TaggedCorpus tagged;
  std::optional<Gazetteer> gaz;
  if (!c.gazetteer.empty()) {
    gaz = load_gazetteer_input(ctx, &corpus);
    tagged = tag_corpus(corpus, *gaz, c.window, ctx.threads());
  } else {
    tagged = tag_for_linking(ctx, corpus, kb);
  }
  std::vector<Mention> mentions;
  for (auto& m : collect_mentions(tagged, corpus))
    if (m.type == EntityType::kGPE || m.type == EntityType::kLOC) mentions.push_back(std::move(m));

  std::vector<LinkResult> results(mentions.size());
  if (!kb.empty()) {
    const auto lexicons = load_lexicons(ctx, c.lexicons, "edl.lexicons");
    const KbIndex index(kb);
    results = link_mentions(mentions, index, lexicons, link_options(c), ctx.threads());
  } else {
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      results[i].mention = i;
      const GazEntry* e = gaz->lookup(mentions[i].tokens);
      if (e && e->kb_id) {
        results[i].kb_id = *e->kb_id;
        results[i].method = LinkMethod::kExact;
        results[i].score = 1.0;
      }
    }
  }
  cluster_nil(results, mentions);
  for (std::size_t i = 0; i < mentions.size(); ++i)
    out[mentions[i].doc_id].push_back({mentions[i].seg_id, mentions[i].begin, results[i].kb_id});
  ctx.count("location_mentions", mentions.size());
  return out;
}

void run_sf(RunContext& ctx) {
  const auto& c = ctx.cfg();
  const Corpus corpus = ctx.stage("load", [&] { return load_corpus_input(ctx); });
  const auto keywords = ctx.stage("build-keywords", [&] { return build_keywords(ctx); });
  ctx.count("keywords", keywords.size());

  const auto raw = ctx.stage("tag", [&] {
    LemmaMap lemmas;
    if (!c.lemmas.empty()) {
      std::ifstream in(ctx.input("sf.lemmas", c.lemmas));
      lemmas = read_lemmas_tsv(in);
    }
    return tag_sentences(corpus, keywords, c.lemmas.empty() ? nullptr : &lemmas, c.top_t,
                         ctx.threads());
  });
  ctx.count("predictions", raw.size());

  const auto filtered = ctx.stage("filter", [&] {
    std::vector<SentencePrediction> preds = raw;
    if (c.filter_mode != "topk") preds = filter_mean_std(preds, c.lambda);
    if (c.filter_mode != "lambda") {
      std::map<std::string, std::size_t> sentences;
      for (const auto& d : corpus) sentences[d.doc_id] = d.segments.size();
      preds = filter_topk_per_doc(preds, sentences, c.k_cap);
    }
    return preds;
  });
  ctx.count("predictions_kept", filtered.size());

  const auto places = ctx.stage("locations", [&] {
    const auto locations = locate(ctx, corpus);
    return assign_locations(filtered, locations, c.location_window);
  });

  ctx.stage("frames", [&] {
    UrgencyLabels urgency;
    if (!c.urgency.empty()) {
      std::ifstream in(ctx.input("sf.urgency", c.urgency));
      urgency = read_urgency_tsv(in);
    }
    const auto frames = finalize_frames(filtered, places, c.urgency.empty() ? nullptr : &urgency);
    std::set<std::string> docs;
    for (const auto& f : frames) docs.insert(f.doc_id);
    ctx.count("frames", frames.size());
    ctx.count("documents_with_frames", docs.size());
    std::ostringstream out;
    write_frames_jsonl(frames, out);
    ctx.output("frames.jsonl", out.str());
    return 0;
  });
}

}  // namespace

RunSummary run_recipe(const PipelineConfig& config, const std::string& output_dir,
                      unsigned threads, std::ostream& log) {
  config.validate();
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw ConfigError("output_dir: cannot create " + output_dir + ": " + ec.message());
  RunContext ctx(config, output_dir, std::max(1u, threads), log);
  if (config.recipe == "ner-data") run_ner_data(ctx);
  else if (config.recipe == "edl") run_edl(ctx);
  else if (config.recipe == "mt-data") run_mt_data(ctx);
  else run_sf(ctx);
  return ctx.finish();
}

}  // namespace lowres
