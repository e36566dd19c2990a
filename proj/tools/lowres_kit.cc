// lowres-kit: command-line front end for the lowres library.
// Exit codes: 0 success, 1 validation or configuration error, 2 runtime error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lowres/active_selection.h"
#include "lowres/concurrency.h"
#include "lowres/config.h"
#include "lowres/corpus.h"
#include "lowres/error.h"
#include "lowres/filter_model.h"
#include "lowres/gazetteer.h"
#include "lowres/lexicon.h"
#include "lowres/linking.h"
#include "lowres/parallel_corpus.h"
#include "lowres/pipeline.h"
#include "lowres/relevance.h"
#include "lowres/situation_frames.h"
#include "lowres/text_util.h"
#include "lowres/transliterate.h"
#include "lowres/validate.h"
#include "lowres/version.h"

namespace fs = std::filesystem;
using namespace lowres;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  return in;
}

void emit(const std::string& path, const std::string& content) {
  write_file(path, content);
  std::cout << "wrote " << path << "\n";
}

std::vector<std::string> lines_of(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::vector<SentencePair> load_pairs(const std::string& path) {
  auto in = open_in(path);
  return read_parallel_tsv(in, fs::path(path).filename().string());
}

Lexicon load_sorted_lexicon(const std::string& path) {
  Lexicon l = load_lexicon(path);
  l.sort_by_weight();
  return l;
}

std::string g2p_table_path(const std::string& dir, const std::string& id) {
  if (fs::is_regular_file(id)) return id;
  return (fs::path(dir) / (id + ".csv")).string();
}

std::vector<RuleTable> load_chain(const std::string& dir, const std::string& chain) {
  std::vector<RuleTable> tables;
  for (const auto& id : split(chain, ','))
    if (!trim(id).empty()) {
      const std::string name(trim(id));
      tables.push_back(load_rule_table(g2p_table_path(dir, name), fs::path(name).stem().string()));
    }
  if (tables.empty()) throw InvalidArgument("empty --chain");
  return tables;
}

// Replaces every token surface with its IPA form.
Corpus to_ipa(const Corpus& corpus, std::span<const RuleTable> chain) {
  Corpus out = corpus;
  for (auto& d : out)
    for (auto& s : d.segments)
      for (auto& t : s.tokens) t.surface = g2p_backoff(t.surface, chain);
  return out;
}

struct Options {
  unsigned threads = 0;
  std::string g2p_dir = LOWRES_DATA_DIR "/g2p";
};

unsigned worker_count(const Options& o) { return o.threads ? o.threads : threads_from_env(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-resource language corpus toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Options opt;
  app.add_option("--threads", opt.threads, "Worker threads (default: LOWRES_THREADS or 1)");

  std::function<void()> action;

  // select ------------------------------------------------------------------
  std::string sel_corpus, sel_terms, sel_ratio, sel_out;
  std::size_t sel_budget = 0;
  auto* select = app.add_subcommand("select", "Rank sentences by TF-IDF relevance under a genre ratio");
  select->add_option("--corpus", sel_corpus)->required()->check(CLI::ExistingFile);
  select->add_option("--terms", sel_terms)->required()->check(CLI::ExistingFile);
  select->add_option("--budget", sel_budget)->required();
  select->add_option("--genre-ratio", sel_ratio, "e.g. NW=0.5,SN=0.3,WL=0.2 (default: corpus ratio)");
  select->add_option("-o,--out", sel_out)->required();
  select->callback([&] {
    action = [&] {
      const Corpus corpus = load_corpus(sel_corpus);
      std::vector<std::vector<std::string>> sentences;
      std::vector<std::pair<std::size_t, std::size_t>> refs;
      std::map<Genre, std::size_t> counts;
      for (std::size_t d = 0; d < corpus.size(); ++d)
        for (std::size_t s = 0; s < corpus[d].segments.size(); ++s) {
          sentences.push_back(corpus[d].segments[s].surfaces());
          refs.emplace_back(d, s);
          ++counts[corpus[d].genre];
        }
      auto tin = open_in(sel_terms);
      const auto query = read_query_terms_tsv(tin);
      const auto table = DfTable::build(sentences);
      const auto ranked = rank_by_relevance(sentences, query, table, worker_count(opt));
      std::vector<ScoredCandidate> scored(sentences.size());
      for (const auto& r : ranked) scored[r.index] = {r.index, corpus[refs[r.index].first].genre, r.score};
      const GenreRatio ratio = sel_ratio.empty() ? GenreRatio::from_counts(counts) : GenreRatio::parse(sel_ratio);
      std::ostringstream out;
      for (std::size_t i : select_with_genre_ratio(scored, ratio, sel_budget))
        out << corpus[refs[i].first].doc_id << ':' << corpus[refs[i].first].segments[refs[i].second].seg_id << '\n';
      emit(sel_out, out.str());
    };
  });

  // filter-parallel -----------------------------------------------------------
  std::string fp_input, fp_lex, fp_model, fp_model_out, fp_out, fp_removed;
  double fp_threshold = 0.5, fp_swap = 0.1;
  std::uint64_t fp_seed = 1;
  std::size_t fp_epochs = 100;
  auto* fpar = app.add_subcommand("filter-parallel", "Remove misaligned sentence pairs");
  fpar->add_option("--input", fp_input, "TSV src<TAB>tgt")->required()->check(CLI::ExistingFile);
  fpar->add_option("--lexicon", fp_lex)->required()->check(CLI::ExistingFile);
  fpar->add_option("--model", fp_model, "Trained model JSON (default: train on the input)")->check(CLI::ExistingFile);
  fpar->add_option("--model-out", fp_model_out);
  fpar->add_option("--threshold", fp_threshold, "Remove when P(noisy) exceeds this")->capture_default_str();
  fpar->add_option("--swap-rate", fp_swap)->capture_default_str();
  fpar->add_option("--epochs", fp_epochs)->capture_default_str();
  fpar->add_option("--seed", fp_seed)->capture_default_str();
  fpar->add_option("-o,--out", fp_out)->required();
  fpar->add_option("--removed", fp_removed);
  fpar->callback([&] {
    action = [&] {
      const auto pairs = load_pairs(fp_input);
      const Lexicon lex = load_sorted_lexicon(fp_lex);
      FilterModel model;
      if (!fp_model.empty()) {
        model = FilterModel::from_json(read_file(fp_model));
      } else {
        TrainOptions to;
        to.seed = fp_seed;
        to.epochs = fp_epochs;
        model = train_filter_on_clean(pairs, lex, fp_swap, to).model;
        std::cout << "trained filter on " << pairs.size() << " pairs\n";
      }
      if (!fp_model_out.empty()) emit(fp_model_out, model.to_json() + "\n");
      const auto d = filter_parallel(pairs, model, lex, fp_threshold, worker_count(opt));
      std::vector<SentencePair> kept, removed;
      for (std::size_t i : d.kept) kept.push_back(pairs[i]);
      for (std::size_t i : d.removed) removed.push_back(pairs[i]);
      std::ostringstream out;
      write_parallel_tsv(kept, out);
      emit(fp_out, out.str());
      if (!fp_removed.empty()) {
        std::ostringstream rem;
        write_parallel_tsv(removed, rem);
        emit(fp_removed, rem.str());
      }
      std::cout << "kept " << kept.size() << ", removed " << removed.size() << "\n";
    };
  });

  // realign -----------------------------------------------------------------
  std::string ra_input, ra_out;
  AlignmentCosts ra_costs;
  auto* realign = app.add_subcommand("realign", "Re-align document segments by length");
  realign->add_option("--input", ra_input, "JSONL {doc_id, src: [..], tgt: [..]}")->required()->check(CLI::ExistingFile);
  realign->add_option("--skip-cost", ra_costs.skip)->capture_default_str();
  realign->add_option("--merge-cost", ra_costs.merge)->capture_default_str();
  realign->add_option("-o,--out", ra_out)->required();
  realign->callback([&] {
    action = [&] {
      auto in = open_in(ra_input);
      const auto pairs = realign_documents(read_parallel_docs_jsonl(in), ra_costs);
      std::ostringstream out;
      write_parallel_tsv(pairs, out);
      emit(ra_out, out.str());
    };
  });

  // augment-entities ----------------------------------------------------------
  std::string ae_input, ae_lex, ae_out;
  std::size_t ae_copies = 1;
  std::uint64_t ae_seed = 1;
  auto* augment = app.add_subcommand("augment-entities", "Add copies with entity pairs swapped in");
  augment->add_option("--input", ae_input)->required()->check(CLI::ExistingFile);
  augment->add_option("--entity-lexicon", ae_lex)->required()->check(CLI::ExistingFile);
  augment->add_option("--copies", ae_copies)->capture_default_str();
  augment->add_option("--seed", ae_seed)->capture_default_str();
  augment->add_option("-o,--out", ae_out)->required();
  augment->callback([&] {
    action = [&] {
      const auto pairs = load_pairs(ae_input);
      const Lexicon elex = load_lexicon(ae_lex);
      const auto spans = find_entity_spans(pairs, elex);
      const auto aug = augment_with_entities(pairs, spans, elex, ae_copies, ae_seed);
      std::ostringstream out;
      write_parallel_tsv(aug, out);
      emit(ae_out, out.str());
    };
  });

  // dnt -----------------------------------------------------------------------
  std::string dnt_input, dnt_slots, dnt_out;
  auto* dnt = app.add_subcommand("dnt", "Do-not-translate masking");
  dnt->require_subcommand(1);
  auto* dnt_tag_cmd = dnt->add_subcommand("tag", "Mask URLs, emails, mentions and hashtags");
  dnt_tag_cmd->add_option("--input", dnt_input, "One segment per line")->required()->check(CLI::ExistingFile);
  dnt_tag_cmd->add_option("--slots", dnt_slots, "JSONL placeholder table to write")->required();
  dnt_tag_cmd->add_option("-o,--out", dnt_out)->required();
  dnt_tag_cmd->callback([&] {
    action = [&] {
      std::ostringstream out, slots;
      for (const auto& line : lines_of(dnt_input)) {
        std::vector<std::string> toks;
        for (auto& t : tokenize(line)) toks.push_back(std::move(t.surface));
        const auto m = dnt_tag(toks);
        out << join(m.masked, " ") << '\n';
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& ph : m.order) j[ph] = m.slots.at(ph);
        slots << j.dump() << '\n';
      }
      emit(dnt_out, out.str());
      emit(dnt_slots, slots.str());
    };
  });
  auto* dnt_restore_cmd = dnt->add_subcommand("restore", "Put masked tokens back");
  dnt_restore_cmd->add_option("--input", dnt_input, "Translated segments, one per line")->required()->check(CLI::ExistingFile);
  dnt_restore_cmd->add_option("--slots", dnt_slots)->required()->check(CLI::ExistingFile);
  dnt_restore_cmd->add_option("-o,--out", dnt_out)->required();
  dnt_restore_cmd->callback([&] {
    action = [&] {
      const auto text = lines_of(dnt_input);
      const auto slot_lines = lines_of(dnt_slots);
      if (text.size() != slot_lines.size())
        throw InvalidArgument("input and slots differ in line count");
      std::ostringstream out;
      std::size_t missing = 0;
      for (std::size_t i = 0; i < text.size(); ++i) {
        DntMask mask;
        for (const auto& [ph, orig] : nlohmann::ordered_json::parse(slot_lines[i]).items()) {
          mask.order.push_back(ph);
          mask.slots[ph] = orig.get<std::string>();
        }
        const auto r = dnt_restore(split_whitespace(text[i]), mask);
        missing += r.missing.size();
        out << join(r.tokens, " ") << '\n';
      }
      emit(dnt_out, out.str());
      if (missing) std::cout << missing << " placeholders were missing and appended\n";
    };
  });

  // ni-phrases ----------------------------------------------------------------
  std::string ni_mono, ni_bi, ni_out;
  std::size_t ni_n = 4, ni_top = 100;
  auto* ni = app.add_subcommand("ni-phrases", "Frequent phrases missing from the bilingual data");
  ni->add_option("--mono", ni_mono, "Monolingual corpus JSONL")->required()->check(CLI::ExistingFile);
  ni->add_option("--bilingual", ni_bi, "Parallel TSV")->required()->check(CLI::ExistingFile);
  ni->add_option("--n-max", ni_n)->capture_default_str();
  ni->add_option("--top", ni_top)->capture_default_str();
  ni->add_option("-o,--out", ni_out)->required();
  ni->callback([&] {
    action = [&] {
      const auto mono = sentence_tokens(load_corpus(ni_mono));
      std::vector<std::vector<std::string>> bi;
      for (auto& p : load_pairs(ni_bi)) bi.push_back(std::move(p.src));
      std::ostringstream out;
      for (const auto& p : select_ni_phrases(mono, bi, ni_n, ni_top))
        out << join(p.phrase, " ") << '\t' << p.frequency << '\n';
      emit(ni_out, out.str());
    };
  });

  // tag -----------------------------------------------------------------------
  std::string tg_corpus, tg_gaz, tg_neg, tg_out;
  std::optional<std::size_t> tg_edit;
  std::size_t tg_window = 5;
  bool tg_doc = false, tg_unk = false;
  auto* tag = app.add_subcommand("tag", "Gazetteer label propagation to CoNLL");
  tag->add_option("--corpus", tg_corpus)->required()->check(CLI::ExistingFile);
  tag->add_option("--gazetteer", tg_gaz)->required()->check(CLI::ExistingFile);
  tag->add_option("--negatives", tg_neg)->check(CLI::ExistingFile);
  tag->add_option("--window", tg_window)->capture_default_str();
  tag->add_option("--edit-propagate", tg_edit, "Propagate to words within this edit distance (strict)");
  tag->add_flag("--doc-propagate", tg_doc);
  tag->add_flag("--unk", tg_unk, "Mark untagged capitalized tokens UNK in a third column");
  tag->add_option("-o,--out", tg_out)->required();
  tag->callback([&] {
    action = [&] {
      const Corpus corpus = load_corpus(tg_corpus);
      const Gazetteer gaz = load_gazetteer(tg_gaz, tg_neg);
      TaggedCorpus tagged = tag_corpus(corpus, gaz, tg_window, worker_count(opt));
      if (tg_edit) {
        std::set<std::string> vocab;
        for (const auto& d : tagged)
          for (const auto& s : d.segments)
            for (std::size_t i = 0; i < s.tokens.size(); ++i)
              if (s.tags[i].untagged()) vocab.insert(s.tokens[i]);
        const auto n = apply_edit_propagation(tagged, propagate_edit_distance(vocab, gaz, *tg_edit));
        std::cout << "edit propagation tagged " << n << " tokens\n";
      }
      if (tg_doc) tagged = propagate_documents(tagged);
      if (tg_unk)
        for (auto& d : tagged)
          for (auto& s : d.segments) s.tags = mark_unknown_capitalized(s.tags, s.tokens, gaz.negatives());
      std::ostringstream out;
      write_conll(tagged, out, tg_unk);
      emit(tg_out, out.str());
    };
  });

  // link ----------------------------------------------------------------------
  std::string lk_corpus, lk_kb, lk_gaz, lk_out;
  std::vector<std::string> lk_lex, lk_incident, lk_neighbors;
  LinkOptions lk_opts;
  std::int64_t lk_floor = 50000;
  auto* link = app.add_subcommand("link", "Tag, link to the KB and cluster NIL mentions");
  link->add_option("--corpus", lk_corpus)->required()->check(CLI::ExistingFile);
  link->add_option("--kb", lk_kb)->required()->check(CLI::ExistingFile);
  link->add_option("--lexicon", lk_lex, "Repeatable")->check(CLI::ExistingFile);
  link->add_option("--gazetteer", lk_gaz, "Tag mentions with a gazetteer (default: KB names)")->check(CLI::ExistingFile);
  link->add_option("--threshold", lk_opts.threshold)->capture_default_str();
  link->add_option("--incident-country", lk_incident)->delimiter(',');
  link->add_option("--neighbors", lk_neighbors)->delimiter(',');
  link->add_option("--population-floor", lk_floor)->capture_default_str();
  link->add_option("-o,--out", lk_out)->required();
  link->callback([&] {
    action = [&] {
      const Corpus corpus = load_corpus(lk_corpus);
      const auto kb = prune_kb(load_kb(lk_kb), {lk_incident.begin(), lk_incident.end()},
                               {lk_neighbors.begin(), lk_neighbors.end()}, lk_floor);
      TaggedCorpus tagged;
      if (!lk_gaz.empty()) {
        tagged = tag_corpus(corpus, load_gazetteer(lk_gaz), 5, worker_count(opt));
      } else {
        const auto index = KbNameIndex::build(kb_names(kb));
        for (const auto& d : corpus) {
          TaggedDocument td{d.doc_id, {}};
          for (const auto& s : d.segments) {
            TaggedSegment ts{s.surfaces(), {}};
            ts.tags = kb_exact_match(ts.tokens, index, {});
            td.segments.push_back(std::move(ts));
          }
          tagged.push_back(std::move(td));
        }
      }
      const auto mentions = collect_mentions(tagged, corpus);
      std::vector<Lexicon> lexicons;
      for (const auto& p : lk_lex) lexicons.push_back(load_sorted_lexicon(p));
      const KbIndex index(kb);
      auto results = link_mentions(mentions, index, lexicons, lk_opts, worker_count(opt));
      cluster_nil(results, mentions);
      std::ostringstream out;
      write_edl_tsv(results, mentions, out);
      emit(lk_out, out.str());
      std::cout << mentions.size() << " mentions\n";
    };
  });

  // sf ------------------------------------------------------------------------
  auto* sf = app.add_subcommand("sf", "Situation frames");
  sf->require_subcommand(1);
  std::string bk_labeled, bk_neighbors, bk_affinity, bk_out;
  double bk_th1 = 0.8, bk_cos = 0.70;
  std::size_t bk_top = 100, bk_nn = 30;
  auto* build_kw = sf->add_subcommand("build-keywords", "Induce keywords from labeled documents");
  build_kw->add_option("--labeled", bk_labeled, "JSONL {type, tokens|text}")->required()->check(CLI::ExistingFile);
  build_kw->add_option("--affinity", bk_affinity)->required()->check(CLI::ExistingFile);
  build_kw->add_option("--neighbors", bk_neighbors)->check(CLI::ExistingFile);
  build_kw->add_option("--th1", bk_th1)->capture_default_str();
  build_kw->add_option("--top-n", bk_top)->capture_default_str();
  build_kw->add_option("--max-neighbors", bk_nn)->capture_default_str();
  build_kw->add_option("--min-cosine", bk_cos)->capture_default_str();
  build_kw->add_option("-o,--out", bk_out)->required();
  build_kw->callback([&] {
    action = [&] {
      auto lin = open_in(bk_labeled);
      const auto cands = candidate_keywords(read_labeled_docs_jsonl(lin), bk_top);
      EmbeddingNeighbors nb;
      if (!bk_neighbors.empty()) {
        auto nin = open_in(bk_neighbors);
        nb = read_neighbors_tsv(nin);
      }
      auto ain = open_in(bk_affinity);
      const auto kws = filter_by_affinity(expand_keywords(cands, nb, bk_nn, bk_cos),
                                          read_affinity_tsv(ain), bk_th1);
      std::ostringstream out;
      write_keywords_tsv(kws, out);
      emit(bk_out, out.str());
    };
  });

  std::string st_corpus, st_keywords, st_lemmas, st_ipa, st_gaz, st_urgency, st_out;
  std::optional<double> st_lambda;
  bool st_topk = false;
  std::size_t st_cap = 3, st_top_t = 2;
  std::string st_window = "1";
  auto* sf_tag = sf->add_subcommand("tag", "Tag sentences and emit frames");
  sf_tag->add_option("--corpus", st_corpus)->required()->check(CLI::ExistingFile);
  sf_tag->add_option("--keywords", st_keywords)->required()->check(CLI::ExistingFile);
  sf_tag->add_option("--lemmas", st_lemmas)->check(CLI::ExistingFile);
  sf_tag->add_option("--ipa", st_ipa, "Match in IPA space using this backoff chain");
  sf_tag->add_option("--lambda", st_lambda, "Mean-std filter only");
  sf_tag->add_flag("--topk", st_topk, "Top-k per document filter only");
  sf_tag->add_option("--k-cap", st_cap)->capture_default_str();
  sf_tag->add_option("--top-t", st_top_t)->capture_default_str();
  sf_tag->add_option("--gazetteer", st_gaz, "Locations from GPE/LOC gazetteer hits")->check(CLI::ExistingFile);
  sf_tag->add_option("--location-window", st_window, "Segments, or inf")->capture_default_str();
  sf_tag->add_option("--urgency", st_urgency)->check(CLI::ExistingFile);
  sf_tag->add_option("-o,--out", st_out)->required();
  sf_tag->callback([&] {
    action = [&] {
      Corpus corpus = load_corpus(st_corpus);
      auto kin = open_in(st_keywords);
      auto keywords = read_keywords_tsv(kin);
      const Corpus original = corpus;
      if (!st_ipa.empty()) {
        const auto chain = load_chain(opt.g2p_dir, st_ipa);
        corpus = to_ipa(corpus, chain);
        for (auto& k : keywords) k.keyword = g2p_backoff(k.keyword, chain);
      }
      LemmaMap lemmas;
      if (!st_lemmas.empty()) {
        auto lin = open_in(st_lemmas);
        lemmas = read_lemmas_tsv(lin);
      }
      auto preds = tag_sentences(corpus, keywords, st_lemmas.empty() ? nullptr : &lemmas,
                                 st_top_t, worker_count(opt));
      const bool use_lambda = !st_topk || st_lambda.has_value();
      const bool use_topk = st_topk || !st_lambda.has_value();
      if (use_lambda) preds = filter_mean_std(preds, st_lambda.value_or(-1.5));
      if (use_topk) {
        std::map<std::string, std::size_t> sentences;
        for (const auto& d : corpus) sentences[d.doc_id] = d.segments.size();
        preds = filter_topk_per_doc(preds, sentences, st_cap);
      }
      std::map<std::string, std::vector<LocationMention>> locations;
      if (!st_gaz.empty()) {
        const Gazetteer gaz = load_gazetteer(st_gaz);
        const auto tagged = tag_corpus(original, gaz, 5, worker_count(opt));
        std::vector<Mention> mentions;
        for (auto& m : collect_mentions(tagged, original))
          if (m.type == EntityType::kGPE || m.type == EntityType::kLOC) mentions.push_back(std::move(m));
        std::vector<LinkResult> results(mentions.size());
        for (std::size_t i = 0; i < mentions.size(); ++i) {
          results[i].mention = i;
          if (const GazEntry* e = gaz.lookup(mentions[i].tokens); e && e->kb_id) {
            results[i].kb_id = *e->kb_id;
            results[i].method = LinkMethod::kExact;
          }
        }
        cluster_nil(results, mentions);
        for (std::size_t i = 0; i < mentions.size(); ++i)
          locations[mentions[i].doc_id].push_back({mentions[i].seg_id, mentions[i].begin, results[i].kb_id});
      }
      std::size_t window = kUnboundedWindow;
      if (st_window != "inf") window = std::stoul(st_window);
      const auto places = assign_locations(preds, locations, window);
      UrgencyLabels urgency;
      if (!st_urgency.empty()) {
        auto uin = open_in(st_urgency);
        urgency = read_urgency_tsv(uin);
      }
      const auto frames = finalize_frames(preds, places, st_urgency.empty() ? nullptr : &urgency);
      std::ostringstream out;
      write_frames_jsonl(frames, out);
      emit(st_out, out.str());
      std::cout << frames.size() << " frames\n";
    };
  });

  // al ------------------------------------------------------------------------
  auto* al = app.add_subcommand("al", "Active-learning selection");
  al->require_subcommand(1);
  std::string al_marginals, al_corpus, al_ratio, al_out;
  std::size_t al_budget = 0;
  SpanSelectOptions al_opts;
  auto* al_select = al->add_subcommand("select", "Highest-entropy sub-spans");
  al_select->add_option("--marginals", al_marginals)->required()->check(CLI::ExistingFile);
  al_select->add_option("--budget", al_budget)->required();
  al_select->add_option("--max-span-len", al_opts.max_span_len)->capture_default_str();
  al_select->add_option("--max-per-sentence", al_opts.max_per_sentence)->capture_default_str();
  al_select->add_option("-o,--out", al_out)->required();
  al_select->callback([&] {
    action = [&] {
      auto in = open_in(al_marginals);
      const auto sents = read_marginals_jsonl(in);
      const auto spans = select_uncertain_spans(sents, al_budget, al_opts, worker_count(opt));
      std::ostringstream out;
      write_spans_tsv(spans, out);
      emit(al_out, out.str());
    };
  });
  auto* al_fallback = al->add_subcommand("fallback", "Top-5 TF-IDF sentences under a genre ratio");
  al_fallback->add_option("--corpus", al_corpus)->required()->check(CLI::ExistingFile);
  al_fallback->add_option("--budget", al_budget)->required();
  al_fallback->add_option("--genre-ratio", al_ratio);
  al_fallback->add_option("-o,--out", al_out)->required();
  al_fallback->callback([&] {
    action = [&] {
      const Corpus corpus = load_corpus(al_corpus);
      const auto sentences = sentence_tokens(corpus);
      std::map<Genre, std::size_t> counts;
      for (const auto& d : corpus) counts[d.genre] += d.segments.size();
      const GenreRatio ratio = al_ratio.empty() ? GenreRatio::from_counts(counts) : GenreRatio::parse(al_ratio);
      std::ostringstream out;
      for (const auto& r : fallback_rank_sentences(corpus, DfTable::build(sentences), ratio, al_budget))
        out << corpus[r.doc].doc_id << ':' << corpus[r.doc].segments[r.seg].seg_id << '\n';
      emit(al_out, out.str());
    };
  });

  // ipa -----------------------------------------------------------------------
  std::string ipa_chain, ipa_input, ipa_out, ipa_roman_table;
  bool ipa_roman = false;
  auto* ipa = app.add_subcommand("ipa", "Rule-table transliteration with backoff");
  ipa->add_option("--chain", ipa_chain, "Comma-separated table ids or CSV paths")->required();
  ipa->add_option("--tables-dir", opt.g2p_dir)->capture_default_str();
  ipa->add_flag("--roman", ipa_roman, "Re-romanize the IPA output");
  ipa->add_option("--roman-table", ipa_roman_table, "Default: ipa-roman");
  ipa->add_option("--input", ipa_input, "Token-per-line text or a .jsonl corpus")->required()->check(CLI::ExistingFile);
  ipa->add_option("-o,--out", ipa_out)->required();
  ipa->callback([&] {
    action = [&] {
      const auto chain = load_chain(opt.g2p_dir, ipa_chain);
      std::optional<RuleTable> roman;
      if (ipa_roman || !ipa_roman_table.empty())
        roman = load_rule_table(g2p_table_path(opt.g2p_dir, ipa_roman_table.empty() ? "ipa-roman" : ipa_roman_table));
      auto convert = [&](const std::string& tok) {
        std::string s = g2p_backoff(tok, chain);
        return roman ? reromanize(s, *roman) : s;
      };
      std::ostringstream out;
      if (fs::path(ipa_input).extension() == ".jsonl") {
        Corpus corpus = load_corpus(ipa_input);
        for (auto& d : corpus)
          for (auto& s : d.segments) {
            std::vector<std::string> toks;
            for (const auto& t : s.tokens) toks.push_back(convert(t.surface));
            s.raw = join(toks, " ");
          }
        write_corpus_jsonl(corpus, out);
      } else {
        for (const auto& line : lines_of(ipa_input)) out << convert(line) << '\n';
      }
      emit(ipa_out, out.str());
    };
  });

  // run -----------------------------------------------------------------------
  std::string run_recipe_name, run_config, run_out;
  auto* run = app.add_subcommand("run", "Run a pipeline recipe from a config file");
  run->add_option("recipe", run_recipe_name, "ner-data | edl | mt-data | sf")->required();
  run->add_option("--config", run_config)->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", run_out, "Output directory (default: config output_dir)");
  run->callback([&] {
    action = [&] {
      PipelineConfig cfg = PipelineConfig::load(run_config);
      if (!cfg.recipe.empty() && cfg.recipe != run_recipe_name)
        throw ConfigError("recipe: config is for " + cfg.recipe + ", not " + run_recipe_name);
      cfg.recipe = run_recipe_name;
      const std::string out = run_out.empty() ? cfg.resolve(cfg.output_dir) : run_out;
      const auto summary = run_recipe(cfg, out, worker_count(opt), std::cout);
      for (const auto& [k, v] : summary.counts) std::cout << "  " << k << " = " << v << "\n";
    };
  });

  // validate ------------------------------------------------------------------
  std::string val_schema, val_input;
  auto* validate = app.add_subcommand("validate", "Check an output file against its schema");
  validate->add_option("--schema", val_schema, "conll | edl-tsv | frames-jsonl")->required()
      ->check(CLI::IsMember({"conll", "edl-tsv", "frames-jsonl"}));
  validate->add_option("--input", val_input)->required()->check(CLI::ExistingFile);
  validate->callback([&] {
    action = [&] {
      const auto report = validate_file(val_input, *parse_output_schema(val_schema));
      for (const auto& v : report.violations)
        std::cout << val_input << ":" << v.line << ": " << v.message << "\n";
      report.throw_if_invalid();
      std::cout << "OK: " << report.records << " records\n";
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  try {
    if (action) action();
    return 0;
  } catch (const ConfigError& e) {
    std::cout << "error: " << e.what() << "\n";
    return 1;
  } catch (const SchemaViolation& e) {
    std::cout << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << "\n";
    return 2;
  }
}
