// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lowres/active_selection.h"
#include "lowres/config.h"
#include "lowres/corpus.h"
#include "lowres/filter_model.h"
#include "lowres/gazetteer.h"
#include "lowres/lexicon.h"
#include "lowres/linking.h"
#include "lowres/parallel_corpus.h"
#include "lowres/pipeline.h"
#include "lowres/relevance.h"
#include "lowres/rng.h"
#include "lowres/situation_frames.h"
#include "lowres/text_util.h"
#include "lowres/transliterate.h"
#include "lowres/unicode.h"
#include "oracles.h"

namespace fs = std::filesystem;
using namespace lowres;

namespace {

const std::string kSource = LOWRES_SOURCE_DIR;
const std::string kWork = LOWRES_WORK_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Outcome fail(std::string why) { return {false, std::move(why)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fixture(const std::string& rel) { return kSource + "/data/fixtures/" + rel; }

std::string word(std::size_t i) { return "w" + std::to_string(i); }

// ---------------------------------------------------------------------------

Outcome tfidf_oracle() {
  SplitMix64 rng(101);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.uniform(100), vocab = 1 + rng.uniform(50);
    oracle::Sentences sents(n);
    for (auto& s : sents) {
      const std::size_t len = rng.uniform(16);
      for (std::size_t k = 0; k < len; ++k) s.push_back(word(rng.uniform(vocab)));
    }
    std::vector<QueryTerm> query;
    std::vector<std::pair<std::string, double>> q_oracle;
    std::set<std::size_t> used;
    const std::size_t nq = 1 + rng.uniform(8);
    for (std::size_t k = 0; k < nq; ++k) {
      const std::size_t w = rng.uniform(vocab + 5);  // a few terms outside the corpus
      if (!used.insert(w).second) continue;
      const double f = 1.0 + static_cast<double>(rng.uniform(4));
      query.push_back({word(w), f});
      q_oracle.emplace_back(word(w), f);
    }
    const auto table = DfTable::build(sents);
    const auto got = rank_by_relevance(sents, query, table);
    const auto want = oracle::dense_rank(sents, q_oracle);
    if (got.size() != want.size()) return fail("trial " + std::to_string(trial) + ": size");
    for (std::size_t i = 0; i < got.size(); ++i) {
      if (got[i].index != want[i].index)
        return fail("trial " + std::to_string(trial) + ": order differs at rank " +
                    std::to_string(i));
      worst = std::max(worst, std::abs(got[i].score - want[i].score));
    }
  }
  const double secs = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "200 corpora, max |score diff| %.3g, %.2f s", worst, secs);
  if (worst >= 1e-12) return fail(buf);
  if (secs >= 5.0) return fail(buf);
  return {true, buf};
}

std::string ranking_bytes(const std::vector<RankedSentence>& r) {
  std::string out;
  char buf[64];
  for (const auto& x : r) {
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\n", x.index, x.score);
    out += buf;
  }
  return out;
}

Outcome throughput() {
  SplitMix64 rng(202);
  const std::size_t n = 100000, vocab = 20000;
  oracle::Sentences sents(n);
  std::size_t total_tokens = 0;
  for (auto& s : sents) {
    const std::size_t len = 8 + rng.uniform(15);  // mean 15
    for (std::size_t k = 0; k < len; ++k) {
      // Skewed draw: the product of two uniforms favours small ids.
      const std::size_t id = rng.uniform(1 + rng.uniform(vocab));
      s.push_back(word(id));
    }
    total_tokens += len;
  }
  std::vector<QueryTerm> query;
  for (std::size_t k = 0; k < 50; ++k) query.push_back({word(k * 37 % 2000), 1.0 + double(k % 3)});

  const auto t0 = std::chrono::steady_clock::now();
  const auto table = DfTable::build(sents);
  const auto serial = rank_by_relevance(sents, query, table, 1);
  const double secs = seconds_since(t0);
  const auto parallel = rank_by_relevance(sents, query, table, 4);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu sentences, %.1f tokens avg, %.2f s single-threaded", n,
                double(total_tokens) / double(n), secs);
  if (secs >= 10.0) return fail(buf);
  if (ranking_bytes(serial) != ranking_bytes(parallel))
    return fail(std::string(buf) + "; parallel output differs");
  return {true, std::string(buf) + "; 4-thread output byte-identical"};
}

// ---------------------------------------------------------------------------

struct SyntheticBitext {
  std::vector<SentencePair> pairs;
  Lexicon lexicon;
};

// Target words are a fixed substitution of source words; ~10% of source
// words have no lexicon entry and are copied through.
SyntheticBitext make_bitext(std::size_t n, std::uint64_t seed) {
  SyntheticBitext b;
  const std::size_t vocab = 400;
  for (std::size_t w = 0; w < vocab; ++w)
    if (w % 10 != 7) b.lexicon.add("s" + std::to_string(w), "t" + std::to_string(w));
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    SentencePair p;
    const std::size_t len = 4 + rng.uniform(20);
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t w = rng.uniform(vocab);
      p.src.push_back("s" + std::to_string(w));
      p.tgt.push_back(w % 10 == 7 ? p.src.back() : "t" + std::to_string(w));
    }
    p.origin_doc = "D" + std::to_string(i / 10);
    p.index = i;
    b.pairs.push_back(std::move(p));
  }
  return b;
}

Outcome filter_efficacy() {
  const auto bitext = make_bitext(1000, 303);
  TrainOptions opts;
  opts.seed = 11;
  const auto report = train_filter_on_clean(bitext.pairs, bitext.lexicon, 0.1, opts);

  const auto test = make_noisy_training(bitext.pairs, 0.1, 9999);
  std::vector<SentencePair> pairs;
  for (const auto& lp : test) pairs.push_back(lp.pair);
  const auto decision = filter_parallel(pairs, report.model, bitext.lexicon, 0.5);
  std::set<std::size_t> removed(decision.removed.begin(), decision.removed.end());
  std::size_t swapped = 0, swapped_removed = 0, clean = 0, clean_removed = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (test[i].label == 0) {
      ++swapped;
      swapped_removed += removed.count(i);
    } else {
      ++clean;
      clean_removed += removed.count(i);
    }
  }
  const double recall = double(swapped_removed) / double(swapped);
  const double false_rate = double(clean_removed) / double(clean);

  // Gradient check on the training objective of the same features.
  const auto inverse = bitext.lexicon.inverted();
  std::vector<LabeledFeatures> data;
  for (const auto& lp : make_noisy_training(bitext.pairs, 0.1, 5))
    data.push_back({pair_features(lp.pair, bitext.lexicon, inverse), lp.label});
  const std::size_t dim = kNumPairFeatures;
  LogisticObjective obj(data, dim, 1e-3);
  SplitMix64 rng(404);
  double worst_rel = 0.0;
  const double h = 1e-5;
  for (int point = 0; point < 100; ++point) {
    std::vector<double> w(dim);
    for (auto& x : w) x = 4.0 * rng.uniform_real() - 2.0;
    double b = 4.0 * rng.uniform_real() - 2.0;
    std::vector<double> gw;
    double gb = 0.0;
    obj.gradient(w, b, {}, gw, gb);
    std::vector<double> num(dim + 1), ana(gw);
    ana.push_back(gb);
    for (std::size_t k = 0; k <= dim; ++k) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (k < dim) {
        wp[k] += h;
        wm[k] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      num[k] = (obj.loss(wp, bp) - obj.loss(wm, bm)) / (2.0 * h);
    }
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k <= dim; ++k) {
      diff += (num[k] - ana[k]) * (num[k] - ana[k]);
      scale += num[k] * num[k] + ana[k] * ana[k];
    }
    const double rel = std::sqrt(diff) / std::max(std::sqrt(scale), 1e-12);
    worst_rel = std::max(worst_rel, rel);
  }

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "swapped removed %zu/%zu (%.1f%%), clean removed %zu/%zu (%.1f%%), "
                "max gradient rel err %.2g",
                swapped_removed, swapped, 100 * recall, clean_removed, clean, 100 * false_rate,
                worst_rel);
  const bool ok = swapped > 0 && recall >= 0.8 && false_rate <= 0.1 && worst_rel <= 1e-5;
  return {ok, buf};
}

// ---------------------------------------------------------------------------

Outcome propagation_oracle() {
  SplitMix64 rng(505);
  const std::vector<std::string> pool = {"alpha", "beta", "gamma", "delta", "eps",  "zeta",
                                         "eta",   "theta", "iota", "kappa", "lam",  "mu"};
  auto token = [&](bool allow_caps) {
    std::string t = pool[rng.uniform(pool.size())];
    if (allow_caps && rng.uniform(3) == 0) t[0] = static_cast<char>(std::toupper(t[0]));
    return t;
  };
  std::size_t spans_seen = 0;
  TaggedCorpus corpus;
  for (int inst = 0; inst < 500; ++inst) {
    std::map<std::string, EntityType> keys;
    std::vector<RawGazEntry> raw;
    const std::size_t n_keys = 1 + rng.uniform(20);
    for (std::size_t k = 0; k < n_keys; ++k) {
      const std::size_t len = 1 + rng.uniform(3);
      std::string key;
      for (std::size_t j = 0; j < len; ++j) key += (j ? " " : "") + token(false);
      if (keys.count(key)) continue;
      const EntityType type = kAllEntityTypes[rng.uniform(4)];
      keys[key] = type;
      raw.push_back({key, type, std::nullopt});
    }
    std::set<std::string> negatives;
    if (rng.uniform(2)) negatives.insert(pool[rng.uniform(pool.size())]);
    auto gaz = normalize_gazetteer(raw);
    gaz.set_negatives(negatives);
    for (const auto& neg : negatives) keys.erase(neg);

    std::vector<std::string> sent;
    const std::size_t len = rng.uniform(13);
    for (std::size_t j = 0; j < len; ++j) sent.push_back(token(true));

    const auto tags = propagate_gazetteer(sent, gaz, 5);
    TagSequence want(sent.size(), Tag::O());
    for (const auto& s : oracle::brute_force_spans(sent, keys, negatives, 5)) {
      want[s.begin] = Tag::B(s.type);
      for (std::size_t j = s.begin + 1; j < s.end; ++j) want[j] = Tag::I(s.type);
      ++spans_seen;
    }
    if (tags != want) return fail("instance " + std::to_string(inst) + " differs from oracle");
    if (!is_valid_bio(tags)) return fail("instance " + std::to_string(inst) + " not BIO-valid");

    if (corpus.empty() || rng.uniform(4) == 0)
      corpus.push_back({"D" + std::to_string(corpus.size()), {}});
    corpus.back().segments.push_back({sent, tags});
  }
  const auto once = propagate_documents(corpus);
  const auto twice = propagate_documents(once);
  for (std::size_t d = 0; d < once.size(); ++d)
    for (std::size_t s = 0; s < once[d].segments.size(); ++s) {
      if (once[d].segments[s].tags != twice[d].segments[s].tags)
        return fail("document propagation not idempotent in " + once[d].doc_id);
      if (!is_valid_bio(once[d].segments[s].tags))
        return fail("document propagation broke BIO in " + once[d].doc_id);
    }
  return {true, "500 instances match (" + std::to_string(spans_seen) + " spans), " +
                    std::to_string(corpus.size()) + " documents idempotent"};
}

// ---------------------------------------------------------------------------

Outcome capitalization() {
  // (c, n, ratio) worked out by hand.
  struct Row {
    std::size_t c, n;
    double ratio;
  };
  const Row table[] = {{0, 0, 0.5},    {1, 1, 0.75},   {0, 1, 0.25},   {2, 3, 0.625},
                       {3, 3, 0.875},  {0, 3, 0.125},  {5, 9, 0.55},   {9, 9, 0.95},
                       {0, 9, 0.05},   {1, 4, 0.3},    {4, 4, 0.9},    {2, 4, 0.5},
                       {7, 19, 0.375}, {19, 19, 0.975}, {0, 19, 0.025}, {10, 19, 0.525},
                       {1, 7, 0.1875}, {6, 7, 0.8125}, {49, 99, 0.495}, {99, 99, 0.995}};
  for (const auto& r : table) {
    const double direct = CapStats::ratio(CapCount{r.c, r.n});
    // Same counts observed through a corpus.
    std::vector<std::vector<std::string>> sents(1);
    for (std::size_t i = 0; i < r.n; ++i) sents[0].push_back(i < r.c ? "Word" : "word");
    const double counted = CapStats::from_sentences(sents).ratio("word");
    char buf[96];
    std::snprintf(buf, sizeof buf, "(c=%zu, n=%zu): got %.17g / %.17g, want %.17g", r.c, r.n,
                  direct, counted, r.ratio);
    if (std::abs(direct - r.ratio) > 1e-12 || std::abs(counted - r.ratio) > 1e-12) return fail(buf);
    if (!(direct > 0.0 && direct < 1.0)) return fail(std::string(buf) + " outside (0,1)");
  }
  return {true, "20 hand-computed (c,n) pairs reproduced, all in (0,1)"};
}

// ---------------------------------------------------------------------------

// Depth-first walk over every string over {a,b,c} of length <= 8, carrying
// the edit-distance row of the current prefix against a fixed string.
void walk_rows(const std::u32string& a, std::u32string& b, std::vector<std::size_t>& rows,
               const std::function<void(const std::u32string&, std::size_t)>& visit) {
  const std::size_t w = a.size() + 1;
  visit(b, rows[b.size() * w + a.size()]);
  if (b.size() == 8) return;
  for (char32_t c : {U'a', U'b', U'c'}) {
    b.push_back(c);
    const std::size_t r = b.size();
    rows[r * w] = r;
    for (std::size_t i = 1; i < w; ++i) {
      const std::size_t sub = rows[(r - 1) * w + i - 1] + (a[i - 1] == c ? 0 : 1);
      rows[r * w + i] = std::min({rows[(r - 1) * w + i] + 1, rows[r * w + i - 1] + 1, sub});
    }
    walk_rows(a, b, rows, visit);
    b.pop_back();
  }
}

std::vector<std::u32string> all_strings(std::size_t max_len) {
  std::vector<std::u32string> out = {U""};
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i].size() < max_len)
      for (char32_t c : {U'a', U'b', U'c'}) out.push_back(out[i] + c);
  return out;
}

Outcome edit_distance() {
  // Anchor the row oracle to the plain recursion on short strings.
  const auto short_strings = all_strings(4);
  for (const auto& a : short_strings)
    for (const auto& b : short_strings) {
      const std::string sa(a.begin(), a.end()), sb(b.begin(), b.end());
      if (levenshtein(a, b) != oracle::naive_levenshtein(sa, sb) ||
          levenshtein(std::string_view(sa), std::string_view(sb)) !=
              oracle::naive_levenshtein(sa, sb))
        return fail("mismatch with recursion on " + sa + " / " + sb);
    }

  const auto strings = all_strings(8);
  std::size_t pairs = 0;
  std::string bad;
  std::vector<std::size_t> rows(9 * 9);
  for (const auto& a : strings) {
    for (std::size_t i = 0; i <= a.size(); ++i) rows[i] = i;
    std::u32string b;
    walk_rows(a, b, rows, [&](const std::u32string& s, std::size_t want) {
      ++pairs;
      if (bad.empty() && levenshtein(a, s) != want)
        bad = std::string(a.begin(), a.end()) + " / " + std::string(s.begin(), s.end());
    });
    if (!bad.empty()) return fail("mismatch on " + bad);
  }

  // Threshold semantics: distance 1 propagates, distance 2 does not.
  std::vector<RawGazEntry> raw = {{"kigali", EntityType::kGPE, std::nullopt}};
  const auto gaz = normalize_gazetteer(raw);
  const auto got = propagate_edit_distance({"kigalo", "kigaloo", "kigali"}, gaz);
  if (got.size() != 1 || !got.count("kigalo") || got.at("kigalo") != EntityType::kGPE)
    return fail("min_edit_dist 2 is not a strict bound");
  return {true, std::to_string(pairs) + " pairs exhaustive; default threshold strict"};
}

// ---------------------------------------------------------------------------

Outcome linking() {
  const auto kb = load_kb(fixture("edl/kb.tsv"));
  const std::vector<Lexicon> lexicons = {load_lexicon(fixture("edl/lexicon.tsv"))};
  if (kb.size() != 50) return fail("fixture KB has " + std::to_string(kb.size()) + " entries");
  const KbIndex index(kb);

  std::vector<std::string> vocab;
  for (const auto& e : kb)
    for (const auto& t : split_whitespace(e.name)) vocab.push_back(t);
  for (const auto& [src, tr] : lexicons[0].entries()) vocab.push_back(src);
  vocab.insert(vocab.end(), {"zzz", "River", "north"});

  SplitMix64 rng(707);
  std::size_t linked = 0;
  for (int i = 0; i < 200; ++i) {
    Mention m;
    m.doc_id = "D";
    const std::size_t len = 1 + rng.uniform(3);
    for (std::size_t k = 0; k < len; ++k) m.tokens.push_back(vocab[rng.uniform(vocab.size())]);
    m.end = len;
    m.type = kAllEntityTypes[rng.uniform(4)];
    LinkOptions opts;
    const auto got = link_mention(m, 0, index, lexicons, opts);
    const auto want = oracle::brute_force_link(m, kb, lexicons, opts.threshold, opts.k_per_token);
    const std::string got_id = got.is_nil() ? "" : got.kb_id;
    if (got_id != want.kb_id || std::abs(got.score - want.score) > 1e-12)
      return fail("mention '" + m.surface() + "': got '" + got_id + "' want '" + want.kb_id + "'");
    linked += !got.is_nil();
  }

  const std::set<std::string> incident = {"RW"}, neighbours = {"UG", "BI", "CD", "TZ"};
  const auto pruned = prune_kb(kb, incident, neighbours);
  std::set<std::string> kept;
  for (const auto& e : pruned) kept.insert(e.kb_id);
  for (const auto& e : kb) {
    const bool place = e.type == EntityType::kGPE || e.type == EntityType::kLOC;
    if (e.type == EntityType::kGPE && e.population == 50001 && !kept.count(e.kb_id))
      return fail(e.kb_id + " (population 50001) was pruned");
    if (place && e.population == 49999 && !incident.count(e.country_code) &&
        !neighbours.count(e.country_code) && kept.count(e.kb_id))
      return fail(e.kb_id + " (population 49999, out of region) was kept");
  }
  if (!kept.count("KB0015") || kept.count("KB0014"))
    return fail("population floor boundary entries handled wrongly");
  return {true, "200 mentions match brute force (" + std::to_string(linked) +
                    " linked); prune keeps 50001, drops 49999"};
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path().string());
  return out;
}

RunSummary run_fixture(const std::string& config_rel, const fs::path& out_dir, unsigned threads) {
  fs::remove_all(out_dir);
  auto cfg = PipelineConfig::load(fixture(config_rel));
  cfg.validate();
  std::ostringstream log;
  return run_recipe(cfg, out_dir.string(), threads, log);
}

Outcome sf_pipeline() {
  const fs::path a = fs::path(kWork) / "sf_a", b = fs::path(kWork) / "sf_b";
  run_fixture("sf/sf.toml", a, 1);
  run_fixture("sf/sf.toml", b, 1);
  const std::string frames_text = read_file((a / "frames.jsonl").string());
  if (frames_text != read_file((b / "frames.jsonl").string())) return fail("rerun differs");

  const auto corpus = load_corpus(fixture("sf/corpus.jsonl"));
  std::map<std::string, const Document*> docs;
  for (const auto& d : corpus) docs[d.doc_id] = &d;
  std::ifstream kin(a / "keywords.tsv");
  std::map<SfType, std::set<std::string>> keywords;
  for (const auto& k : read_keywords_tsv(kin)) keywords[k.type].insert(unicode::to_lower(k.keyword));

  std::istringstream in(frames_text);
  std::string line;
  std::size_t n = 0;
  std::map<std::string, std::set<std::string>> types_per_doc;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++n;
    const auto j = nlohmann::json::parse(line);
    const std::string doc = j.at("doc_id"), type_s = j.at("type");
    const auto type = parse_sf_type(type_s);
    const int seg = j.at("justification_seg");
    if (!type || !docs.count(doc)) return fail("frame with unknown doc or type: " + line);
    const auto& segs = docs[doc]->segments;
    if (seg < 0 || seg >= static_cast<int>(segs.size())) return fail("bad segment: " + line);
    bool has_kw = false;
    for (const auto& t : segs[seg].surfaces()) has_kw |= keywords[*type].count(unicode::to_lower(t)) > 0;
    if (!has_kw) return fail("(a) justification lacks a " + type_s + " keyword: " + line);
    if (j.at("status") != "current" || j.at("resolution") != "insufficient")
      return fail("(c) status/resolution: " + line);
    types_per_doc[doc].insert(type_s);
  }
  if (n == 0) return fail("no frames produced");
  for (const auto& [doc, types] : types_per_doc) {
    const std::size_t cap = std::min<std::size_t>(3, docs[doc]->segments.size());
    if (types.size() > cap)
      return fail("(b) " + doc + " has " + std::to_string(types.size()) + " types, cap " +
                  std::to_string(cap));
  }
  return {true, std::to_string(n) + " frames over " + std::to_string(types_per_doc.size()) +
                    " documents satisfy (a)-(d)"};
}

// ---------------------------------------------------------------------------

Outcome genre_ratio() {
  SplitMix64 rng(909);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> weights(4);
    std::size_t total = 0;
    while (total == 0) {
      total = 0;
      for (auto& w : weights) total += (w = rng.uniform(11));
    }
    const std::size_t budget = 1 + rng.uniform(200);
    std::map<Genre, double> fractions;
    for (std::size_t g = 0; g < 4; ++g)
      if (weights[g]) fractions[kAllGenres[g]] = double(weights[g]) / double(total);
    const GenreRatio ratio(fractions);

    std::vector<ScoredCandidate> cands;
    for (std::size_t g = 0; g < 4; ++g)
      for (std::size_t k = 0; k < budget; ++k)
        cands.push_back({cands.size(), kAllGenres[g], rng.uniform_real()});
    const auto picked = select_with_genre_ratio(cands, ratio, budget);
    const auto want = oracle::exact_quotas(weights, budget);
    std::vector<std::size_t> got(4, 0);
    for (auto ref : picked) ++got[static_cast<std::size_t>(cands[ref].genre)];
    if (picked.size() != budget || got != want) {
      std::ostringstream os;
      os << "trial " << trial << " budget " << budget << " weights";
      for (auto w : weights) os << ' ' << w;
      os << ": got";
      for (auto x : got) os << ' ' << x;
      os << " want";
      for (auto x : want) os << ' ' << x;
      return fail(os.str());
    }
  }
  return {true, "50 settings match exact largest-remainder quotas"};
}

// ---------------------------------------------------------------------------

bool is_sinhala(char32_t cp) { return cp >= 0x0D80 && cp <= 0x0DFF; }

Outcome g2p() {
  const auto eng = load_rule_table(kSource + "/data/g2p/eng-Latn.csv");
  const auto sin = load_rule_table(kSource + "/data/g2p/sin-Sinh.csv");

  SplitMix64 rng(1010);
  const std::u32string alphabet = U"abcdefghijklmnopqrstuvwxyzABCDEZ019-'";
  for (int i = 0; i < 1000; ++i) {
    std::u32string tok;
    const std::size_t len = 1 + rng.uniform(12);
    for (std::size_t k = 0; k < len; ++k) tok.push_back(alphabet[rng.uniform(alphabet.size())]);
    std::vector<char32_t> cps(tok.begin(), tok.end());
    const std::string s = unicode::encode(cps);
    const std::vector<RuleTable> chain = {eng};
    if (g2p_backoff(s, chain) != g2p_apply(s, eng).output)
      return fail("single-table chain differs on '" + s + "'");
  }

  // Each maximal same-script run goes to the table covering that script.
  const std::vector<std::string> mixed = {"කොok", "okකො", "shipලංකාtown", "අම්මා2mama",
                                          "xයx", "ගම-village", "නුවරeliya", "k"};
  const std::vector<RuleTable> chain = {sin, eng};
  for (const auto& tok : mixed) {
    const auto cps = unicode::decode(tok);
    std::string want;
    for (std::size_t i = 0; i < cps.size();) {
      std::size_t j = i;
      while (j < cps.size() && is_sinhala(cps[j]) == is_sinhala(cps[i])) ++j;
      const std::string run = unicode::encode(std::vector<char32_t>(cps.begin() + i, cps.begin() + j));
      want += g2p_apply(run, is_sinhala(cps[i]) ? sin : eng).output;
      i = j;
    }
    if (g2p_backoff(tok, chain) != want) return fail("mixed token '" + tok + "' misrouted");
    const auto first = g2p_apply(tok, sin);
    for (std::size_t k = 0; k < cps.size(); ++k)
      if (first.consumed[k] != is_sinhala(cps[k]))
        return fail("coverage of '" + tok + "' by the first table is wrong");
  }

  // Every output symbol is a single code point produced by exactly one rule.
  const RuleTable bij("bij", {{"sh", "ʃ"}, {"ch", "ç"}, {"th", "θ"}, {"ng", "ŋ"}, {"a", "a"},
                              {"e", "ɛ"},  {"i", "i"},  {"o", "ɔ"},  {"u", "u"},  {"k", "k"},
                              {"t", "t"},  {"s", "s"},  {"n", "n"},  {"c", "c"},  {"h", "h"},
                              {"g", "g"}});
  const auto back = invert(bij);
  const std::string letters = "aeiouktsnchg";
  for (int i = 0; i < 1000; ++i) {
    std::string x;
    const std::size_t len = 1 + rng.uniform(10);
    for (std::size_t k = 0; k < len; ++k) x += letters[rng.uniform(letters.size())];
    const std::string ipa = g2p_apply(x, bij).output;
    if (reromanize(ipa, back) != x) return fail("round trip broke on '" + x + "'");
  }
  return {true, "1000 single-table tokens, " + std::to_string(mixed.size()) +
                    " mixed-script tokens, 1000 round trips"};
}

// ---------------------------------------------------------------------------

SentenceMarginals random_sentence(SplitMix64& rng, std::size_t id, bool uniform,
                                  std::size_t n_tags) {
  SentenceMarginals s;
  s.doc_id = "D" + std::to_string(id % 7);
  s.seg_id = static_cast<int>(id);
  const std::size_t len = 1 + rng.uniform(12);
  for (std::size_t i = 0; i < len; ++i) {
    TokenMarginal t;
    t.surface = "t" + std::to_string(i);
    std::vector<double> p(n_tags);
    double sum = 0.0;
    for (auto& x : p) sum += (x = uniform ? 1.0 : 0.05 + rng.uniform_real());
    for (std::size_t k = 0; k < n_tags; ++k) t.probs["T" + std::to_string(k)] = p[k] / sum;
    s.tokens.push_back(std::move(t));
  }
  return s;
}

Outcome span_entropy_check() {
  SplitMix64 rng(1111);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const std::size_t n_tags = 2 + rng.uniform(8);
    const auto s = random_sentence(rng, i, true, n_tags);
    for (std::size_t a = 0; a < s.tokens.size(); ++a)
      for (std::size_t b = a + 1; b <= s.tokens.size(); ++b)
        worst = std::max(worst, std::abs(span_entropy(s, a, b) -
                                         double(b - a) * std::log(double(n_tags))));
  }
  if (worst > 1e-9) return fail("uniform span entropy off by " + std::to_string(worst));

  std::size_t selected = 0;
  for (int inst = 0; inst < 100; ++inst) {
    std::vector<SentenceMarginals> corpus;
    const std::size_t n = 1 + rng.uniform(15);
    for (std::size_t k = 0; k < n; ++k) corpus.push_back(random_sentence(rng, k, false, 3));
    SpanSelectOptions opts;
    opts.max_span_len = 1 + rng.uniform(5);
    opts.max_per_sentence = 1 + rng.uniform(3);
    const std::size_t budget = rng.uniform(20);
    const auto spans = select_uncertain_spans(corpus, budget, opts);
    selected += spans.size();
    if (spans.size() > budget) return fail("instance " + std::to_string(inst) + " exceeds budget");
    std::map<std::pair<std::string, int>, std::vector<const SpanCandidate*>> per;
    for (std::size_t k = 0; k < spans.size(); ++k) {
      const auto& sp = spans[k];
      if (sp.end <= sp.begin || sp.end - sp.begin > opts.max_span_len)
        return fail("instance " + std::to_string(inst) + " has a bad span length");
      if (k && spans[k - 1].entropy < sp.entropy)
        return fail("instance " + std::to_string(inst) + " not sorted by entropy");
      auto& v = per[{sp.doc_id, sp.seg_id}];
      for (const auto* o : v)
        if (sp.begin < o->end && o->begin < sp.end)
          return fail("instance " + std::to_string(inst) + " has overlapping spans");
      v.push_back(&sp);
      if (v.size() > opts.max_per_sentence)
        return fail("instance " + std::to_string(inst) + " exceeds the per-sentence cap");
    }
    const std::size_t available = std::min(budget, n * opts.max_per_sentence);
    if (opts.max_per_sentence == 1 && spans.size() != available)
      return fail("instance " + std::to_string(inst) + " left budget unused");
  }
  return {true, "uniform entropy exact to 1e-9; 100 selections within budget and cap (" +
                    std::to_string(selected) + " spans)"};
}

// ---------------------------------------------------------------------------

Outcome determinism() {
  const std::vector<std::string> configs = {"ner/ner.toml", "edl/edl.toml", "mt/mt.toml",
                                            "sf/sf.toml"};
  std::size_t files = 0;
  for (const auto& cfg : configs) {
    const std::string name = fs::path(cfg).stem().string();
    std::map<std::string, std::string> reference;
    int run = 0;
    for (unsigned threads : {1u, 1u, 1u, 4u, 8u}) {
      const fs::path dir = fs::path(kWork) / ("det_" + name + "_" + std::to_string(run++));
      run_fixture(cfg, dir, threads);
      auto tree = read_tree(dir);
      if (!tree.count("manifest.json")) return fail(name + ": no manifest");
      if (reference.empty()) {
        reference = std::move(tree);
        files += reference.size();
        continue;
      }
      if (tree.size() != reference.size()) return fail(name + ": file set differs");
      for (const auto& [path, bytes] : reference)
        if (!tree.count(path) || tree[path] != bytes)
          return fail(name + ": " + path + " differs with " + std::to_string(threads) +
                      " thread(s)");
    }
  }
  return {true, "4 recipes x (3 runs + 4 and 8 threads), " + std::to_string(files) +
                    " files byte-identical"};
}

}  // namespace

int main() {
  fs::create_directories(kWork);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"TF-IDF oracle equivalence", tfidf_oracle},
      {"ranking throughput", throughput},
      {"parallel filter efficacy", filter_efficacy},
      {"label propagation oracle", propagation_oracle},
      {"capitalization formula", capitalization},
      {"edit-distance propagation", edit_distance},
      {"entity linking", linking},
      {"situation frame pipeline", sf_pipeline},
      {"genre-ratio selection", genre_ratio},
      {"G2P backoff", g2p},
      {"span entropy", span_entropy_check},
      {"end-to-end determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first
              << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
