#include <doctest.h>

#include <set>
#include <sstream>

#include "lowres/corpus.h"
#include "lowres/error.h"
#include "lowres/situation_frames.h"

using namespace lowres;
using Toks = std::vector<std::string>;

namespace {

SentencePrediction pred(std::string doc, int seg, SfType t, double score) {
  SentencePrediction p;
  p.doc_id = std::move(doc);
  p.seg_id = seg;
  p.type = t;
  p.score = score;
  return p;
}

}  // namespace

TEST_CASE("type names") {
  CHECK(all_sf_types().size() == kNumSfTypes);
  for (auto t : all_sf_types()) CHECK(parse_sf_type(to_string(t)) == t);
  CHECK_FALSE(parse_sf_type("weather"));
}

TEST_CASE("candidate keywords") {
  LabeledDocs docs;
  docs[SfType::kWater] = {{"flood", "flood", "the"}};
  docs[SfType::kFood] = {{"the", "hunger"}};
  auto c = candidate_keywords(docs);
  REQUIRE(!c[SfType::kWater].empty());
  CHECK(c[SfType::kWater][0].word == "flood");

  c = candidate_keywords(docs, 1);
  CHECK(c[SfType::kWater].size() == 1);
  CHECK(c[SfType::kFood].size() == 1);

  LabeledDocs same;
  same[SfType::kMed] = {{"clinic", "doctor", "the"}};
  same[SfType::kShelter] = {{"clinic", "doctor", "the"}};
  c = candidate_keywords(same);
  REQUIRE(c[SfType::kMed].size() == c[SfType::kShelter].size());
  for (std::size_t i = 0; i < c[SfType::kMed].size(); ++i) {
    CHECK(c[SfType::kMed][i].word == c[SfType::kShelter][i].word);
    CHECK(c[SfType::kMed][i].score == c[SfType::kShelter][i].score);
  }

  LabeledDocs empty_class;
  empty_class[SfType::kMed] = {};
  CHECK_THROWS_AS(candidate_keywords(empty_class), EmptyClass);
}

TEST_CASE("keyword expansion") {
  std::map<SfType, std::vector<ScoredWord>> cand;
  cand[SfType::kWater] = {{"flood", 1.0}, {"rain", 0.5}, {"dry", 0.1}};
  EmbeddingNeighbors nb;
  nb["flood"] = {{"inundation", 0.9}, {"deluge", 0.69}, {"storm", 0.8}};
  nb["rain"] = {{"storm", 0.75}, {"drizzle", 0.71}};
  const auto out = expand_keywords(cand, nb);
  std::map<std::string, double> got;
  for (const auto& e : out.at(SfType::kWater)) got[e.word] = e.provenance;
  CHECK(got.size() == 6);
  CHECK(got.count("deluge") == 0);
  CHECK(got["flood"] == 1.0);
  CHECK(got["dry"] == 1.0);
  CHECK(got["storm"] == 0.8);
  CHECK(got["inundation"] == 0.9);

  const auto capped = expand_keywords(cand, nb, 1);
  CHECK(capped.at(SfType::kWater).size() == 5);
}

TEST_CASE("affinity filter") {
  std::map<SfType, std::vector<ExpandedWord>> ex;
  ex[SfType::kWater] = {{"flood", 1.0}, {"storm", 0.8}, {"edge", 1.0}, {"missing", 1.0}};
  AffinityMap aff = {{{"flood", SfType::kWater}, 0.85},
                     {{"storm", SfType::kWater}, 0.5},
                     {{"edge", SfType::kWater}, 0.8}};
  auto kept = filter_by_affinity(ex, aff, 0.8);
  std::map<std::string, double> got;
  for (const auto& k : kept) got[k.keyword] = k.confidence;
  CHECK(got.size() == 2);
  CHECK(got["flood"] == 0.85);
  CHECK(got["edge"] == 0.8);
  CHECK(filter_by_affinity(ex, aff, 0.9).empty());

  AffinityMap wild = {{{"flood", SfType::kWater}, 1.5}};
  CHECK_THROWS_AS(filter_by_affinity(ex, wild, 0.8), InvalidArgument);
}

TEST_CASE("sentence tagging") {
  Corpus c = {make_document("D1", Genre::kNW,
                            {"Flood waters rising", "nothing here",
                             "flood and hunger and doctor", "floods everywhere"})};
  const std::vector<KeywordEntry> kw = {{"flood", SfType::kWater, 0.9},
                                        {"hunger", SfType::kFood, 0.8},
                                        {"doctor", SfType::kMed, 0.7}};
  const auto p = tag_sentences(c, kw);
  REQUIRE(p.size() == 3);
  CHECK(p[0].seg_id == 0);
  CHECK(p[0].type == SfType::kWater);
  CHECK(p[0].score == 0.9);
  CHECK(p[1].seg_id == 2);
  CHECK(p[2].seg_id == 2);
  CHECK(p[1].type == SfType::kWater);
  CHECK(p[2].type == SfType::kFood);

  const LemmaMap lemmas = {{"floods", "flood"}};
  const auto lem = tag_sentences(c, kw, &lemmas);
  CHECK(lem.size() == 4);
  CHECK(lem.back().seg_id == 3);

  const auto par = tag_sentences(c, kw, &lemmas, 2, 4);
  REQUIRE(par.size() == lem.size());
  for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i].score == lem[i].score);
}

TEST_CASE("mean-std filter") {
  std::vector<SentencePrediction> eq = {pred("A", 0, SfType::kFood, 0.5), pred("B", 0, SfType::kFood, 0.5)};
  CHECK(filter_mean_std(eq, -1.5).size() == 2);
  CHECK(filter_mean_std(eq, 0.0).size() == 2);

  std::vector<SentencePrediction> p = {pred("A", 0, SfType::kFood, 1), pred("A", 1, SfType::kFood, 1),
                                       pred("A", 2, SfType::kFood, 1), pred("A", 3, SfType::kFood, 10)};
  const auto stats = score_stats(p);
  CHECK(stats.at(SfType::kFood).mean == 3.25);
  const auto kept = filter_mean_std(p, 0.0);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].score == 10);
  CHECK(filter_mean_std(p, -1e9).size() == 4);
}

TEST_CASE("top-k per document") {
  std::vector<SentencePrediction> one = {pred("D", 0, SfType::kFood, 0.9), pred("D", 0, SfType::kMed, 0.5),
                                         pred("D", 0, SfType::kWater, 0.7)};
  auto kept = filter_topk_per_doc(one, {{"D", 1}});
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].type == SfType::kFood);

  std::vector<SentencePrediction> five;
  const SfType types[] = {SfType::kFood, SfType::kMed, SfType::kWater, SfType::kEvac, SfType::kInfra};
  for (int i = 0; i < 5; ++i) five.push_back(pred("D", i * 2, types[i], 0.5 + 0.1 * i));
  kept = filter_topk_per_doc(five, {{"D", 10}});
  std::set<SfType> got;
  for (const auto& k : kept) got.insert(k.type);
  CHECK(got == std::set<SfType>{SfType::kWater, SfType::kEvac, SfType::kInfra});

  std::vector<SentencePrediction> two = {pred("D", 0, SfType::kFood, 0.9), pred("D", 1, SfType::kMed, 0.5)};
  CHECK(filter_topk_per_doc(two, {{"D", 4}}).size() == 2);
}

TEST_CASE("location assignment") {
  std::vector<SentencePrediction> p = {pred("D", 0, SfType::kFood, 1), pred("D", 3, SfType::kMed, 1),
                                       pred("E", 0, SfType::kFood, 1)};
  const std::map<std::string, std::vector<LocationMention>> locs = {
      {"D", {{0, 4, "X"}, {5, 0, "Y"}}}};
  auto places = assign_locations(p, locs, 1);
  CHECK(places[0] == "X");
  CHECK(places[1] == "X");  // Y is two segments away; fall back to the last place
  CHECK(places[2] == "");
  places = assign_locations(p, locs, kUnboundedWindow);
  CHECK(places[1] == "Y");
}

TEST_CASE("frames") {
  std::vector<SentencePrediction> p = {pred("D", 0, SfType::kWater, 0.5), pred("D", 2, SfType::kWater, 0.9),
                                       pred("D", 1, SfType::kFood, 0.4)};
  const std::vector<std::string> places = {"K1", "K2", ""};
  UrgencyLabels urg = {{{"D", SfType::kWater}, true}};
  const auto frames = finalize_frames(p, places, &urg);
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].type == SfType::kFood);
  CHECK(frames[1].justification_seg == 2);
  CHECK(frames[1].place_kb_id == "K2");
  CHECK(frames[1].urgency == std::optional<bool>(true));
  CHECK_FALSE(frames[0].urgency);
  CHECK(frames[0].status == "current");
  CHECK(frames[0].resolution == "insufficient");
  CHECK(finalize_frames(std::vector<SentencePrediction>{}, std::vector<std::string>{}).empty());

  std::ostringstream out;
  write_frames_jsonl(frames, out);
  const std::string text = out.str();
  CHECK(text.find("\"doc_id\":\"D\"") != std::string::npos);
  CHECK(text.find("\"urgency\":true") != std::string::npos);
}

TEST_CASE("resource readers") {
  std::istringstream kw("flood\twater\t0.9\n");
  const auto k = read_keywords_tsv(kw);
  REQUIRE(k.size() == 1);
  CHECK(k[0].type == SfType::kWater);
  std::ostringstream back;
  write_keywords_tsv(k, back);
  CHECK(back.str() == "flood\twater\t0.900000\n");

  std::istringstream nb("flood\tstorm\t0.7\nflood\tdeluge\t0.9\n");
  const auto n = read_neighbors_tsv(nb);
  CHECK(n.at("flood")[0].word == "deluge");

  std::istringstream aff("flood\twater\t0.85\n");
  CHECK(read_affinity_tsv(aff).at({"flood", SfType::kWater}) == 0.85);
  std::istringstream urg("D1\twater\ttrue\nD2\tfood\t0\n");
  const auto u = read_urgency_tsv(urg);
  CHECK(u.at({"D1", SfType::kWater}));
  CHECK_FALSE(u.at({"D2", SfType::kFood}));
}
