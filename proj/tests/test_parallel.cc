#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lowres/error.h"
#include "lowres/lexicon.h"
#include "lowres/parallel_corpus.h"
#include "lowres/rng.h"
#include "lowres/unicode.h"
#include "oracles.h"

using namespace lowres;
using Toks = std::vector<std::string>;

namespace {

SentencePair make_pair(Toks src, Toks tgt) {
  SentencePair p;
  p.src = std::move(src);
  p.tgt = std::move(tgt);
  return p;
}

std::vector<SentencePair> numbered_pairs(std::size_t n) {
  std::vector<SentencePair> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto p = make_pair({"s" + std::to_string(i)}, {"t" + std::to_string(i)});
    p.index = i;
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("realignment examples") {
  const Toks src = {"aaaa", "bbbb"}, tgt = {"aaaabbbb"};
  auto r = realign_document(src, tgt);
  REQUIRE(r.beads.size() == 1);
  CHECK(r.beads[0].src == Range{0, 2});
  CHECK(r.beads[0].tgt == Range{0, 1});

  const Toks s3 = {"one two", "three four five", "six"}, t3 = {"uno dos", "tres cuatro cinco", "seis"};
  r = realign_document(s3, t3);
  REQUIRE(r.beads.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.beads[i].src == Range{i, i + 1});
    CHECK(r.beads[i].tgt == Range{i, i + 1});
  }

  r = realign_document(Toks{"x"}, Toks{""});
  REQUIRE(r.beads.size() == 1);
  CHECK(r.beads[0].src == Range{0, 1});
  CHECK(r.beads[0].tgt == Range{0, 1});
  CHECK_THROWS_AS(realign_document(Toks{"x"}, Toks{}), InvalidArgument);
}

TEST_CASE("realignment cost equals exhaustive path search") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    Toks src(1 + rng.uniform(6)), tgt(1 + rng.uniform(6));
    std::vector<std::size_t> sl, tl;
    for (auto& s : src) {
      s = std::string(rng.uniform(12), 'x');
      sl.push_back(s.size());
    }
    for (auto& t : tgt) {
      t = std::string(rng.uniform(12), 'y');
      tl.push_back(t.size());
    }
    const AlignmentCosts costs;
    const auto r = realign_document(src, tgt, costs);
    CHECK(r.cost == doctest::Approx(oracle::brute_force_alignment_cost(sl, tl, costs.skip, costs.merge)));

    // Beads tile both sides in order.
    std::size_t si = 0, ti = 0;
    double recomputed = 0.0;
    for (const auto& b : r.beads) {
      CHECK(b.src.begin == si);
      CHECK(b.tgt.begin == ti);
      si = b.src.end;
      ti = b.tgt.end;
      recomputed += oracle::bead_cost(sl, tl, {b.src.begin, b.src.end, b.tgt.begin, b.tgt.end},
                                      costs.skip, costs.merge);
    }
    CHECK(si == src.size());
    CHECK(ti == tgt.size());
    CHECK(recomputed == doctest::Approx(r.cost));
  }
}

TEST_CASE("lengths are counted in code points") {
  CHECK(length_mismatch_cost(4, 4) == 0.0);
  CHECK(length_mismatch_cost(2, 4) == doctest::Approx(4.0 / 4.0));
  const Toks src = {"කොළඹ"}, tgt = {"abcd"};
  CHECK(realign_document(src, tgt).cost == 0.0);
}

TEST_CASE("noise injection") {
  const auto pairs = numbered_pairs(10);
  auto noisy = make_noisy_training(pairs, 0.0, 1);
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(noisy[i].label == 1);
    CHECK(noisy[i].pair == pairs[i]);
  }

  noisy = make_noisy_training(pairs, 0.1, 42);
  std::vector<std::size_t> zero;
  for (std::size_t i = 0; i < 10; ++i)
    if (noisy[i].label == 0) zero.push_back(i);
  REQUIRE(zero.size() == 2);
  CHECK(zero[1] == zero[0] + 1);
  CHECK(noisy[zero[0]].pair.tgt == pairs[zero[1]].tgt);
  CHECK(noisy[zero[1]].pair.tgt == pairs[zero[0]].tgt);
  for (std::size_t i = 0; i < 10; ++i) CHECK(noisy[i].pair.src == pairs[i].src);

  const auto again = make_noisy_training(pairs, 0.1, 42);
  for (std::size_t i = 0; i < 10; ++i) CHECK(again[i].pair == noisy[i].pair);

  CHECK_THROWS_AS(make_noisy_training(numbered_pairs(1), 0.1, 1), TooFewPairs);
}

TEST_CASE("swapped pairs are disjoint for every seed and rate") {
  const auto pairs = numbered_pairs(37);
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    for (double rate : {0.05, 0.1, 0.3, 0.5}) {
      const auto noisy = make_noisy_training(pairs, rate, seed);
      std::size_t zeros = 0;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        zeros += noisy[i].label == 0;
        if (noisy[i].label == 0)
          CHECK(noisy[i].pair.tgt != pairs[i].tgt);
        else
          CHECK(noisy[i].pair.tgt == pairs[i].tgt);
      }
      CHECK(zeros == 2 * static_cast<std::size_t>(std::floor(rate * 37 + 1e-9)));
    }
}

TEST_CASE("pair features") {
  Lexicon id;
  for (const char* w : {"a", "b", "c"}) id.add(w, w);
  auto f = pair_features(make_pair({"a", "b", "c"}, {"a", "b", "c"}), id);
  CHECK(f.get(kLogLengthRatio) == 0.0);
  CHECK(f.get(kSrcCoverage) == 1.0);
  CHECK(f.get(kTgtCoverage) == 1.0);
  CHECK(f.get(kLenDiff0) == 1.0);

  f = pair_features(make_pair({"a", "b"}, {"w", "x", "y", "z"}), Lexicon{});
  CHECK(f.get(kLogLengthRatio) == doctest::Approx(std::log(2.0)));
  CHECK(f.get(kSrcCoverage) == 0.0);
  CHECK(f.get(kLenDiff1To2) == 1.0);

  f = pair_features(make_pair({"a", "b"}, {}), Lexicon{});
  CHECK(std::isfinite(f.get(kLogLengthRatio)));
  CHECK(f.get(kLogLengthRatio) == doctest::Approx(std::log(2.0)));
  CHECK(pair_feature_names().size() == kNumPairFeatures);
}

TEST_CASE("entity augmentation") {
  const std::vector<SentencePair> pairs = {make_pair({"floods", "in", "X"}, {"imyuzure", "i", "Y"})};
  const std::vector<std::vector<SpanPair>> spans = {{{{2, 3}, {2, 3}}}};
  Lexicon ents;
  ents.add("kigali", "Kigali");

  auto out = augment_with_entities(pairs, spans, ents, 0, 1);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == pairs[0]);

  out = augment_with_entities(pairs, spans, ents, 1, 1);
  REQUIRE(out.size() == 2);
  CHECK(out[0] == pairs[0]);
  CHECK(out[1].src == Toks{"floods", "in", "kigali"});
  CHECK(out[1].tgt == Toks{"imyuzure", "i", "Kigali"});

  const std::vector<std::vector<SpanPair>> none = {{}};
  out = augment_with_entities(pairs, none, ents, 2, 1);
  REQUIRE(out.size() == 3);
  CHECK(out[1].src == pairs[0].src);
  CHECK(out[2].tgt == pairs[0].tgt);

  const std::vector<std::vector<SpanPair>> bad = {{{{2, 5}, {2, 3}}}};
  CHECK_THROWS_AS(augment_with_entities(pairs, bad, ents, 1, 1), InvalidSpan);
}

TEST_CASE("multi-token entities change sentence length") {
  const std::vector<SentencePair> pairs = {make_pair({"to", "X", "now"}, {"kuri", "Y", "ubu"})};
  const std::vector<std::vector<SpanPair>> spans = {{{{1, 2}, {1, 2}}}};
  Lexicon ents;
  ents.add("new york", "New York");
  const auto out = augment_with_entities(pairs, spans, ents, 1, 5);
  REQUIRE(out.size() == 2);
  CHECK(out[1].src == Toks{"to", "new", "york", "now"});
  CHECK(out[1].tgt == Toks{"kuri", "New", "York", "ubu"});
}

TEST_CASE("do-not-translate masking") {
  const Toks toks = {"see", "http://a.b"};
  auto m = dnt_tag(toks);
  CHECK(m.masked == Toks{"see", "DNT_0"});
  CHECK(m.slots.at("DNT_0") == "http://a.b");
  CHECK(dnt_restore(m.masked, m).tokens == toks);

  m = dnt_tag(Toks{"plain", "words"});
  CHECK(m.slots.empty());
  CHECK(m.masked == Toks{"plain", "words"});

  m = dnt_tag(Toks{"http://a.b", "and", "www.example.com", "#tag", "@who", "bob@example.org"});
  CHECK(m.masked == Toks{"DNT_0", "and", "DNT_1", "DNT_2", "DNT_3", "DNT_4"});

  // Translation reordered the placeholders and dropped one.
  const auto r = dnt_restore(Toks{"DNT_1", "na", "DNT_0"}, m);
  CHECK(r.tokens == Toks{"www.example.com", "na", "http://a.b", "#tag", "@who", "bob@example.org"});
  CHECK(r.missing == Toks{"DNT_2", "DNT_3", "DNT_4"});
  CHECK_THROWS_AS(dnt_restore(Toks{"DNT_0", "DNT_0"}, m), InvalidArgument);
}

TEST_CASE("fallback translation") {
  Lexicon lex;
  lex.add("amazi", "water");
  lex.add("amazi", "waters");
  const NeighborMap nb = {{"imvura", {"rain", "storm"}}};
  const auto out = translate_corpus_fallback(Toks{"amazi", "kigal", "imvura", "qqq"}, lex,
                                             {"kigali", "water"}, nb);
  CHECK(out == Toks{"water", "kigali", "rain", "qqq"});
}

TEST_CASE("pivot lexicon") {
  Lexicon a, b;
  a.add("a", "x", 1);
  b.add("x", "b", 1);
  auto p = pivot_lexicon(a, b);
  REQUIRE(p.find("a"));
  CHECK(p.find("a")->at(0) == Translation{"b", 1.0});

  Lexicon c;
  c.add("y", "b");
  CHECK(pivot_lexicon(a, c).empty());

  Lexicon a2, b2;
  a2.add("a", "x", 1);
  a2.add("a", "y", 1);
  b2.add("x", "b", 1);
  b2.add("y", "b", 1);
  b2.add("y", "c", 3);
  p = pivot_lexicon(a2, b2);
  const auto& tr = *p.find("a");
  REQUIRE(tr.size() == 2);
  CHECK(tr[0] == Translation{"c", 3.0});
  CHECK(tr[1] == Translation{"b", 2.0});
}

TEST_CASE("pivot weights equal the brute-force path sum") {
  SplitMix64 rng(8);
  Lexicon a, b;
  for (int i = 0; i < 40; ++i) {
    a.add("s" + std::to_string(rng.uniform(5)), "p" + std::to_string(rng.uniform(6)), 1.0 + double(rng.uniform(3)));
    b.add("p" + std::to_string(rng.uniform(6)), "t" + std::to_string(rng.uniform(5)), 1.0 + double(rng.uniform(3)));
  }
  const auto p = pivot_lexicon(a, b);
  for (int s = 0; s < 5; ++s)
    for (int t = 0; t < 5; ++t) {
      double want = 0.0;
      if (const auto* x = a.find("s" + std::to_string(s)))
        for (const auto& [piv, w1] : *x)
          if (const auto* y = b.find(piv))
            for (const auto& [tgt, w2] : *y)
              if (tgt == "t" + std::to_string(t)) want += w1 * w2;
      double got = 0.0;
      if (const auto* tr = p.find("s" + std::to_string(s)))
        for (const auto& x : *tr)
          if (x.target == "t" + std::to_string(t)) got = x.weight;
      CHECK(got == doctest::Approx(want));
    }
}

TEST_CASE("native-informant phrases") {
  std::vector<Toks> mono;
  for (int i = 0; i < 5; ++i) mono.push_back({"umwuzure", "ukabije"});
  for (int i = 0; i < 5; ++i) mono.push_back({"umwuzure"});
  auto got = select_ni_phrases(mono, std::vector<Toks>{}, 4, 10);
  REQUIRE(!got.empty());
  CHECK(got[0].phrase == Toks{"umwuzure", "ukabije"});
  for (const auto& pc : got) CHECK(pc.phrase != Toks{"umwuzure"});

  const std::vector<Toks> bi = {{"umwuzure", "ukabije", "cyane"}};
  got = select_ni_phrases(mono, bi, 4, 10);
  for (const auto& pc : got) CHECK(pc.phrase != Toks{"umwuzure", "ukabije"});

  CHECK(select_ni_phrases(mono, std::vector<Toks>{}, 4, 0).empty());
}

TEST_CASE("lexicon") {
  Lexicon lex;
  lex.add("a", "x", 1.0);
  lex.add("a", "y", 3.0);
  lex.add("a", "x", 2.0);
  CHECK(lex.find("a")->size() == 2);
  CHECK(lex.find("a")->at(0).weight == 2.0);
  lex.sort_by_weight();
  CHECK(lex.find("a")->at(0).target == "y");
  CHECK(lex.inverted().find("x")->at(0).target == "a");
  CHECK_THROWS(lex.add("a", "z", -1.0));

  std::istringstream in("amazi\twater\t0.5\nimvura\train\n");
  const auto read = read_lexicon_tsv(in);
  CHECK(read.find("amazi")->at(0) == Translation{"water", 0.5});
  CHECK(read.find("imvura")->at(0).weight == 1.0);
}

TEST_CASE("parallel TSV round trip") {
  const std::vector<SentencePair> pairs = {make_pair({"a", "b"}, {"x"}), make_pair({"c"}, {"y", "z"})};
  std::ostringstream out;
  write_parallel_tsv(pairs, out);
  std::istringstream in(out.str());
  const auto back = read_parallel_tsv(in, "doc");
  REQUIRE(back.size() == 2);
  CHECK(back[0].src == pairs[0].src);
  CHECK(back[1].tgt == pairs[1].tgt);
}
