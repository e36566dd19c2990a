#include <doctest.h>

#include <sstream>

#include "lowres/error.h"
#include "lowres/linking.h"
#include "lowres/rng.h"
#include "oracles.h"

using namespace lowres;
using Toks = std::vector<std::string>;

namespace {

KbEntry entry(std::string id, EntityType type, std::string name, std::string country,
              std::int64_t pop, std::vector<std::string> alt = {}) {
  KbEntry e;
  e.kb_id = std::move(id);
  e.type = type;
  e.name = name;
  e.ascii_name = std::move(name);
  e.alternate_names = std::move(alt);
  e.country_code = std::move(country);
  e.population = pop;
  return e;
}

Mention mention(Toks tokens, EntityType type) {
  Mention m;
  m.doc_id = "D";
  m.end = tokens.size();
  m.tokens = std::move(tokens);
  m.type = type;
  return m;
}

}  // namespace

TEST_CASE("KB pruning") {
  const std::vector<KbEntry> kb = {
      entry("1", EntityType::kGPE, "Tiny", "RW", 10),
      entry("2", EntityType::kGPE, "Big", "FR", 60000),
      entry("3", EntityType::kLOC, "Hill", "FR", 0),
      entry("4", EntityType::kPER, "Person", "FR", 0),
      entry("5", EntityType::kORG, "Org", "", 0),
      entry("6", EntityType::kGPE, "Edge", "FR", 50000),
      entry("7", EntityType::kGPE, "Near", "UG", 1),
  };
  std::set<std::string> kept;
  for (const auto& e : prune_kb(kb, {"RW"}, {"UG"})) kept.insert(e.kb_id);
  CHECK(kept == std::set<std::string>{"1", "2", "4", "5", "7"});
}

TEST_CASE("candidate translations") {
  Lexicon lex;
  lex.add("umujyi", "city");
  const std::vector<Lexicon> lexs = {lex};
  CHECK(candidate_translations(Toks{"umujyi"}, lexs) == Toks{"city", "umujyi"});
  CHECK(candidate_translations(Toks{"qqq"}, lexs) == Toks{"qqq"});

  Lexicon two;
  two.add("a", "x1");
  two.add("a", "x2");
  two.add("b", "y1");
  two.add("b", "y2");
  const auto c = candidate_translations(Toks{"a", "b"}, std::vector<Lexicon>{two});
  CHECK(c == Toks{"x1 y1", "x1 y2", "x2 y1", "x2 y2", "a b"});
  CHECK(candidate_translations(Toks{"a", "b"}, std::vector<Lexicon>{two}, 3, 2) ==
        Toks{"x1 y1", "x1 y2", "a b"});
  CHECK(candidate_translations(Toks{"a"}, std::vector<Lexicon>{two}, 1) == Toks{"x1", "a"});
}

TEST_CASE("jaccard similarity") {
  CHECK(jaccard_similarity("red cross", "red cross society") == doctest::Approx(2.0 / 3.0));
  CHECK(jaccard_similarity("kigali", "Kigali") == 1.0);
  CHECK(jaccard_similarity("a", "b") == 0.0);
  CHECK(jaccard_similarity("", "") == 1.0);
  CHECK(jaccard_similarity("", "x") == 0.0);
}

TEST_CASE("linking rules") {
  Lexicon lex;
  lex.add("umujyi", "city");
  const std::vector<Lexicon> lexs = {lex};
  const KbIndex kb({entry("K1", EntityType::kGPE, "Kigali", "RW", 10),
                    entry("K2", EntityType::kGPE, "Kigali", "RW", 10000),
                    entry("K3", EntityType::kGPE, "Kigali City Center", "RW", 5),
                    entry("P1", EntityType::kPER, "Kigali", "RW", 0)});

  auto r = link_mention(mention({"Kigali"}, EntityType::kGPE), 0, kb, lexs);
  CHECK(r.kb_id == "K2");
  CHECK(r.score == 1.0);
  CHECK(r.method == LinkMethod::kExact);

  r = link_mention(mention({"Kigali"}, EntityType::kPER), 0, kb, lexs);
  CHECK(r.kb_id == "P1");

  r = link_mention(mention({"Kigali", "umujyi"}, EntityType::kLOC), 0, kb, lexs);
  CHECK(r.kb_id == "K3");
  CHECK(r.method == LinkMethod::kTranslation);
  CHECK(r.score == doctest::Approx(2.0 / 3.0));

  LinkOptions strict;
  strict.threshold = 0.7;
  r = link_mention(mention({"Kigali", "umujyi"}, EntityType::kLOC), 0, kb, lexs, strict);
  CHECK(r.is_nil());
  CHECK(r.kb_id.empty());

  LinkOptions no_compat;
  no_compat.gpe_loc_compatible = false;
  r = link_mention(mention({"Kigali"}, EntityType::kLOC), 0, kb, lexs, no_compat);
  CHECK(r.is_nil());

  LinkOptions margin;
  margin.nil_margin = 0.1;
  r = link_mention(mention({"Kigali"}, EntityType::kGPE), 0, kb, lexs, margin);
  CHECK(r.is_nil());  // K1 and K2 tie
}

TEST_CASE("linking agrees with brute-force enumeration") {
  std::vector<KbEntry> entries;
  const Toks words = {"north", "south", "lake", "river", "kivu", "hill", "city", "red", "cross"};
  SplitMix64 rng(12);
  for (int i = 0; i < 30; ++i) {
    std::string name;
    for (std::size_t k = 1 + rng.uniform(3); k > 0; --k) name += (name.empty() ? "" : " ") + words[rng.uniform(words.size())];
    entries.push_back(entry("E" + std::to_string(100 + i), kAllEntityTypes[rng.uniform(4)], name, "RW",
                            static_cast<std::int64_t>(rng.uniform(4)) * 1000, {words[rng.uniform(words.size())]}));
  }
  Lexicon lex;
  lex.add("amajyaruguru", "north");
  lex.add("ikiyaga", "lake");
  lex.add("ikiyaga", "pond");
  lex.add("umugezi", "river");
  lex.add("umugezi", "stream");
  lex.add("umugezi", "creek");
  const std::vector<Lexicon> lexs = {lex};
  const KbIndex kb(entries);
  const Toks vocab = {"amajyaruguru", "ikiyaga", "umugezi", "Kivu", "hill", "qqq", "City"};
  for (int i = 0; i < 300; ++i) {
    Toks t;
    for (std::size_t k = 1 + rng.uniform(3); k > 0; --k) t.push_back(vocab[rng.uniform(vocab.size())]);
    const auto m = mention(t, kAllEntityTypes[rng.uniform(4)]);
    const auto got = link_mention(m, 0, kb, lexs);
    const auto want = oracle::brute_force_link(m, entries, lexs, 0.5, 3);
    CHECK((got.is_nil() ? "" : got.kb_id) == want.kb_id);
    CHECK(got.score == doctest::Approx(want.score));
  }
  std::vector<Mention> ms;
  for (int i = 0; i < 20; ++i) ms.push_back(mention({vocab[i % vocab.size()]}, EntityType::kGPE));
  const auto serial = link_mentions(ms, kb, lexs, {}, 1);
  const auto par = link_mentions(ms, kb, lexs, {}, 4);
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CHECK(serial[i].kb_id == par[i].kb_id);
    CHECK(serial[i].mention == i);
  }
}

TEST_CASE("NIL clustering") {
  std::vector<Mention> ms = {mention({"Gasabo"}, EntityType::kGPE), mention({"gasabo"}, EntityType::kGPE),
                             mention({"Remera"}, EntityType::kGPE), mention({"Kigali"}, EntityType::kGPE)};
  std::vector<LinkResult> rs(4);
  for (std::size_t i = 0; i < 4; ++i) rs[i].mention = i;
  rs[3].kb_id = "K1";
  rs[3].method = LinkMethod::kExact;
  cluster_nil(rs, ms);
  CHECK(rs[0].kb_id == "NIL0001");
  CHECK(rs[1].kb_id == "NIL0001");
  CHECK(rs[2].kb_id == "NIL0002");
  CHECK(rs[3].kb_id == "K1");

  std::vector<LinkResult> none;
  cluster_nil(none, ms);
  CHECK(none.empty());
}

TEST_CASE("KB TSV and EDL writer") {
  std::istringstream in("K1\tGPE\tKigali\tKigali\tKigali City|KGL\tRW\t1132686\n");
  const auto kb = read_kb_tsv(in);
  REQUIRE(kb.size() == 1);
  CHECK(kb[0].alternate_names == Toks{"Kigali City", "KGL"});
  CHECK(kb[0].population == 1132686);
  std::istringstream dup("K1\tGPE\tA\tA\t\tRW\t1\nK1\tGPE\tB\tB\t\tRW\t1\n");
  CHECK_THROWS_AS(read_kb_tsv(dup), ParseError);
  std::istringstream bad("K1\tCITY\tA\tA\t\tRW\t1\n");
  CHECK_THROWS_AS(read_kb_tsv(bad), ParseError);

  auto m = mention({"Kigali"}, EntityType::kGPE);
  m.seg_id = 2;
  m.begin = 3;
  m.end = 4;
  LinkResult r;
  r.kb_id = "K1";
  r.score = 1.0;
  r.method = LinkMethod::kExact;
  std::ostringstream out;
  write_edl_tsv(std::vector<LinkResult>{r}, std::vector<Mention>{m}, out);
  const auto fields = [&] {
    Toks f;
    std::string line = out.str(), cur;
    for (char c : line) {
      if (c == '\t' || c == '\n') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    return f;
  }();
  REQUIRE(fields.size() == 7);
  CHECK(fields[0] == "D");
  CHECK(fields[2] == "Kigali");
  CHECK(fields[4] == "K1");
  CHECK(fields[5] == "GPE");
}
