#include <doctest.h>

#include <sstream>

#include "lowres/corpus.h"
#include "lowres/error.h"
#include "lowres/text_util.h"
#include "lowres/unicode.h"

using namespace lowres;

namespace {

std::vector<std::string> surfaces(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(text)) out.push_back(t.surface);
  return out;
}

}  // namespace

TEST_CASE("tokenize splits punctuation and keeps special tokens whole") {
  CHECK(tokenize("").empty());
  CHECK(surfaces("Kigali, Rwanda") == std::vector<std::string>{"Kigali", ",", "Rwanda"});
  CHECK(surfaces("see http://a.b #help") ==
        std::vector<std::string>{"see", "http://a.b", "#help"});
  CHECK(surfaces("mail bob@example.org or @unicef") ==
        std::vector<std::string>{"mail", "bob@example.org", "or", "@unicef"});
}

TEST_CASE("token offsets slice back to the surface") {
  const std::string text = "Umwuzure  i Nyarugenge!  කොළඹ නගරය, http://x.y/z?q=1";
  for (const auto& t : tokenize(text)) CHECK(text.substr(t.start, t.end - t.start) == t.surface);
}

TEST_CASE("abugida vowel signs stay inside the word") {
  CHECK(surfaces("කොළඹ නගරය") == std::vector<std::string>{"කොළඹ", "නගරය"});
}

TEST_CASE("capitalization flag") {
  const auto toks = tokenize("Flood hits kigali");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].is_capitalized);
  CHECK_FALSE(toks[1].is_capitalized);
  CHECK_FALSE(toks[2].is_capitalized);
}

TEST_CASE("classify_special") {
  CHECK(classify_special("http://a.b") == SpecialToken::kUrl);
  CHECK(classify_special("www.example.com") == SpecialToken::kUrl);
  CHECK(classify_special("a@b.co") == SpecialToken::kEmail);
  CHECK(classify_special("@who") == SpecialToken::kMention);
  CHECK(classify_special("#help") == SpecialToken::kHashtag);
  CHECK(classify_special("plain") == SpecialToken::kNone);
}

TEST_CASE("extract_ngrams orders windows by start then length") {
  const std::vector<std::string> one = {"a"};
  auto g = extract_ngrams(one, 2);
  REQUIRE(g.size() == 1);
  CHECK(g[0].tokens == std::vector<std::string>{"a"});

  const std::vector<std::string> two = {"a", "b"};
  g = extract_ngrams(two, 2);
  REQUIRE(g.size() == 3);
  CHECK(g[0].tokens == std::vector<std::string>{"a"});
  CHECK(g[1].tokens == std::vector<std::string>{"a", "b"});
  CHECK(g[1].start == 0);
  CHECK(g[2].tokens == std::vector<std::string>{"b"});
  CHECK(g[2].start == 1);

  CHECK(extract_ngrams(std::vector<std::string>{}, 4).empty());
}

TEST_CASE("extract_ngrams count matches the closed form") {
  for (std::size_t len = 0; len <= 9; ++len)
    for (std::size_t n = 1; n <= 5; ++n) {
      std::vector<std::string> toks(len, "x");
      std::size_t want = 0;
      for (std::size_t k = 1; k <= n && k <= len; ++k) want += len - k + 1;
      CHECK(extract_ngrams(toks, n).size() == want);
    }
}

TEST_CASE("corpus JSONL round trip and errors") {
  std::istringstream in(
      R"({"doc_id":"D1","genre":"NW","segments":["Flood in Kigali.","Roads closed"]})"
      "\n"
      R"({"doc_id":"D2","genre":"SN","segments":["help #flood"]})"
      "\n");
  const auto corpus = read_corpus_jsonl(in);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].genre == Genre::kNW);
  CHECK(corpus[0].segments[1].seg_id == 1);
  CHECK(corpus[1].segments[0].surfaces() == std::vector<std::string>{"help", "#flood"});

  std::ostringstream out;
  write_corpus_jsonl(corpus, out);
  std::istringstream again(out.str());
  const auto back = read_corpus_jsonl(again);
  REQUIRE(back.size() == 2);
  CHECK(back[0].segments[0].raw == corpus[0].segments[0].raw);

  std::istringstream dup(R"({"doc_id":"D","segments":[]})" "\n" R"({"doc_id":"D","segments":[]})");
  CHECK_THROWS_AS(read_corpus_jsonl(dup), ParseError);
  std::istringstream broken("{not json");
  CHECK_THROWS_AS(read_corpus_jsonl(broken), ParseError);
}

TEST_CASE("segments are NFC-normalized") {
  // "e" + combining acute becomes a single code point.
  const auto doc = make_document("D", Genre::kOther, {"caf\x65\xcc\x81"});
  CHECK(doc.segments[0].raw == "caf\xc3\xa9");
}

TEST_CASE("text utilities") {
  CHECK(split("a,b,,c", ',') == std::vector<std::string>{"a", "b", "", "c"});
  CHECK(split_whitespace("  a \t b\n") == std::vector<std::string>{"a", "b"});
  CHECK(trim("  x ") == "x");
  CHECK(levenshtein("kitten", "sitting") == 3);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("කොළඹ", "කොළ") == 1);
  CHECK(levenshtein_bounded("kitten", "sitting", 1) == 2);
  CHECK(levenshtein_bounded("kitten", "sitting", 3) == 3);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("unicode helpers") {
  CHECK(unicode::length("කොළඹ") == 4);
  CHECK(unicode::to_lower("KIGALI") == "kigali");
  CHECK(unicode::is_capitalized("Éte"));
  CHECK_FALSE(unicode::is_capitalized("කොළඹ"));
  CHECK(unicode::has_latin("abcකො"));
  CHECK_FALSE(unicode::has_latin("කො"));
}
