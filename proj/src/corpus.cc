#include "lowres/corpus.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "lowres/error.h"
#include "lowres/unicode.h"

namespace lowres {

namespace {

bool ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool ascii_alnum(char c) { return ascii_alpha(c) || ascii_digit(c); }

std::size_t non_space_end(std::string_view s, std::size_t p) {
  while (p < s.size()) {
    std::size_t q = p;
    if (unicode::is_space(unicode::next_code_point(s, q))) break;
    p = q;
  }
  return p;
}

bool is_url_trailer(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case ')': case ']': case '}': case '\'': case '"':
      return true;
    default:
      return false;
  }
}

// Returns the end of a URL starting at p, or p when there is none.
std::size_t match_url(std::string_view s, std::size_t p) {
  std::size_t body = 0;
  if (p < s.size() && ascii_alpha(s[p])) {
    std::size_t q = p + 1;
    while (q < s.size() && (ascii_alnum(s[q]) || s[q] == '+' || s[q] == '-' || s[q] == '.')) ++q;
    if (s.substr(q, 3) == "://") body = q + 3;
  }
  if (!body && s.size() - p >= 4) {
    std::string head = unicode::to_lower(s.substr(p, 4));
    if (head == "www.") body = p + 4;
  }
  if (!body) return p;
  std::size_t end = non_space_end(s, body);
  while (end > body && is_url_trailer(s[end - 1])) --end;
  return end > body ? end : p;
}

std::size_t match_email(std::string_view s, std::size_t p) {
  auto local_char = [](char c) {
    return ascii_alnum(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
  };
  std::size_t q = p;
  while (q < s.size() && local_char(s[q])) ++q;
  if (q == p || q >= s.size() || s[q] != '@') return p;
  const std::size_t dom = q + 1;
  std::size_t e = dom;
  while (e < s.size() && (ascii_alnum(s[e]) || s[e] == '.' || s[e] == '-')) ++e;
  while (e > dom && (s[e - 1] == '.' || s[e - 1] == '-')) --e;
  if (e == dom || !ascii_alnum(s[dom])) return p;
  std::string_view domain = s.substr(dom, e - dom);
  std::size_t dot = domain.rfind('.');
  if (dot == std::string_view::npos) return p;
  std::string_view tld = domain.substr(dot + 1);
  if (tld.size() < 2) return p;
  for (char c : tld)
    if (!ascii_alpha(c)) return p;
  return e;
}

std::size_t word_run_end(std::string_view s, std::size_t p, bool allow_underscore) {
  while (p < s.size()) {
    std::size_t q = p;
    char32_t cp = unicode::next_code_point(s, q);
    if (!(unicode::is_word_char(cp) || (allow_underscore && cp == U'_'))) break;
    p = q;
  }
  return p;
}

// '@' or '#' followed by at least one word character.
std::size_t match_prefixed(std::string_view s, std::size_t p, char sigil) {
  if (p >= s.size() || s[p] != sigil) return p;
  std::size_t end = word_run_end(s, p + 1, true);
  return end > p + 1 ? end : p;
}

std::size_t match_special(std::string_view s, std::size_t p, SpecialToken& kind) {
  std::size_t e;
  if ((e = match_url(s, p)) > p) { kind = SpecialToken::kUrl; return e; }
  if ((e = match_email(s, p)) > p) { kind = SpecialToken::kEmail; return e; }
  if ((e = match_prefixed(s, p, '@')) > p) { kind = SpecialToken::kMention; return e; }
  if ((e = match_prefixed(s, p, '#')) > p) { kind = SpecialToken::kHashtag; return e; }
  kind = SpecialToken::kNone;
  return p;
}

}  // namespace

std::vector<std::string> Segment::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t p = 0;
  while (p < text.size()) {
    std::size_t q = p;
    char32_t cp = unicode::next_code_point(text, q);
    if (unicode::is_space(cp)) {
      p = q;
      continue;
    }
    SpecialToken kind;
    std::size_t end = match_special(text, p, kind);
    if (end == p) end = unicode::is_word_char(cp) ? word_run_end(text, p, false) : q;
    Token tok;
    tok.surface = std::string(text.substr(p, end - p));
    tok.start = p;
    tok.end = end;
    tok.is_capitalized = unicode::is_upper(cp);
    tokens.push_back(std::move(tok));
    p = end;
  }
  return tokens;
}

SpecialToken classify_special(std::string_view token) {
  SpecialToken kind;
  std::size_t end = match_special(token, 0, kind);
  return end == token.size() && end > 0 ? kind : SpecialToken::kNone;
}

std::vector<Ngram> extract_ngrams(std::span<const std::string> tokens,
                                  std::size_t n_max) {
  if (n_max < 1) throw InvalidArgument("n_max must be >= 1");
  std::vector<Ngram> out;
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    for (std::size_t n = 1; n <= n_max && start + n <= tokens.size(); ++n) {
      Ngram g;
      g.tokens.assign(tokens.begin() + start, tokens.begin() + start + n);
      g.start = start;
      out.push_back(std::move(g));
    }
  }
  return out;
}

Document make_document(std::string doc_id, Genre genre,
                       const std::vector<std::string>& segments) {
  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.genre = genre;
  doc.segments.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    Segment seg;
    seg.seg_id = static_cast<int>(i);
    seg.raw = unicode::nfc(segments[i]);
    seg.tokens = tokenize(seg.raw);
    doc.segments.push_back(std::move(seg));
  }
  return doc;
}

Corpus read_corpus_jsonl(std::istream& in) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("doc_id") || !j["doc_id"].is_string() ||
        !j.contains("segments") || !j["segments"].is_array())
      throw ParseError("corpus line " + std::to_string(lineno) +
                       ": expected doc_id and segments");
    std::string doc_id = j["doc_id"].get<std::string>();
    if (doc_id.empty())
      throw ParseError("corpus line " + std::to_string(lineno) + ": empty doc_id");
    if (!seen.insert(doc_id).second)
      throw ParseError("corpus line " + std::to_string(lineno) +
                       ": duplicate doc_id " + doc_id);
    Genre genre = Genre::kOther;
    if (j.contains("genre") && j["genre"].is_string())
      genre = parse_genre(j["genre"].get<std::string>());
    std::vector<std::string> segs;
    for (const auto& s : j["segments"]) {
      if (!s.is_string())
        throw ParseError("corpus line " + std::to_string(lineno) +
                         ": segments must be strings");
      segs.push_back(s.get<std::string>());
    }
    corpus.push_back(make_document(std::move(doc_id), genre, segs));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus " + path);
  return read_corpus_jsonl(in);
}

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus) {
    nlohmann::ordered_json j;
    j["doc_id"] = doc.doc_id;
    j["genre"] = std::string(to_string(doc.genre));
    auto segs = nlohmann::ordered_json::array();
    for (const auto& s : doc.segments) segs.push_back(s.raw);
    j["segments"] = std::move(segs);
    out << j.dump() << '\n';
  }
}

std::vector<std::vector<std::string>> sentence_tokens(const Corpus& corpus) {
  std::vector<std::vector<std::string>> out;
  for (const auto& doc : corpus)
    for (const auto& seg : doc.segments) out.push_back(seg.surfaces());
  return out;
}

}  // namespace lowres
