#include "lowres/config.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <set>

#include <json.hpp>

#include "lowres/error.h"
#include "lowres/relevance.h"
#include "lowres/text_util.h"

namespace lowres {

namespace fs = std::filesystem;

namespace {

std::string unquote(std::string_view v) {
  v = trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front())
    return std::string(v.substr(1, v.size() - 2));
  return std::string(v);
}

// Drops a trailing '#' comment that sits outside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

class Reader {
 public:
  explicit Reader(const KeyValues& kv) : kv_(kv) {}

  const std::string* raw(const std::string& key) {
    auto it = kv_.find(key);
    if (it == kv_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
  }

  void str(const std::string& key, std::string& out) {
    if (auto v = raw(key)) out = unquote(*v);
  }

  void list(const std::string& key, std::vector<std::string>& out) {
    auto v = raw(key);
    if (!v) return;
    std::string_view s = trim(*v);
    std::string body;
    if (!s.empty() && s.front() == '[') {
      if (s.back() != ']') throw ConfigError(key + ": unterminated list");
      body = std::string(s.substr(1, s.size() - 2));
    } else {
      body = unquote(s);
    }
    out.clear();
    for (const auto& item : split(body, ','))
      if (!trim(item).empty()) out.push_back(unquote(item));
  }

  template <typename T>
  void number(const std::string& key, T& out) {
    auto v = raw(key);
    if (!v) return;
    const std::string s = unquote(*v);
    T value{};
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || end != s.data() + s.size())
      throw ConfigError(key + ": not a number: " + s);
    out = value;
  }

  void boolean(const std::string& key, bool& out) {
    auto v = raw(key);
    if (!v) return;
    const std::string s = unquote(*v);
    if (s == "true") out = true;
    else if (s == "false") out = false;
    else throw ConfigError(key + ": expected true or false, got " + s);
  }

  void check_all_used() const {
    for (const auto& [k, v] : kv_)
      if (!used_.count(k)) throw ConfigError(k + ": unknown setting");
  }

 private:
  const KeyValues& kv_;
  std::set<std::string> used_;
};

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string section;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = std::string(trim(body.substr(1, body.size() - 2)));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = std::string(trim(body.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (kv.count(full)) throw ConfigError(full + ": set twice (line " + std::to_string(lineno) + ")");
    kv[full] = std::string(trim(body.substr(eq + 1)));
  }
  return kv;
}

PipelineConfig PipelineConfig::from_key_values(const KeyValues& kv, const std::string& base_dir) {
  PipelineConfig c;
  c.base_dir = base_dir;
  Reader r(kv);
  r.str("recipe", c.recipe);
  r.str("output_dir", c.output_dir);
  r.number("seed", c.seed);
  r.str("corpus", c.corpus);

  r.str("select.terms", c.terms);
  r.number("select.budget", c.select_budget);
  r.str("select.genre_ratio", c.genre_ratio);

  r.str("ner.gazetteer", c.gazetteer);
  r.str("ner.negatives", c.negatives);
  r.number("ner.window", c.window);
  r.number("ner.min_edit_dist", c.min_edit_dist);
  r.boolean("ner.edit_propagate", c.edit_propagate);
  r.boolean("ner.doc_propagate", c.doc_propagate);
  r.boolean("ner.mark_unknown", c.mark_unknown);
  r.number("ner.negative_top_k", c.negative_top_k);
  r.boolean("ner.auto_negatives", c.auto_negatives);

  r.str("edl.kb", c.kb);
  r.list("edl.lexicons", c.lexicons);
  r.str("edl.stopwords", c.stopwords);
  r.number("edl.threshold", c.link_threshold);
  r.list("edl.incident_countries", c.incident_countries);
  r.list("edl.neighbor_countries", c.neighbor_countries);
  r.number("edl.population_floor", c.population_floor);
  r.number("edl.k_per_token", c.k_per_token);
  r.number("edl.max_candidates", c.max_candidates);
  r.boolean("edl.gpe_loc_compatible", c.gpe_loc_compatible);
  if (kv.count("edl.nil_margin")) {
    double m = 0.0;
    r.number("edl.nil_margin", m);
    c.nil_margin = m;
  }

  r.str("mt.parallel_docs", c.parallel_docs);
  r.str("mt.lexicon", c.lexicon);
  r.str("mt.entity_lexicon", c.entity_lexicon);
  r.number("mt.swap_rate", c.swap_rate);
  r.number("mt.filter_threshold", c.filter_threshold);
  r.number("mt.epochs", c.epochs);
  r.number("mt.learning_rate", c.learning_rate);
  r.number("mt.l2", c.l2);
  r.number("mt.batch_size", c.batch_size);
  r.number("mt.skip_cost", c.skip_cost);
  r.number("mt.merge_cost", c.merge_cost);
  r.number("mt.augment_copies", c.augment_copies);
  r.number("mt.ni_n_max", c.ni_n_max);
  r.number("mt.ni_top_n", c.ni_top_n);

  r.str("sf.keywords", c.keywords);
  r.str("sf.labeled", c.labeled);
  r.str("sf.neighbors", c.neighbors);
  r.str("sf.affinity", c.affinity);
  r.str("sf.lemmas", c.lemmas);
  r.str("sf.urgency", c.urgency);
  r.number("sf.keyword_top_n", c.keyword_top_n);
  r.number("sf.max_neighbors", c.max_neighbors);
  r.number("sf.min_cosine", c.min_cosine);
  r.number("sf.th1", c.th1);
  r.number("sf.top_t", c.top_t);
  r.number("sf.lambda", c.lambda);
  r.number("sf.k_cap", c.k_cap);
  r.str("sf.filter_mode", c.filter_mode);
  if (auto v = r.raw("sf.location_window")) {
    const std::string s = unquote(*v);
    if (s == "inf") {
      c.location_window = std::numeric_limits<std::size_t>::max();
    } else {
      KeyValues one{{"sf.location_window", s}};
      Reader(one).number("sf.location_window", c.location_window);
    }
  }
  r.check_all_used();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  const auto kv = parse_key_values(in);
  return from_key_values(kv, fs::absolute(path).parent_path().string());
}

std::string PipelineConfig::resolve(const std::string& path) const {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).lexically_normal().string();
}

namespace {

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw ConfigError(field + ": " + why);
}

}  // namespace

void PipelineConfig::validate() const {
  static const std::set<std::string> kRecipes = {"ner-data", "edl", "mt-data", "sf"};
  require(kRecipes.count(recipe) > 0, "recipe",
          recipe.empty() ? "not set" : "unknown recipe " + recipe);

  auto file = [&](const std::string& field, const std::string& path, bool required) {
    if (path.empty()) {
      require(!required, field, "required for recipe " + recipe);
      return;
    }
    require(fs::is_regular_file(resolve(path)), field, "file not found: " + resolve(path));
  };

  const bool ner = recipe == "ner-data", edl = recipe == "edl", mt = recipe == "mt-data",
             sf = recipe == "sf";
  file("corpus", corpus, ner || edl || sf);
  file("select.terms", terms, false);
  file("ner.gazetteer", gazetteer, ner);
  file("ner.negatives", negatives, false);
  file("edl.kb", kb, edl);
  for (const auto& l : lexicons) file("edl.lexicons", l, true);
  file("edl.stopwords", stopwords, false);
  file("mt.parallel_docs", parallel_docs, mt);
  file("mt.lexicon", lexicon, mt);
  file("mt.entity_lexicon", entity_lexicon, false);
  file("sf.keywords", keywords, false);
  file("sf.labeled", labeled, false);
  file("sf.neighbors", neighbors, false);
  file("sf.affinity", affinity, false);
  file("sf.lemmas", lemmas, false);
  file("sf.urgency", urgency, false);
  if (sf) {
    require(!keywords.empty() || (!labeled.empty() && !affinity.empty()), "sf.keywords",
            "set sf.keywords, or sf.labeled with sf.affinity to induce them");
  }

  if (!genre_ratio.empty()) {
    try {
      GenreRatio::parse(genre_ratio);
    } catch (const Error& e) {
      throw ConfigError(std::string("select.genre_ratio: ") + e.what());
    }
  }
  require(window >= 1, "ner.window", "must be >= 1");
  require(min_edit_dist >= 1, "ner.min_edit_dist", "must be >= 1");
  require(link_threshold >= 0.0 && link_threshold <= 1.0, "edl.threshold", "must be in [0, 1]");
  require(population_floor >= 0, "edl.population_floor", "must be >= 0");
  require(k_per_token >= 1, "edl.k_per_token", "must be >= 1");
  require(max_candidates >= 1, "edl.max_candidates", "must be >= 1");
  require(!nil_margin || *nil_margin >= 0.0, "edl.nil_margin", "must be >= 0");
  require(swap_rate >= 0.0 && swap_rate <= 0.5, "mt.swap_rate", "must be in [0, 0.5]");
  require(filter_threshold >= 0.0 && filter_threshold <= 1.0, "mt.filter_threshold",
          "must be in [0, 1]");
  require(epochs >= 1, "mt.epochs", "must be >= 1");
  require(learning_rate > 0.0, "mt.learning_rate", "must be > 0");
  require(l2 >= 0.0, "mt.l2", "must be >= 0");
  require(batch_size >= 1, "mt.batch_size", "must be >= 1");
  require(skip_cost >= 0.0, "mt.skip_cost", "must be >= 0");
  require(merge_cost >= 0.0, "mt.merge_cost", "must be >= 0");
  require(ni_n_max >= 1, "mt.ni_n_max", "must be >= 1");
  require(min_cosine >= -1.0 && min_cosine <= 1.0, "sf.min_cosine", "must be in [-1, 1]");
  require(th1 >= -1.0 && th1 <= 1.0, "sf.th1", "must be in [-1, 1]");
  require(top_t >= 1, "sf.top_t", "must be >= 1");
  require(k_cap >= 1, "sf.k_cap", "must be >= 1");
  require(filter_mode == "both" || filter_mode == "lambda" || filter_mode == "topk",
          "sf.filter_mode", "must be both, lambda or topk");
}

std::string PipelineConfig::tunables_json() const {
  nlohmann::ordered_json j;
  j["recipe"] = recipe;
  j["seed"] = seed;
  j["select"] = {{"budget", select_budget}, {"genre_ratio", genre_ratio}};
  j["ner"] = {{"window", window},
              {"min_edit_dist", min_edit_dist},
              {"edit_propagate", edit_propagate},
              {"doc_propagate", doc_propagate},
              {"mark_unknown", mark_unknown},
              {"negative_top_k", negative_top_k},
              {"auto_negatives", auto_negatives}};
  j["edl"] = {{"threshold", link_threshold},
              {"incident_countries", incident_countries},
              {"neighbor_countries", neighbor_countries},
              {"population_floor", population_floor},
              {"k_per_token", k_per_token},
              {"max_candidates", max_candidates},
              {"gpe_loc_compatible", gpe_loc_compatible},
              {"nil_margin", nil_margin ? nlohmann::ordered_json(*nil_margin) : nullptr}};
  j["mt"] = {{"swap_rate", swap_rate},   {"filter_threshold", filter_threshold},
             {"epochs", epochs},         {"learning_rate", learning_rate},
             {"l2", l2},                 {"batch_size", batch_size},
             {"skip_cost", skip_cost},   {"merge_cost", merge_cost},
             {"augment_copies", augment_copies}, {"ni_n_max", ni_n_max},
             {"ni_top_n", ni_top_n}};
  j["sf"] = {{"keyword_top_n", keyword_top_n}, {"max_neighbors", max_neighbors},
             {"min_cosine", min_cosine},       {"th1", th1},
             {"top_t", top_t},                 {"lambda", lambda},
             {"k_cap", k_cap},                 {"filter_mode", filter_mode},
             {"location_window", location_window}};
  return j.dump();
}

}  // namespace lowres
