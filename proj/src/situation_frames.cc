#include "lowres/situation_frames.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "lowres/concurrency.h"
#include "lowres/error.h"
#include "lowres/text_util.h"
#include "lowres/unicode.h"

namespace lowres {

const std::array<SfType, kNumSfTypes>& all_sf_types() {
  static const std::array<SfType, kNumSfTypes> types = {
      SfType::kEvac,    SfType::kFood,          SfType::kInfra,        SfType::kMed,
      SfType::kSearch,  SfType::kShelter,       SfType::kUtils,        SfType::kWater,
      SfType::kCrimeViolence, SfType::kRegimeChange, SfType::kTerrorism};
  return types;
}

std::string_view to_string(SfType t) {
  switch (t) {
    case SfType::kEvac: return "evac";
    case SfType::kFood: return "food";
    case SfType::kInfra: return "infra";
    case SfType::kMed: return "med";
    case SfType::kSearch: return "search";
    case SfType::kShelter: return "shelter";
    case SfType::kUtils: return "utils";
    case SfType::kWater: return "water";
    case SfType::kCrimeViolence: return "crimeviolence";
    case SfType::kRegimeChange: return "regimechange";
    case SfType::kTerrorism: return "terrorism";
  }
  return "evac";
}

std::optional<SfType> parse_sf_type(std::string_view s) {
  for (SfType t : all_sf_types())
    if (to_string(t) == s) return t;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Keyword induction

std::map<SfType, std::vector<ScoredWord>> candidate_keywords(const LabeledDocs& labeled,
                                                             std::size_t top_n) {
  std::map<std::string, std::size_t> df;
  for (const auto& [type, docs] : labeled) {
    if (docs.empty()) throw EmptyClass(std::string(to_string(type)) + " has no documents");
    for (const auto& doc : docs) {
      std::set<std::string> seen;
      for (const auto& tok : doc) seen.insert(unicode::to_lower(tok));
      for (const auto& w : seen) ++df[w];
    }
  }
  std::map<SfType, std::vector<ScoredWord>> out;
  for (const auto& [type, docs] : labeled) {
    std::map<std::string, std::size_t> tf;
    for (const auto& doc : docs)
      for (const auto& tok : doc) ++tf[unicode::to_lower(tok)];
    std::vector<ScoredWord> scored;
    scored.reserve(tf.size());
    for (const auto& [w, c] : tf)
      scored.push_back({w, static_cast<double>(c) / static_cast<double>(df.at(w))});
    std::stable_sort(scored.begin(), scored.end(),
                     [](const ScoredWord& a, const ScoredWord& b) { return a.score > b.score; });
    if (scored.size() > top_n) scored.resize(top_n);
    out[type] = std::move(scored);
  }
  return out;
}

std::map<SfType, std::vector<ExpandedWord>> expand_keywords(
    const std::map<SfType, std::vector<ScoredWord>>& candidates,
    const EmbeddingNeighbors& neighbors, std::size_t max_neighbors, double min_cosine) {
  std::map<SfType, std::vector<ExpandedWord>> out;
  for (const auto& [type, words] : candidates) {
    std::vector<ExpandedWord> list;
    std::unordered_map<std::string, std::size_t> at;
    auto add = [&](const std::string& w, double prov) {
      auto it = at.find(w);
      if (it == at.end()) {
        at.emplace(w, list.size());
        list.push_back({w, prov});
      } else {
        list[it->second].provenance = std::max(list[it->second].provenance, prov);
      }
    };
    for (const auto& c : words) add(c.word, 1.0);
    for (const auto& c : words) {
      auto nb = neighbors.find(c.word);
      if (nb == neighbors.end()) continue;
      for (std::size_t k = 0; k < nb->second.size() && k < max_neighbors; ++k)
        if (nb->second[k].cosine > min_cosine) add(nb->second[k].word, nb->second[k].cosine);
    }
    out[type] = std::move(list);
  }
  return out;
}

std::vector<KeywordEntry> filter_by_affinity(
    const std::map<SfType, std::vector<ExpandedWord>>& expanded, const AffinityMap& affinity,
    double th1) {
  std::vector<KeywordEntry> out;
  for (const auto& [type, words] : expanded) {
    for (const auto& w : words) {
      auto it = affinity.find({w.word, type});
      if (it == affinity.end()) continue;
      if (it->second < -1.0 || it->second > 1.0)
        throw InvalidArgument("affinity out of [-1,1] for " + w.word);
      if (it->second >= th1) out.push_back({w.word, type, it->second});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tagging

std::vector<SentencePrediction> tag_sentences(const Corpus& corpus,
                                              std::span<const KeywordEntry> keywords,
                                              const LemmaMap* lemmas, std::size_t top_t,
                                              unsigned threads) {
  // keyword -> confidence per type (max over duplicate entries)
  std::unordered_map<std::string, std::map<SfType, double>> index;
  for (const auto& k : keywords) {
    auto& slot = index[unicode::to_lower(k.keyword)];
    auto [it, inserted] = slot.emplace(k.type, k.confidence);
    if (!inserted) it->second = std::max(it->second, k.confidence);
  }

  struct SegRef {
    const Document* doc;
    const Segment* seg;
  };
  std::vector<SegRef> segs;
  for (const auto& d : corpus)
    for (const auto& s : d.segments) segs.push_back({&d, &s});

  std::vector<std::vector<SentencePrediction>> per_seg(segs.size());
  parallel_for(segs.size(), threads, [&](std::size_t i) {
    std::set<std::string> matched;
    for (const auto& tok : segs[i].seg->tokens) {
      const std::string lower = unicode::to_lower(tok.surface);
      if (index.count(lower)) matched.insert(lower);
      if (lemmas) {
        auto lm = lemmas->find(lower);
        if (lm != lemmas->end() && index.count(lm->second)) matched.insert(lm->second);
      }
    }
    if (matched.empty()) return;
    std::map<SfType, double> score;
    std::map<SfType, std::vector<std::string>> kws;
    for (const auto& kw : matched)
      for (const auto& [type, conf] : index.at(kw)) {
        score[type] += conf;
        kws[type].push_back(kw);
      }
    std::vector<std::pair<SfType, double>> ranked(score.begin(), score.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t r = 0; r < ranked.size() && r < top_t; ++r) {
      if (!(ranked[r].second > 0.0)) break;
      per_seg[i].push_back({segs[i].doc->doc_id, segs[i].seg->seg_id, ranked[r].first,
                            ranked[r].second, kws[ranked[r].first]});
    }
  });
  std::vector<SentencePrediction> out;
  for (auto& v : per_seg)
    for (auto& p : v) out.push_back(std::move(p));
  return out;
}

std::map<SfType, MeanStd> score_stats(std::span<const SentencePrediction> predictions) {
  std::map<SfType, std::vector<double>> by_type;
  for (const auto& p : predictions) by_type[p.type].push_back(p.score);
  std::map<SfType, MeanStd> out;
  for (const auto& [type, scores] : by_type) {
    double sum = 0.0;
    for (double s : scores) sum += s;
    const double mean = sum / static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    out[type] = {mean, std::sqrt(var / static_cast<double>(scores.size()))};
  }
  return out;
}

std::vector<SentencePrediction> filter_mean_std(std::span<const SentencePrediction> predictions,
                                                double lambda) {
  const auto stats = score_stats(predictions);
  std::vector<SentencePrediction> out;
  for (const auto& p : predictions) {
    const auto& st = stats.at(p.type);
    const double threshold = st.mean + lambda * st.stddev;
    // Rounding in the mean must not drop a score equal to it.
    const double slack = 1e-12 * std::max(1.0, std::abs(threshold));
    if (p.score >= threshold - slack) out.push_back(p);
  }
  return out;
}

std::vector<SentencePrediction> filter_topk_per_doc(
    std::span<const SentencePrediction> predictions,
    const std::map<std::string, std::size_t>& sentences_per_doc, std::size_t cap) {
  std::map<std::string, std::map<SfType, double>> best;
  std::map<std::string, std::set<int>> seen_segs;
  for (const auto& p : predictions) {
    auto& slot = best[p.doc_id];
    auto [it, inserted] = slot.emplace(p.type, p.score);
    if (!inserted) it->second = std::max(it->second, p.score);
    seen_segs[p.doc_id].insert(p.seg_id);
  }
  std::map<std::string, std::set<SfType>> keep;
  for (const auto& [doc, types] : best) {
    auto s = sentences_per_doc.find(doc);
    const std::size_t n_sent = s != sentences_per_doc.end() ? s->second : seen_segs[doc].size();
    const std::size_t k = std::min(cap, n_sent);
    std::vector<std::pair<SfType, double>> ranked(types.begin(), types.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t r = 0; r < ranked.size() && r < k; ++r) keep[doc].insert(ranked[r].first);
  }
  std::vector<SentencePrediction> kept;
  for (const auto& p : predictions)
    if (keep[p.doc_id].count(p.type)) kept.push_back(p);
  return filter_mean_std(kept, 0.0);
}

// ---------------------------------------------------------------------------
// Locations and frames

std::vector<std::string> assign_locations(
    std::span<const SentencePrediction> predictions,
    const std::map<std::string, std::vector<LocationMention>>& locations, std::size_t n_window) {
  std::vector<std::string> places(predictions.size());
  std::map<std::string, std::vector<std::size_t>> by_doc;
  std::vector<std::string> doc_order;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    auto [it, inserted] = by_doc.try_emplace(predictions[i].doc_id);
    if (inserted) doc_order.push_back(predictions[i].doc_id);
    it->second.push_back(i);
  }
  static const std::vector<LocationMention> kNone;
  for (const auto& doc : doc_order) {
    auto& idx = by_doc[doc];
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (predictions[a].seg_id != predictions[b].seg_id)
        return predictions[a].seg_id < predictions[b].seg_id;
      return predictions[a].type < predictions[b].type;
    });
    auto lit = locations.find(doc);
    const auto& mentions = lit == locations.end() ? kNone : lit->second;
    std::string last;
    for (std::size_t i : idx) {
      const int s = predictions[i].seg_id;
      const LocationMention* best = nullptr;
      std::size_t best_dist = 0;
      for (const auto& m : mentions) {
        const std::size_t dist = static_cast<std::size_t>(std::abs(m.seg_id - s));
        if (dist > n_window) continue;
        if (!best || dist < best_dist ||
            (dist == best_dist && (m.seg_id < best->seg_id ||
                                   (m.seg_id == best->seg_id && m.begin < best->begin)))) {
          best = &m;
          best_dist = dist;
        }
      }
      if (best) {
        places[i] = best->place_id;
        last = best->place_id;
      } else {
        places[i] = last;
      }
    }
  }
  return places;
}

std::vector<SituationFrame> finalize_frames(std::span<const SentencePrediction> predictions,
                                            std::span<const std::string> places,
                                            const UrgencyLabels* urgency) {
  if (places.size() != predictions.size())
    throw InvalidArgument("one place per prediction is required");
  std::vector<std::string> doc_order;
  std::map<std::string, std::map<SfType, std::size_t>> best;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    auto [dit, new_doc] = best.try_emplace(p.doc_id);
    if (new_doc) doc_order.push_back(p.doc_id);
    auto [it, inserted] = dit->second.emplace(p.type, i);
    if (!inserted) {
      const auto& cur = predictions[it->second];
      if (p.score > cur.score || (p.score == cur.score && p.seg_id < cur.seg_id)) it->second = i;
    }
  }
  std::vector<SituationFrame> frames;
  for (const auto& doc : doc_order) {
    for (const auto& [type, i] : best[doc]) {
      SituationFrame f;
      f.doc_id = doc;
      f.type = type;
      f.place_kb_id = places[i];
      f.justification_seg = predictions[i].seg_id;
      f.score = predictions[i].score;
      if (urgency) {
        auto u = urgency->find({doc, type});
        if (u != urgency->end()) f.urgency = u->second;
      }
      frames.push_back(std::move(f));
    }
  }
  return frames;
}

void write_frames_jsonl(std::span<const SituationFrame> frames, std::ostream& out) {
  for (const auto& f : frames) {
    nlohmann::ordered_json j;
    j["doc_id"] = f.doc_id;
    j["type"] = std::string(to_string(f.type));
    j["place_kb_id"] = f.place_kb_id;
    j["justification_seg"] = f.justification_seg;
    j["status"] = f.status;
    j["resolution"] = f.resolution;
    if (f.urgency) j["urgency"] = *f.urgency;
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// File formats

namespace {

template <typename Fn>
void for_each_tsv_row(std::istream& in, std::size_t min_cols, const char* what, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() < min_cols)
      throw ParseError(std::string(what) + " line " + std::to_string(lineno) + ": expected " +
                       std::to_string(min_cols) + " columns");
    try {
      fn(cols);
    } catch (const std::invalid_argument&) {
      throw ParseError(std::string(what) + " line " + std::to_string(lineno) + ": bad number");
    } catch (const ParseError& e) {
      throw ParseError(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

SfType sf_type_or_throw(const std::string& s) {
  auto t = parse_sf_type(trim(s));
  if (!t) throw ParseError("unknown SF type " + s);
  return *t;
}

}  // namespace

std::vector<KeywordEntry> read_keywords_tsv(std::istream& in) {
  std::vector<KeywordEntry> out;
  for_each_tsv_row(in, 3, "keywords", [&](const std::vector<std::string>& c) {
    out.push_back({std::string(trim(c[0])), sf_type_or_throw(c[1]), std::stod(c[2])});
  });
  return out;
}

void write_keywords_tsv(std::span<const KeywordEntry> keywords, std::ostream& out) {
  char buf[32];
  for (const auto& k : keywords) {
    std::snprintf(buf, sizeof buf, "%.6f", k.confidence);
    out << k.keyword << '\t' << to_string(k.type) << '\t' << buf << '\n';
  }
}

EmbeddingNeighbors read_neighbors_tsv(std::istream& in) {
  EmbeddingNeighbors out;
  for_each_tsv_row(in, 3, "neighbors", [&](const std::vector<std::string>& c) {
    out[std::string(trim(c[0]))].push_back({std::string(trim(c[1])), std::stod(c[2])});
  });
  for (auto& [w, list] : out)
    std::stable_sort(list.begin(), list.end(), [](const NeighborEntry& a, const NeighborEntry& b) {
      return a.cosine > b.cosine;
    });
  return out;
}

AffinityMap read_affinity_tsv(std::istream& in) {
  AffinityMap out;
  for_each_tsv_row(in, 3, "affinity", [&](const std::vector<std::string>& c) {
    out[{std::string(trim(c[0])), sf_type_or_throw(c[1])}] = std::stod(c[2]);
  });
  return out;
}

LemmaMap read_lemmas_tsv(std::istream& in) {
  LemmaMap out;
  for_each_tsv_row(in, 2, "lemmas", [&](const std::vector<std::string>& c) {
    out[unicode::to_lower(trim(c[0]))] = unicode::to_lower(trim(c[1]));
  });
  return out;
}

UrgencyLabels read_urgency_tsv(std::istream& in) {
  UrgencyLabels out;
  for_each_tsv_row(in, 3, "urgency", [&](const std::vector<std::string>& c) {
    const std::string v = unicode::to_lower(trim(c[2]));
    out[{std::string(trim(c[0])), sf_type_or_throw(c[1])}] = (v == "true" || v == "1");
  });
  return out;
}

}  // namespace lowres
