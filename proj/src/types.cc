#include "lowres/types.h"

#include <cstdlib>
#include <string>

#include "lowres/concurrency.h"

namespace lowres {

std::string_view to_string(Genre g) {
  switch (g) {
    case Genre::kNW: return "NW";
    case Genre::kSN: return "SN";
    case Genre::kWL: return "WL";
    case Genre::kOther: return "OTHER";
  }
  return "OTHER";
}

Genre parse_genre(std::string_view s) {
  if (s == "NW") return Genre::kNW;
  if (s == "SN") return Genre::kSN;
  if (s == "WL") return Genre::kWL;
  return Genre::kOther;
}

std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::kPER: return "PER";
    case EntityType::kORG: return "ORG";
    case EntityType::kGPE: return "GPE";
    case EntityType::kLOC: return "LOC";
  }
  return "PER";
}

std::optional<EntityType> parse_entity_type(std::string_view s) {
  for (EntityType t : kAllEntityTypes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

int tie_rank(EntityType t) {
  switch (t) {
    case EntityType::kPER: return 0;
    case EntityType::kGPE: return 1;
    case EntityType::kLOC: return 2;
    case EntityType::kORG: return 3;
  }
  return 4;
}

unsigned threads_from_env() {
  const char* v = std::getenv("LOWRES_THREADS");
  if (!v) return 1;
  char* end = nullptr;
  long n = std::strtol(v, &end, 10);
  if (end == v || n < 1) return 1;
  return static_cast<unsigned>(n);
}

}  // namespace lowres
