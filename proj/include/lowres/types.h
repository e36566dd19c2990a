#ifndef LOWRES_TYPES_H_
#define LOWRES_TYPES_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace lowres {

enum class Genre { kNW, kSN, kWL, kOther };

inline constexpr std::array<Genre, 4> kAllGenres = {Genre::kNW, Genre::kSN,
                                                    Genre::kWL, Genre::kOther};

std::string_view to_string(Genre g);
// Unknown or empty labels map to kOther.
Genre parse_genre(std::string_view s);

enum class EntityType { kPER, kORG, kGPE, kLOC };

inline constexpr std::array<EntityType, 4> kAllEntityTypes = {
    EntityType::kPER, EntityType::kORG, EntityType::kGPE, EntityType::kLOC};

std::string_view to_string(EntityType t);
std::optional<EntityType> parse_entity_type(std::string_view s);

// Tie-break rank used whenever votes between entity types are equal:
// PER > GPE > LOC > ORG. Smaller rank wins.
int tie_rank(EntityType t);

}  // namespace lowres

#endif  // LOWRES_TYPES_H_
