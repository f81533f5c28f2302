#ifndef KGC_DATASETS_HPP
#define KGC_DATASETS_HPP

#include <cstdint>

#include "kgc/completion.hpp"
#include "kgc/graph.hpp"

namespace kgc {

// Four-level command hierarchy: one Emperor, prefectures, dioceses,
// provinces, with deterministic round-robin assignment downward. Defaults
// give 48 nodes and 47 COMMANDS edges.
struct RomanEmpireParams {
    int prefecture_count = 4;
    int diocese_count = 12;
    int province_count = 31;
};

// Throws InvalidParams when any count is < 1.
KnowledgeGraph gen_roman_empire(const RomanEmpireParams& params = {});

// Synthetic genealogy of blood relatives with RELATIVE-OF arcs oriented
// parent -> child. Spouses outside the family are not modeled, so with
// intermarriage_rate 0 every child has one parent arc and the graph is a
// forest. With rate > 0 some same-generation pairs reproduce together and
// their children carry two parent arcs (pedigree-collapse diamonds).
// Deterministic for fixed params + seed.
struct FamilyTreeParams {
    int generations = 4;
    int couples_per_generation = 2;   // reproducing lines in generation 0
    int children_per_couple = 2;
    double intermarriage_rate = 0.0;  // in [0,1)
    std::uint64_t seed = 1;
};

// Throws InvalidParams: generations < 2, counts < 1, rate outside [0,1).
KnowledgeGraph gen_family_tree(const FamilyTreeParams& params);

// Bundled case-study configs.
RelationshipConfig roman_commands_config();   // COMMANDS, exp(0.5)/Sum, tau=0.001, H=7
RelationshipConfig kinship_config();          // RELATIVE-OF, exp(0.5)/Sum, tau=1/128, H=7

inline constexpr const char* kCommandsRel = "COMMANDS";
inline constexpr const char* kRelativeOfRel = "RELATIVE-OF";

} // namespace kgc

#endif
