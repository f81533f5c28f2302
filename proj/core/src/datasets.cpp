#include "kgc/datasets.hpp"

#include <random>
#include <string>
#include <vector>

#include "kgc/error.hpp"

namespace kgc {

namespace {

std::string padded(int value, int width) {
    std::string s = std::to_string(value);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

int digits_of(int n) {
    int d = 1;
    while (n >= 10) {
        n /= 10;
        ++d;
    }
    return d;
}

// Historical names for the default sizes; synthetic names take over beyond
// them so larger empires stay well-formed.
constexpr const char* kPrefectureNames[] = {"East", "Illyricum", "Italy", "Gauls"};
constexpr const char* kDioceseNames[] = {"Macedonia", "Dacia"};
constexpr const char* kProvinceNames[] = {"Mauretania", "Numidia", "Africa",
                                          "Palestine", "Caria"};

template <std::size_t N>
std::string tier_name(const char* const (&names)[N], const char* prefix, int i,
                      int count) {
    if (i < static_cast<int>(N)) return names[i];
    const int width = std::max(2, digits_of(count));
    return std::string(prefix) + " " + padded(i + 1, width);
}

// Uniform draw in [0,1) from the top 53 bits; hand-rolled so the stream is
// identical across standard libraries.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

KnowledgeGraph gen_roman_empire(const RomanEmpireParams& params) {
    if (params.prefecture_count < 1 || params.diocese_count < 1 ||
        params.province_count < 1)
        throw Error(ErrorKind::InvalidParams,
                    "every tier needs at least one member");

    std::vector<Node> nodes;
    std::vector<Edge> edges;
    nodes.push_back({"Emperor", "Emperor", {{"tier", std::int64_t{0}}}});

    std::vector<NodeId> prefectures, dioceses;
    for (int i = 0; i < params.prefecture_count; ++i) {
        NodeId id = tier_name(kPrefectureNames, "Prefecture", i, params.prefecture_count);
        nodes.push_back({id, "Prefecture", {{"tier", std::int64_t{1}}}});
        edges.push_back({"Emperor", id, kCommandsRel, std::nullopt, Provenance::Direct});
        prefectures.push_back(std::move(id));
    }
    for (int i = 0; i < params.diocese_count; ++i) {
        NodeId id = tier_name(kDioceseNames, "Diocese", i, params.diocese_count);
        nodes.push_back({id, "Diocese", {{"tier", std::int64_t{2}}}});
        edges.push_back({prefectures[i % prefectures.size()], id, kCommandsRel,
                         std::nullopt, Provenance::Direct});
        dioceses.push_back(std::move(id));
    }
    for (int i = 0; i < params.province_count; ++i) {
        NodeId id = tier_name(kProvinceNames, "Province", i, params.province_count);
        nodes.push_back({id, "Province", {{"tier", std::int64_t{3}}}});
        edges.push_back({dioceses[i % dioceses.size()], id, kCommandsRel,
                         std::nullopt, Provenance::Direct});
    }

    return build_graph(std::move(nodes), std::move(edges),
                       {{kCommandsRel, true}});
}

KnowledgeGraph gen_family_tree(const FamilyTreeParams& params) {
    if (params.generations < 2)
        throw Error(ErrorKind::InvalidParams, "generations must be >= 2");
    if (params.couples_per_generation < 1)
        throw Error(ErrorKind::InvalidParams, "couples_per_generation must be >= 1");
    if (params.children_per_couple < 1)
        throw Error(ErrorKind::InvalidParams, "children_per_couple must be >= 1");
    if (!(params.intermarriage_rate >= 0.0 && params.intermarriage_rate < 1.0))
        throw Error(ErrorKind::InvalidParams,
                    "intermarriage_rate must lie in [0,1)");

    std::mt19937_64 rng(params.seed);
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    const auto add_person = [&](int generation, int index) -> NodeId {
        NodeId id = "G" + padded(generation, 2) + "-P" + padded(index, 5);
        nodes.push_back(
            {id, "Person", {{"generation", std::int64_t{generation}}}});
        return id;
    };

    std::vector<NodeId> current;
    for (int i = 0; i < params.couples_per_generation; ++i)
        current.push_back(add_person(0, i));

    for (int g = 1; g < params.generations; ++g) {
        // Pair off this generation: each member either marries a later
        // unmatched member (intermarriage) or an outsider who is not a node.
        struct Unit {
            NodeId parent_a;
            std::optional<NodeId> parent_b;
        };
        std::vector<Unit> units;
        std::vector<NodeId> pool(current.begin(), current.end());
        while (!pool.empty()) {
            NodeId a = std::move(pool.front());
            pool.erase(pool.begin());
            if (!pool.empty() && unit_draw(rng) < params.intermarriage_rate) {
                const std::size_t j = rng() % pool.size();
                NodeId b = std::move(pool[j]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
                units.push_back({std::move(a), std::move(b)});
            } else {
                units.push_back({std::move(a), std::nullopt});
            }
        }

        std::vector<NodeId> next;
        int index = 0;
        for (const Unit& unit : units) {
            for (int c = 0; c < params.children_per_couple; ++c) {
                NodeId child = add_person(g, index++);
                edges.push_back({unit.parent_a, child, kRelativeOfRel,
                                 std::nullopt, Provenance::Direct});
                if (unit.parent_b)
                    edges.push_back({*unit.parent_b, child, kRelativeOfRel,
                                     std::nullopt, Provenance::Direct});
                next.push_back(std::move(child));
            }
        }
        current = std::move(next);
    }

    return build_graph(std::move(nodes), std::move(edges),
                       {{kRelativeOfRel, true}});
}

RelationshipConfig roman_commands_config() {
    RelationshipConfig cfg;
    cfg.rel = kCommandsRel;
    cfg.decay = DecayFunction::exponential(0.5);
    cfg.aggregation = Aggregation::Sum;
    cfg.threshold = 0.001;
    cfg.max_hops = 7;
    return cfg;
}

RelationshipConfig kinship_config() {
    RelationshipConfig cfg;
    cfg.rel = kRelativeOfRel;
    cfg.decay = DecayFunction::exponential(0.5);
    cfg.aggregation = Aggregation::Sum;
    cfg.threshold = 0.0078125;
    cfg.max_hops = 7;
    return cfg;
}

} // namespace kgc
