#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "urbankg/geometry.hpp"

namespace urbankg::kg {

enum class View { Spatial, Temporal, Functional, Other };
enum class Stage { Rte, Kgc };

std::string_view view_name(View v);
std::optional<View> view_from_name(std::string_view);
std::string_view stage_name(Stage s);
std::optional<Stage> stage_from_name(std::string_view);

struct Entity {
    std::string name; // non-empty after trimming; identity is the case-folded name
    std::optional<geo::Geometry> geometry;
    std::optional<std::string> entity_type;
    std::set<View> views;
};

struct Relation {
    std::string label;
    View view = View::Other;
    int frequency = 0; // number of stored facts using this label
};

struct Provenance {
    std::string record_id;
    Stage stage = Stage::Rte;
};

struct Triplet {
    std::string head;
    std::string relation;
    std::string tail;
    Provenance provenance;
    bool self_loop = false;
};

struct GraphStats {
    size_t entities = 0;
    size_t relations = 0;
    size_t facts = 0;
    bool operator==(const GraphStats&) const = default;
};

// Multi-relational graph over urban entities. Entities are deduplicated by
// case-folded name, facts by (folded head, relation label, folded tail).
// Relation frequencies always equal the stored fact support.
class UrbanGraph {
public:
    // Upserts entities and the relation; duplicate facts are ignored.
    // Fold-equal head and tail get the self-loop flag. Returns true when the
    // fact was actually added.
    bool add_triplet(Triplet t, View relation_view = View::Other);

    // Merge entity metadata (geometry, type, views) into the entity table,
    // creating the entity if absent. Never removes facts.
    void upsert_entity(const Entity& e);

    const std::vector<Entity>& entities() const { return entities_; }
    const std::vector<Relation>& relations() const { return relations_; }
    const std::vector<Triplet>& facts() const { return facts_; }

    const Entity* find_entity(std::string_view name) const;
    const Relation* find_relation(std::string_view label) const;

    GraphStats stats() const { return {entities_.size(), relations_.size(), facts_.size()}; }

    // Every fact endpoint and relation must exist in the respective tables
    // and frequencies must match fact support; violations listed.
    std::vector<std::string> integrity_violations() const;

private:
    std::vector<Entity> entities_;
    std::unordered_map<std::string, size_t> entity_index_; // folded name
    std::vector<Relation> relations_;
    std::unordered_map<std::string, size_t> relation_index_; // exact label
    std::vector<Triplet> facts_;
    std::unordered_set<std::string> fact_keys_;
};

// Set union: entities deduplicated by case-folded name, duplicate facts kept
// once, relation frequencies recomputed from the merged fact support.
UrbanGraph merge_graphs(const UrbanGraph& g1, const UrbanGraph& g2);

// Line-delimited UTF-8 export: entity, relation and fact records one per
// line, then a final stats line. Ordering is canonical (sorted), so equal
// graphs export byte-identically. I/O failures carry the path.
void export_graph(const UrbanGraph& g, const std::filesystem::path& path);
UrbanGraph import_graph(const std::filesystem::path& path);

bool graphs_equal(const UrbanGraph& a, const UrbanGraph& b);

} // namespace urbankg::kg
