#include "urbankg/kg_model.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>

#include <json.hpp>

#include "urbankg/text_util.hpp"

namespace urbankg::kg {

using nlohmann::json;

std::string_view view_name(View v) {
    switch (v) {
        case View::Spatial: return "spatial";
        case View::Temporal: return "temporal";
        case View::Functional: return "functional";
        case View::Other: return "other";
    }
    return "?";
}

std::optional<View> view_from_name(std::string_view s) {
    for (View v : {View::Spatial, View::Temporal, View::Functional, View::Other})
        if (s == view_name(v)) return v;
    return std::nullopt;
}

std::string_view stage_name(Stage s) { return s == Stage::Rte ? "RTE" : "KGC"; }

std::optional<Stage> stage_from_name(std::string_view s) {
    if (s == "RTE") return Stage::Rte;
    if (s == "KGC") return Stage::Kgc;
    return std::nullopt;
}

namespace {

std::string fact_key(const Triplet& t) {
    return text::fold_trim(t.head) + "\x1f" + t.relation + "\x1f" + text::fold_trim(t.tail);
}

} // namespace

bool UrbanGraph::add_triplet(Triplet t, View relation_view) {
    t.head = text::trim(t.head);
    t.relation = text::trim(t.relation);
    t.tail = text::trim(t.tail);
    if (t.head.empty() || t.relation.empty() || t.tail.empty())
        return false;
    if (text::fold(t.head) == text::fold(t.tail)) t.self_loop = true;

    std::string key = fact_key(t);
    if (fact_keys_.contains(key)) return false;

    upsert_entity(Entity{t.head, std::nullopt, std::nullopt, {}});
    upsert_entity(Entity{t.tail, std::nullopt, std::nullopt, {}});

    auto [it, inserted] = relation_index_.try_emplace(t.relation, relations_.size());
    if (inserted)
        relations_.push_back(Relation{t.relation, relation_view, 1});
    else
        relations_[it->second].frequency += 1;

    fact_keys_.insert(std::move(key));
    facts_.push_back(std::move(t));
    return true;
}

void UrbanGraph::upsert_entity(const Entity& e) {
    std::string name = text::trim(e.name);
    if (name.empty()) return;
    std::string folded = text::fold(name);
    auto [it, inserted] = entity_index_.try_emplace(folded, entities_.size());
    if (inserted) {
        Entity copy = e;
        copy.name = name;
        entities_.push_back(std::move(copy));
        return;
    }
    Entity& existing = entities_[it->second];
    if (!existing.geometry && e.geometry) existing.geometry = e.geometry;
    if (!existing.entity_type && e.entity_type) existing.entity_type = e.entity_type;
    existing.views.insert(e.views.begin(), e.views.end());
}

const Entity* UrbanGraph::find_entity(std::string_view name) const {
    auto it = entity_index_.find(text::fold_trim(name));
    return it == entity_index_.end() ? nullptr : &entities_[it->second];
}

const Relation* UrbanGraph::find_relation(std::string_view label) const {
    auto it = relation_index_.find(std::string(label));
    return it == relation_index_.end() ? nullptr : &relations_[it->second];
}

std::vector<std::string> UrbanGraph::integrity_violations() const {
    std::vector<std::string> out;
    std::map<std::string, int> support;
    for (const Triplet& t : facts_) {
        if (!find_entity(t.head)) out.push_back("missing head entity: " + t.head);
        if (!find_entity(t.tail)) out.push_back("missing tail entity: " + t.tail);
        if (!find_relation(t.relation)) out.push_back("missing relation: " + t.relation);
        support[t.relation] += 1;
    }
    for (const Relation& r : relations_) {
        if (r.frequency != support[r.label])
            out.push_back("frequency mismatch for '" + r.label + "': stored " +
                          std::to_string(r.frequency) + ", facts " +
                          std::to_string(support[r.label]));
        if (r.frequency < 1) out.push_back("relation with zero frequency: " + r.label);
    }
    return out;
}

UrbanGraph merge_graphs(const UrbanGraph& g1, const UrbanGraph& g2) {
    UrbanGraph out;
    for (const auto& g : {std::cref(g1), std::cref(g2)}) {
        for (const Entity& e : g.get().entities()) out.upsert_entity(e);
        for (const Triplet& t : g.get().facts()) {
            const Relation* r = g.get().find_relation(t.relation);
            out.add_triplet(t, r ? r->view : View::Other);
        }
    }
    return out;
}

namespace {

json entity_to_json(const Entity& e) {
    json j{{"type", "entity"}, {"name", e.name}};
    if (e.geometry) j["geometry"] = geo::serialize_wkt(*e.geometry);
    if (e.entity_type) j["entity_type"] = *e.entity_type;
    if (!e.views.empty()) {
        json views = json::array();
        for (View v : e.views) views.push_back(std::string(view_name(v)));
        j["views"] = views;
    }
    return j;
}

} // namespace

void export_graph(const UrbanGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());

    std::vector<const Entity*> entities;
    for (const Entity& e : g.entities()) entities.push_back(&e);
    std::sort(entities.begin(), entities.end(), [](const Entity* a, const Entity* b) {
        return text::fold(a->name) < text::fold(b->name);
    });
    std::vector<const Relation*> relations;
    for (const Relation& r : g.relations()) relations.push_back(&r);
    std::sort(relations.begin(), relations.end(),
              [](const Relation* a, const Relation* b) { return a->label < b->label; });
    std::vector<const Triplet*> facts;
    for (const Triplet& t : g.facts()) facts.push_back(&t);
    std::sort(facts.begin(), facts.end(), [](const Triplet* a, const Triplet* b) {
        auto key = [](const Triplet* t) {
            return std::tuple(text::fold(t->head), t->relation, text::fold(t->tail),
                              t->provenance.record_id);
        };
        return key(a) < key(b);
    });

    for (const Entity* e : entities) out << entity_to_json(*e).dump() << '\n';
    for (const Relation* r : relations)
        out << json{{"type", "relation"},
                    {"label", r->label},
                    {"view", std::string(view_name(r->view))},
                    {"frequency", r->frequency}}
                   .dump()
            << '\n';
    for (const Triplet* t : facts)
        out << json{{"type", "fact"},
                    {"head", t->head},
                    {"relation", t->relation},
                    {"tail", t->tail},
                    {"record_id", t->provenance.record_id},
                    {"stage", std::string(stage_name(t->provenance.stage))},
                    {"self_loop", t->self_loop}}
                   .dump()
            << '\n';
    auto s = g.stats();
    out << json{{"type", "stats"},
                {"entities", s.entities},
                {"relations", s.relations},
                {"facts", s.facts}}
               .dump()
        << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

UrbanGraph import_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());

    std::vector<json> lines;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        try {
            lines.push_back(json::parse(line));
        } catch (const json::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }

    // Relation lines first so facts can carry the recorded view regardless
    // of line order in foreign files.
    std::map<std::string, View> relation_views;
    for (const json& j : lines)
        if (j.value("type", "") == "relation")
            if (auto v = view_from_name(j.value("view", "other")))
                relation_views[j.at("label").get<std::string>()] = *v;

    UrbanGraph g;
    for (const json& j : lines) {
        std::string type = j.value("type", "");
        if (type == "entity") {
            Entity e;
            e.name = j.at("name").get<std::string>();
            if (j.contains("geometry"))
                e.geometry = geo::parse_wkt(j["geometry"].get<std::string>());
            if (j.contains("entity_type")) e.entity_type = j["entity_type"].get<std::string>();
            if (j.contains("views"))
                for (const auto& v : j["views"])
                    if (auto view = view_from_name(v.get<std::string>())) e.views.insert(*view);
            g.upsert_entity(e);
        } else if (type == "fact") {
            Triplet t;
            t.head = j.at("head").get<std::string>();
            t.relation = j.at("relation").get<std::string>();
            t.tail = j.at("tail").get<std::string>();
            t.provenance.record_id = j.value("record_id", "");
            if (auto st = stage_from_name(j.value("stage", "RTE"))) t.provenance.stage = *st;
            auto it = relation_views.find(t.relation);
            g.add_triplet(std::move(t), it == relation_views.end() ? View::Other : it->second);
        }
    }
    return g;
}

bool graphs_equal(const UrbanGraph& a, const UrbanGraph& b) {
    if (a.stats() != b.stats()) return false;
    for (const Entity& e : a.entities()) {
        const Entity* other = b.find_entity(e.name);
        if (!other) return false;
        if (e.geometry != other->geometry || e.entity_type != other->entity_type ||
            e.views != other->views)
            return false;
    }
    std::unordered_set<std::string> b_keys;
    for (const Triplet& u : b.facts()) b_keys.insert(fact_key(u));
    for (const Triplet& t : a.facts())
        if (!b_keys.contains(fact_key(t))) return false;
    return true;
}

} // namespace urbankg::kg
