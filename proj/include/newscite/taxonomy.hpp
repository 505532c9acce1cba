#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/error.hpp"
#include "newscite/jsonl.hpp"
#include "newscite/rng.hpp"

// Entity type DAG: depth-consistency transform, transitive instance
// enumeration and stratified train/test sampling.

namespace newscite::taxonomy {

using corpus::Entity;

inline constexpr const char* kRootType = "owl:Thing";

struct TypeDag {
    std::vector<std::string> nodes;                                 // sorted, includes root
    std::map<std::string, std::vector<std::string>> parents;       // child -> parents (sorted)
    std::string root = kRootType;
    std::map<std::string, int> depth;                               // shortest root distance

    bool has_node(const std::string& id) const {
        return std::binary_search(nodes.begin(), nodes.end(), id);
    }

    std::map<std::string, std::vector<std::string>> children() const {
        std::map<std::string, std::vector<std::string>> ch;
        for (const auto& n : nodes) ch[n];
        for (const auto& [child, ps] : parents)
            for (const auto& p : ps) ch[p].push_back(child);
        for (auto& [n, cs] : ch) std::sort(cs.begin(), cs.end());
        return ch;
    }
};

namespace detail {

inline void normalize(TypeDag& dag) {
    std::unordered_set<std::string> node_set(dag.nodes.begin(), dag.nodes.end());
    node_set.insert(dag.root);
    for (const auto& [child, ps] : dag.parents) {
        node_set.insert(child);
        for (const auto& p : ps) node_set.insert(p);
    }
    dag.nodes.assign(node_set.begin(), node_set.end());
    std::sort(dag.nodes.begin(), dag.nodes.end());
    for (auto& [child, ps] : dag.parents) {
        std::sort(ps.begin(), ps.end());
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    }
}

// DFS over child->parent edges; returns a cycle witness if one exists.
inline std::vector<std::string> find_cycle(const TypeDag& dag) {
    enum class Mark { none, active, done };
    std::unordered_map<std::string, Mark> mark;
    std::vector<std::string> stack;
    std::vector<std::string> cycle;

    std::function<bool(const std::string&)> visit = [&](const std::string& node) {
        mark[node] = Mark::active;
        stack.push_back(node);
        auto it = dag.parents.find(node);
        if (it != dag.parents.end()) {
            for (const auto& p : it->second) {
                Mark m = mark.count(p) ? mark[p] : Mark::none;
                if (m == Mark::active) {
                    auto from = std::find(stack.begin(), stack.end(), p);
                    cycle.assign(from, stack.end());
                    cycle.push_back(p);
                    return true;
                }
                if (m == Mark::none && visit(p)) return true;
            }
        }
        mark[node] = Mark::done;
        stack.pop_back();
        return false;
    };
    for (const auto& n : dag.nodes) {
        if ((mark.count(n) ? mark[n] : Mark::none) == Mark::none && visit(n)) return cycle;
    }
    return {};
}

// Shortest distance from root, following parent->child direction.
inline std::map<std::string, int> compute_depths(const TypeDag& dag) {
    auto children = dag.children();
    std::map<std::string, int> depth;
    depth[dag.root] = 0;
    std::deque<std::string> queue{dag.root};
    while (!queue.empty()) {
        std::string node = queue.front();
        queue.pop_front();
        for (const auto& c : children[node]) {
            if (!depth.count(c)) {
                depth[c] = depth[node] + 1;
                queue.push_back(c);
            }
        }
    }
    return depth;
}

}  // namespace detail

inline TypeDag load_taxonomy(const std::filesystem::path& path) {
    TypeDag dag;
    jsonl::for_each(path, [&](std::size_t line_no, const nlohmann::json& j) {
        try {
            std::string node = j.at("node").get<std::string>();
            auto& ps = dag.parents[node];
            if (auto it = j.find("parents"); it != j.end())
                for (const auto& p : *it) ps.push_back(p.get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            throw Error(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    });
    detail::normalize(dag);
    return dag;
}

inline void save_taxonomy(const std::filesystem::path& path, const TypeDag& dag) {
    jsonl::Writer w(path);
    for (const auto& n : dag.nodes) {
        auto it = dag.parents.find(n);
        std::vector<std::string> ps = it == dag.parents.end() ? std::vector<std::string>{} : it->second;
        w.write(nlohmann::json{{"node", n}, {"parents", ps}});
    }
}

// Depth-consistency transform: for every child, keep only edges to parents
// at the minimum parent depth (depth = shortest root distance), then
// recompute depths. Cycles are an error; parentless non-root nodes are
// reattached to the root with a warning.
inline TypeDag make_depth_consistent(const TypeDag& input, std::vector<std::string>* warnings = nullptr) {
    TypeDag dag = input;
    detail::normalize(dag);

    if (auto cycle = detail::find_cycle(dag); !cycle.empty()) {
        std::string witness;
        for (const auto& n : cycle) {
            if (!witness.empty()) witness += " -> ";
            witness += n;
        }
        throw Error("taxonomy contains a cycle: " + witness);
    }

    // Reattach orphans until everything is reachable from the root. An
    // unreachable acyclic cluster always contains a parentless source, so
    // this terminates.
    bool changed = true;
    while (changed) {
        changed = false;
        auto depth = detail::compute_depths(dag);
        for (const auto& n : dag.nodes) {
            if (n == dag.root || depth.count(n)) continue;
            auto& ps = dag.parents[n];
            if (!ps.empty()) continue;  // becomes reachable once its cluster's source is attached
            ps.push_back(dag.root);
            if (warnings) warnings->push_back("reattached orphaned type '" + n + "' to root");
            changed = true;
        }
    }

    auto depth = detail::compute_depths(dag);
    for (auto& [child, ps] : dag.parents) {
        if (ps.empty()) continue;
        int min_depth = std::numeric_limits<int>::max();
        for (const auto& p : ps) min_depth = std::min(min_depth, depth.at(p));
        std::vector<std::string> kept;
        for (const auto& p : ps)
            if (depth.at(p) == min_depth) kept.push_back(p);
        ps = std::move(kept);
    }
    dag.depth = detail::compute_depths(dag);
    return dag;
}

// ---------------------------------------------------------------------------
// Instance enumeration

// Resolves each entity's declared types to their ancestor closure (types not
// in the dag are ignored; the root is always included).
struct TypeContext {
    const TypeDag* dag = nullptr;
    std::unordered_map<std::string, std::vector<std::string>> entity_types;  // sorted closures
    std::unordered_map<std::string, const Entity*> entities;

    static TypeContext build(const TypeDag& dag, const std::vector<Entity>& entities) {
        TypeContext ctx;
        ctx.dag = &dag;
        std::unordered_map<std::string, std::vector<std::string>> closure_cache;
        for (const auto& e : entities) {
            std::unordered_set<std::string> closure{dag.root};
            for (const auto& t : e.type_ids) {
                if (!dag.has_node(t)) continue;
                auto it = closure_cache.find(t);
                if (it == closure_cache.end()) {
                    std::vector<std::string> acc;
                    std::deque<std::string> queue{t};
                    std::unordered_set<std::string> seen{t};
                    while (!queue.empty()) {
                        std::string n = queue.front();
                        queue.pop_front();
                        acc.push_back(n);
                        auto pit = dag.parents.find(n);
                        if (pit == dag.parents.end()) continue;
                        for (const auto& p : pit->second)
                            if (seen.insert(p).second) queue.push_back(p);
                    }
                    it = closure_cache.emplace(t, std::move(acc)).first;
                }
                closure.insert(it->second.begin(), it->second.end());
            }
            std::vector<std::string> sorted(closure.begin(), closure.end());
            std::sort(sorted.begin(), sorted.end());
            ctx.entity_types.emplace(e.id, std::move(sorted));
            ctx.entities.emplace(e.id, &e);
        }
        return ctx;
    }

    const std::vector<std::string>& types_of(const std::string& entity_id) const {
        static const std::vector<std::string> kRootOnly{kRootType};
        auto it = entity_types.find(entity_id);
        return it == entity_types.end() ? kRootOnly : it->second;
    }

    bool is_instance(const std::string& entity_id, const std::string& type_id) const {
        const auto& ts = types_of(entity_id);
        return std::binary_search(ts.begin(), ts.end(), type_id);
    }
};

// Transitive instance counts per type.
inline std::map<std::string, std::size_t> instance_counts(const TypeContext& ctx) {
    std::map<std::string, std::size_t> counts;
    for (const auto& [eid, types] : ctx.entity_types)
        for (const auto& t : types) counts[t] += 1;
    return counts;
}

// Types with strictly more than min_instances transitive instances, sorted
// by depth then id.
inline std::vector<std::string> eligible_types(const TypeDag& dag, const TypeContext& ctx,
                                               std::size_t min_instances = 1000) {
    auto counts = instance_counts(ctx);
    std::vector<std::string> out;
    for (const auto& [t, n] : counts)
        if (n > min_instances && dag.has_node(t)) out.push_back(t);
    std::sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
        int da = dag.depth.count(a) ? dag.depth.at(a) : std::numeric_limits<int>::max();
        int db = dag.depth.count(b) ? dag.depth.at(b) : std::numeric_limits<int>::max();
        return da != db ? da < db : a < b;
    });
    return out;
}

struct SampleSplit {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};

// Stratified sampling of a type's entity instances. Strata are the type's
// immediate children (an entity falls into the first child, by id order, it
// instantiates) plus a direct-instance stratum. Per stratum, a 10% test
// share is held out first, then floor(fraction * n) entities are sampled for
// training from the remainder (at least one when the stratum is non-empty).
inline SampleSplit stratified_sample(const TypeDag& dag, const std::string& type_id,
                                     const TypeContext& ctx, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("fraction must be in (0, 1]");
    if (!dag.has_node(type_id)) throw Error("unknown type '" + type_id + "'");

    std::vector<std::string> instances;
    for (const auto& [eid, types] : ctx.entity_types)
        if (std::binary_search(types.begin(), types.end(), type_id)) instances.push_back(eid);
    if (instances.empty()) throw Error("type '" + type_id + "' has no entity instances");
    std::sort(instances.begin(), instances.end());

    auto children_map = dag.children();
    const auto& children = children_map[type_id];

    std::map<std::string, std::vector<std::string>> strata;  // stratum key -> entity ids
    for (const auto& eid : instances) {
        std::string stratum = "";  // direct instances
        for (const auto& c : children) {
            if (ctx.is_instance(eid, c)) {
                stratum = c;
                break;
            }
        }
        strata[stratum].push_back(eid);
    }

    SampleSplit split;
    std::uint64_t stratum_index = 0;
    for (auto& [key, members] : strata) {
        rng::Rng r(seed, stratum_index++);
        r.shuffle(members);
        const std::size_t n = members.size();
        std::size_t n_test = (n + 5) / 10;  // rounded 10%
        if (n_test >= n) n_test = n - 1;
        std::size_t n_train = static_cast<std::size_t>(fraction * static_cast<double>(n));
        n_train = std::min(n_train, n - n_test);
        if (n_train == 0 && n - n_test > 0) n_train = 1;
        for (std::size_t i = 0; i < n_test; ++i) split.test_ids.push_back(members[i]);
        for (std::size_t i = n_test; i < n_test + n_train; ++i) split.train_ids.push_back(members[i]);
    }
    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.test_ids.begin(), split.test_ids.end());
    return split;
}

}  // namespace newscite::taxonomy
