#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "newscite/rng.hpp"
#include "newscite/tree_kernel.hpp"

using namespace newscite;
using kernel::DependencyTree;

namespace {

DependencyTree build_tree(const std::vector<std::pair<std::string, std::string>>& nodes,
                          const std::vector<std::tuple<int, int, std::string>>& edges) {
    corpus::AnnotationLayer layer;
    layer.unit_id = "fixture";
    for (const auto& [tok, pos] : nodes) layer.tokens.push_back({tok, pos});
    for (const auto& [head, dep, rel] : edges) layer.dependencies.push_back({head, dep, rel});
    return DependencyTree::from_annotation(layer);
}

// Oracle: materializes the greedily matched pair set anchored at every node
// pair with an explicit worklist, then counts pairs.
long oracle_matched_pairs(const DependencyTree& a, const DependencyTree& b, int v1, int v2) {
    if (a.nodes[v1].token != b.nodes[v2].token || a.nodes[v1].pos != b.nodes[v2].pos) return 0;
    long count = 0;
    std::vector<std::pair<int, int>> work{{v1, v2}};
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        ++count;
        // bucket children by (relation, token, pos); pair bucket members in
        // sorted-position order
        std::map<std::tuple<std::string, std::string, std::string>, std::vector<int>> ax, by;
        for (const auto& e : a.children[x])
            ax[{e.relation, a.nodes[e.child].token, a.nodes[e.child].pos}].push_back(e.child);
        for (const auto& e : b.children[y])
            by[{e.relation, b.nodes[e.child].token, b.nodes[e.child].pos}].push_back(e.child);
        for (auto& [label, xs] : ax) {
            auto it = by.find(label);
            if (it == by.end()) continue;
            auto& ys = it->second;
            std::sort(xs.begin(), xs.end());
            std::sort(ys.begin(), ys.end());
            for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i)
                work.emplace_back(xs[i], ys[i]);
        }
    }
    return count;
}

double oracle_kernel(const DependencyTree& a, const DependencyTree& b) {
    auto raw = [](const DependencyTree& x, const DependencyTree& y) {
        long total = 0;
        for (int i = 0; i < static_cast<int>(x.size()); ++i)
            for (int j = 0; j < static_cast<int>(y.size()); ++j)
                total += oracle_matched_pairs(x, y, i, j);
        return static_cast<double>(total);
    };
    const double cross = raw(a, b);
    if (cross == 0.0) return 0.0;
    return cross / std::sqrt(raw(a, a) * raw(b, b));
}

DependencyTree random_tree(rng::Rng& rng, std::size_t max_nodes) {
    const std::vector<std::string> toks{"said", "alice", "bob", "it"};
    const std::vector<std::string> poses{"VBD", "NNP"};
    const std::vector<std::string> rels{"nsubj", "dobj"};
    const std::size_t n = 1 + rng.next_index(max_nodes);
    std::vector<std::pair<std::string, std::string>> nodes;
    std::vector<std::tuple<int, int, std::string>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.emplace_back(toks[rng.next_index(toks.size())], poses[rng.next_index(poses.size())]);
        if (i == 0) {
            edges.emplace_back(-1, 0, "root");
        } else {
            edges.emplace_back(static_cast<int>(rng.next_index(i)), static_cast<int>(i),
                               rels[rng.next_index(rels.size())]);
        }
    }
    return build_tree(nodes, edges);
}

}  // namespace

TEST_CASE("identical trees score 1") {
    auto t = build_tree({{"said", "VBD"}, {"alice", "NNP"}, {"it", "PRP"}},
                        {{-1, 0, "root"}, {0, 1, "nsubj"}, {0, 2, "dobj"}});
    CHECK(kernel::tree_kernel(t, t) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("disjoint vocabularies score 0") {
    auto a = build_tree({{"ran", "VBD"}, {"dog", "NN"}}, {{-1, 0, "root"}, {0, 1, "nsubj"}});
    auto b = build_tree({{"flew", "VBD"}, {"bird", "NN"}}, {{-1, 0, "root"}, {0, 1, "nsubj"}});
    CHECK(kernel::tree_kernel(a, b) == 0.0);
}

TEST_CASE("hand-computed pair") {
    // Shared root and subject; objects differ.
    // K_raw(a,b): roots 1+1 = 2, (alice,alice) = 1 -> 3
    // K_raw(a,a) = K_raw(b,b): root anchored 3, alice 1, object 1 -> 5
    // K = 3 / sqrt(25) = 0.6
    auto a = build_tree({{"said", "VBD"}, {"alice", "NNP"}, {"it", "PRP"}},
                        {{-1, 0, "root"}, {0, 1, "nsubj"}, {0, 2, "dobj"}});
    auto b = build_tree({{"said", "VBD"}, {"alice", "NNP"}, {"that", "IN"}},
                        {{-1, 0, "root"}, {0, 1, "nsubj"}, {0, 2, "dobj"}});
    CHECK(kernel::tree_kernel(a, b) == Catch::Approx(0.6).margin(1e-12));
}

TEST_CASE("four-node fixture matches the enumeration oracle") {
    auto a = build_tree({{"said", "VBD"}, {"alice", "NNP"}, {"bob", "NNP"}, {"it", "PRP"}},
                        {{-1, 0, "root"}, {0, 1, "nsubj"}, {0, 2, "dobj"}, {2, 3, "appos"}});
    auto b = build_tree({{"said", "VBD"}, {"bob", "NNP"}, {"alice", "NNP"}, {"it", "PRP"}},
                        {{-1, 0, "root"}, {0, 1, "nsubj"}, {0, 2, "dobj"}, {1, 3, "appos"}});
    CHECK(kernel::tree_kernel(a, b) == Catch::Approx(oracle_kernel(a, b)).margin(1e-12));
}

TEST_CASE("kernel equals the oracle on random small trees and is symmetric") {
    rng::Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_tree(rng, 6);
        auto b = random_tree(rng, 6);
        const double ab = kernel::tree_kernel(a, b);
        CHECK(ab == Catch::Approx(oracle_kernel(a, b)).margin(1e-12));
        CHECK(ab == Catch::Approx(kernel::tree_kernel(b, a)).margin(1e-12));
        CHECK(kernel::tree_kernel(a, a) == Catch::Approx(1.0).margin(1e-12));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-12);
    }
}

TEST_CASE("invalid annotations are rejected") {
    CHECK_THROWS(kernel::tree_kernel(DependencyTree{}, DependencyTree{}));
    // two roots
    corpus::AnnotationLayer layer;
    layer.unit_id = "bad";
    layer.tokens = {{"a", "DT"}, {"b", "NN"}};
    layer.dependencies = {{-1, 0, "root"}, {-1, 1, "root"}};
    CHECK_THROWS(DependencyTree::from_annotation(layer));
    // cycle / non-tree: node 1 has two heads
    corpus::AnnotationLayer twice;
    twice.unit_id = "bad2";
    twice.tokens = {{"a", "DT"}, {"b", "NN"}};
    twice.dependencies = {{-1, 0, "root"}, {0, 1, "dep"}, {1, 1, "dep"}};
    CHECK_THROWS(DependencyTree::from_annotation(twice));
}
