#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/error.hpp"

// Dependency-tree kernel: counts greedily matched common subtrees anchored
// at every node pair, normalized so that K(a, a) = 1. Two nodes match when
// their (token, pos) labels are equal; their children are paired per
// dependency relation in (token, pos, position) order.

namespace newscite::kernel {

struct DependencyTree {
    struct Node {
        std::string token;
        std::string pos;
    };
    struct ChildEdge {
        std::string relation;
        int child = 0;
    };

    std::vector<Node> nodes;
    std::vector<std::vector<ChildEdge>> children;  // per node, sorted for greedy matching
    int root = -1;

    std::size_t size() const { return nodes.size(); }

    static DependencyTree from_annotation(const corpus::AnnotationLayer& layer) {
        DependencyTree tree;
        const int n = static_cast<int>(layer.tokens.size());
        if (n == 0) throw Error("cannot build a dependency tree from an empty annotation");
        for (const auto& tok : layer.tokens) tree.nodes.push_back({tok.surface, tok.pos});
        tree.children.resize(n);
        std::vector<int> indegree(n, 0);
        for (const auto& dep : layer.dependencies) {
            if (dep.dependent < 0 || dep.dependent >= n || dep.head < -1 || dep.head >= n)
                throw Error("dependency index out of range in '" + layer.unit_id + "'");
            if (dep.head == -1) {
                if (tree.root != -1) throw Error("annotation '" + layer.unit_id + "' has multiple roots");
                tree.root = dep.dependent;
            } else {
                tree.children[dep.head].push_back({dep.relation, dep.dependent});
                indegree[dep.dependent] += 1;
            }
        }
        if (tree.root == -1) throw Error("annotation '" + layer.unit_id + "' has no root");
        for (int i = 0; i < n; ++i) {
            const int expected = i == tree.root ? 0 : 1;
            if (indegree[i] != expected)
                throw Error("annotation '" + layer.unit_id + "' is not a tree");
        }
        tree.sort_children();
        tree.check_acyclic();
        return tree;
    }

    void sort_children() {
        for (auto& cs : children) {
            std::sort(cs.begin(), cs.end(), [&](const ChildEdge& a, const ChildEdge& b) {
                if (a.relation != b.relation) return a.relation < b.relation;
                if (nodes[a.child].token != nodes[b.child].token)
                    return nodes[a.child].token < nodes[b.child].token;
                if (nodes[a.child].pos != nodes[b.child].pos) return nodes[a.child].pos < nodes[b.child].pos;
                return a.child < b.child;
            });
        }
    }

private:
    void check_acyclic() const {
        std::vector<char> seen(nodes.size(), 0);
        std::vector<int> stack{root};
        std::size_t visited = 0;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (seen[v]) throw Error("dependency tree contains a cycle");
            seen[v] = 1;
            ++visited;
            for (const auto& e : children[v]) stack.push_back(e.child);
        }
        if (visited != nodes.size()) throw Error("dependency tree is not connected");
    }
};

namespace detail {

// Matched-subtree size anchored at (v1, v2): 0 when the labels differ, else
// 1 plus the match sizes of greedily paired children. Children sharing a
// relation are walked in sorted order and paired on equal (token, pos).
inline double common_subtree(const DependencyTree& a, const DependencyTree& b, int v1, int v2,
                             std::vector<double>& memo) {
    const std::size_t idx = static_cast<std::size_t>(v1) * b.size() + static_cast<std::size_t>(v2);
    if (memo[idx] >= 0.0) return memo[idx];
    if (a.nodes[v1].token != b.nodes[v2].token || a.nodes[v1].pos != b.nodes[v2].pos) {
        memo[idx] = 0.0;
        return 0.0;
    }
    double total = 1.0;
    const auto& ca = a.children[v1];
    const auto& cb = b.children[v2];
    std::size_t i = 0, j = 0;
    auto label_less = [&](const DependencyTree::ChildEdge& x, const DependencyTree& tx,
                          const DependencyTree::ChildEdge& y, const DependencyTree& ty) {
        if (x.relation != y.relation) return x.relation < y.relation;
        if (tx.nodes[x.child].token != ty.nodes[y.child].token)
            return tx.nodes[x.child].token < ty.nodes[y.child].token;
        return tx.nodes[x.child].pos < ty.nodes[y.child].pos;
    };
    while (i < ca.size() && j < cb.size()) {
        if (label_less(ca[i], a, cb[j], b)) {
            ++i;
        } else if (label_less(cb[j], b, ca[i], a)) {
            ++j;
        } else {
            total += common_subtree(a, b, ca[i].child, cb[j].child, memo);
            ++i;
            ++j;
        }
    }
    memo[idx] = total;
    return total;
}

inline double raw_kernel(const DependencyTree& a, const DependencyTree& b) {
    std::vector<double> memo(a.size() * b.size(), -1.0);
    double total = 0.0;
    for (int v1 = 0; v1 < static_cast<int>(a.size()); ++v1)
        for (int v2 = 0; v2 < static_cast<int>(b.size()); ++v2)
            total += common_subtree(a, b, v1, v2, memo);
    return total;
}

}  // namespace detail

// Normalized kernel in [0, 1]; 1 for identical trees, 0 when no node labels
// are shared.
inline double tree_kernel(const DependencyTree& a, const DependencyTree& b) {
    if (a.size() == 0 || b.size() == 0) throw Error("tree kernel requires non-empty trees");
    const double cross = detail::raw_kernel(a, b);
    if (cross == 0.0) return 0.0;
    return cross / std::sqrt(detail::raw_kernel(a, a) * detail::raw_kernel(b, b));
}

}  // namespace newscite::kernel
