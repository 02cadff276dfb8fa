#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "voc/complex.hpp"
#include "voc/persistence.hpp"

namespace voc {

/// The complex does not satisfy the codimension-one preconditions
/// (pure, top dimension equal to the ambient one, every facet shared by at
/// most two top cells).
class ConditionViolation : public InputError {
public:
    using InputError::InputError;
};

/// Dual cells are top simplices (by filtration index) plus the outer cell,
/// which is numbered size()+1 so that it compares above every real cell.
struct DualAdjacency {
    int top_dim = 0;
    Index outer = kNoIndex;
    /// For each (top_dim-1)-simplex index, its two dual cells (lower first).
    std::vector<std::pair<Index, Index>> sides;

    bool is_facet(Index k) const { return sides[k].first != kNoIndex; }
};

inline DualAdjacency dual_adjacency(const Filtration& f) {
    DualAdjacency adj;
    const int n = f.max_dim();
    if (n < 1) throw ConditionViolation("complex has no top cells of positive dimension");
    if (f.ambient_dim() != n)
        throw ConditionViolation("top dimension " + std::to_string(n) + " differs from ambient dimension " +
                                 std::to_string(f.ambient_dim()));
    adj.top_dim = n;
    adj.outer = f.size() + 1;
    adj.sides.assign(static_cast<std::size_t>(f.size() + 1), {kNoIndex, kNoIndex});
    for (Index k = 1; k <= f.size(); ++k) {
        const int d = f.dim(k);
        if (d == n) continue;
        auto up = f.immediate_cofaces(k);
        if (up.empty())
            throw ConditionViolation("simplex " + to_string(f.simplex(k)) + " is not a face of a top simplex");
        if (d != n - 1) continue;
        if (up.size() > 2)
            throw ConditionViolation("facet " + to_string(f.simplex(k)) + " has " + std::to_string(up.size()) +
                                     " top cofaces");
        adj.sides[k] = up.size() == 2 ? std::pair{up[0], up[1]} : std::pair{up[0], adj.outer};
    }
    return adj;
}

/// Forest of dual cells built by the reverse sweep. Edges (child -> parent,
/// label) are kept exactly as created; root queries go through a separate
/// path-compressed parent array so compression never alters the edges.
class PersistenceForest {
public:
    struct Stats {
        std::uint64_t find_calls = 0;
        std::uint64_t probes = 0;
        std::uint64_t unions = 0;
    };

    PersistenceForest() = default;

    /// An empty forest over `size` filtration indices with top dimension `top_dim`.
    PersistenceForest(Index size, int top_dim)
        : size_(size),
          top_dim_(top_dim),
          present_(static_cast<std::size_t>(size + 2), false),
          parent_(static_cast<std::size_t>(size + 2), kNoIndex),
          label_(static_cast<std::size_t>(size + 2), kNoIndex),
          shortcut_(static_cast<std::size_t>(size + 2), kNoIndex) {
        present_[outer()] = true;
    }

    Index outer() const { return size_ + 1; }
    int top_dim() const { return top_dim_; }
    Index filtration_size() const { return size_; }
    bool contains(Index node) const { return node >= 1 && node <= outer() && present_[node]; }
    Index parent(Index node) const { return parent_[node]; }
    Index label(Index node) const { return label_[node]; }
    const Stats& stats() const { return stats_; }
    void reset_stats() { stats_ = {}; }

    std::size_t node_count() const { return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), true)); }

    void add_node(Index node) { present_[node] = true; }

    /// Root of `node` through the accelerator, compressing the visited path.
    Index find_root(Index node) {
        ++stats_.find_calls;
        Index r = node;
        ++stats_.probes;
        while (shortcut_[r] != kNoIndex) {
            r = shortcut_[r];
            ++stats_.probes;
        }
        while (shortcut_[node] != kNoIndex && shortcut_[node] != r) {
            Index next = shortcut_[node];
            shortcut_[node] = r;
            node = next;
        }
        return r;
    }

    /// Root obtained by following the recorded edges only.
    Index naive_root(Index node) const {
        while (parent_[node] != kNoIndex) node = parent_[node];
        return node;
    }

    /// Attaches root `child` under root `parent` with the given label.
    void link(Index child, Index parent, Index label) {
        parent_[child] = parent;
        label_[child] = label;
        shortcut_[child] = parent;
        ++stats_.unions;
    }

    /// Builds the child lists used by descendant queries.
    void finalize() {
        child_offsets_.assign(static_cast<std::size_t>(outer() + 2), 0);
        for (Index v = 1; v <= outer(); ++v)
            if (parent_[v] != kNoIndex) ++child_offsets_[parent_[v] + 1];
        for (std::size_t i = 1; i < child_offsets_.size(); ++i) child_offsets_[i] += child_offsets_[i - 1];
        children_.assign(static_cast<std::size_t>(child_offsets_.back()), kNoIndex);
        std::vector<Index> fill(child_offsets_.begin(), child_offsets_.end() - 1);
        for (Index v = 1; v <= outer(); ++v)
            if (parent_[v] != kNoIndex) children_[fill[parent_[v]]++] = v;
    }

    std::span<const Index> children(Index node) const {
        return {children_.data() + child_offsets_[node],
                static_cast<std::size_t>(child_offsets_[node + 1] - child_offsets_[node])};
    }

    /// `node` and all nodes below it, sorted.
    std::vector<Index> descendants(Index node) const {
        std::vector<Index> out, stack{node};
        while (!stack.empty()) {
            Index v = stack.back();
            stack.pop_back();
            out.push_back(v);
            for (Index c : children(v)) stack.push_back(c);
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Every child -> parent edge as (child, parent, label), by child index.
    std::vector<std::tuple<Index, Index, Index>> edges() const {
        std::vector<std::tuple<Index, Index, Index>> out;
        for (Index v = 1; v <= outer(); ++v)
            if (parent_[v] != kNoIndex) out.emplace_back(v, parent_[v], label_[v]);
        return out;
    }

private:
    Index size_ = 0;
    int top_dim_ = 0;
    std::vector<bool> present_;
    std::vector<Index> parent_;
    std::vector<Index> label_;
    std::vector<Index> shortcut_;
    std::vector<Index> child_offsets_;
    std::vector<Index> children_;
    Stats stats_;
};

inline Index find_root(Index node, PersistenceForest& forest) { return forest.find_root(node); }

/// Reverse sweep over the filtration: top simplices become nodes, and each
/// facet joins the trees of its two dual cells, hanging the root with the
/// smaller index under the one with the larger index.
inline PersistenceForest compute_forest(const Filtration& f, const DualAdjacency& adj) {
    PersistenceForest forest(f.size(), adj.top_dim);
    for (Index k = f.size(); k >= 1; --k) {
        const int d = f.dim(k);
        if (d == adj.top_dim) {
            forest.add_node(k);
        } else if (d == adj.top_dim - 1) {
            const auto [s, t] = adj.sides[k];
            const Index rs = forest.find_root(s);
            const Index rt = forest.find_root(t);
            if (rs == rt) continue;
            if (rs > rt) forest.link(rt, rs, k); else forest.link(rs, rt, k);
        }
    }
    forest.finalize();
    return forest;
}

inline PersistenceForest compute_forest(const Filtration& f) { return compute_forest(f, dual_adjacency(f)); }

/// Codimension-one diagram read off the forest edges: each edge
/// child --label--> parent is the pair (label, child).
inline std::vector<PersistencePair> diagram_from_forest(const PersistenceForest& forest, const Filtration& f,
                                                        DiagramOptions opt = {}) {
    std::vector<PersistencePair> out;
    for (const auto& [child, parent, label] : forest.edges()) {
        PersistencePair p{forest.top_dim() - 1, label, child, f.value(label), f.value(child)};
        if (opt.include_zero_persistence || !p.zero_persistence()) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline void require_forest_pair(const PersistenceForest& forest, const PersistencePair& pair) {
    if (!pair.death_index || !forest.contains(*pair.death_index) || *pair.death_index == forest.outer() ||
        forest.parent(*pair.death_index) == kNoIndex || forest.label(*pair.death_index) != pair.birth_index)
        throw LookupError("pair " + to_string(pair) + " is not an edge of the persistence forest");
}

/// Optimal volume of a codimension-one pair: the death cell and everything below it.
inline std::vector<Index> volume_from_forest(const PersistenceForest& forest, const PersistencePair& pair) {
    require_forest_pair(forest, pair);
    return forest.descendants(*pair.death_index);
}

/// Pair-level tree: a pair's parent is the pair whose death cell is the
/// parent node of its own death cell; pairs hanging off the outer cell are roots.
struct PersistenceTree {
    std::vector<PersistencePair> pairs;          // sorted by death index
    std::vector<std::optional<Index>> parent;    // death index of the parent pair
    std::vector<std::vector<Index>> children;    // death indices of direct children

    std::optional<std::size_t> position(Index death) const {
        auto it = std::lower_bound(pairs.begin(), pairs.end(), death,
                                   [](const PersistencePair& p, Index d) { return *p.death_index < d; });
        if (it == pairs.end() || *it->death_index != death) return std::nullopt;
        return static_cast<std::size_t>(it - pairs.begin());
    }

    /// Death indices of all strict descendants of the pair dying at `death`.
    std::vector<Index> descendants(Index death) const {
        std::vector<Index> out, stack;
        auto pos = position(death);
        if (!pos) throw LookupError("no pair dies at index " + std::to_string(death));
        stack = children[*pos];
        while (!stack.empty()) {
            Index d = stack.back();
            stack.pop_back();
            out.push_back(d);
            for (Index c : children[*position(d)]) stack.push_back(c);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline PersistenceTree persistence_tree(const PersistenceForest& forest, const Filtration& f) {
    PersistenceTree tree;
    for (const auto& [child, parent, label] : forest.edges())
        tree.pairs.push_back({forest.top_dim() - 1, label, child, f.value(label), f.value(child)});
    std::sort(tree.pairs.begin(), tree.pairs.end(),
              [](const auto& a, const auto& b) { return *a.death_index < *b.death_index; });
    tree.parent.assign(tree.pairs.size(), std::nullopt);
    tree.children.assign(tree.pairs.size(), {});
    for (std::size_t i = 0; i < tree.pairs.size(); ++i) {
        const Index p = forest.parent(*tree.pairs[i].death_index);
        if (p == forest.outer()) continue;
        tree.parent[i] = p;
        tree.children[*tree.position(p)].push_back(*tree.pairs[i].death_index);
    }
    return tree;
}

}  // namespace voc
