#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include "voc/complex.hpp"

namespace voc {

/// A birth-death pair. Essential classes have no death index and an
/// infinite death value.
struct PersistencePair {
    int degree = 0;
    Index birth_index = kNoIndex;
    std::optional<Index> death_index;
    double birth_value = 0.0;
    double death_value = std::numeric_limits<double>::infinity();

    bool essential() const { return !death_index.has_value(); }
    bool zero_persistence() const { return !essential() && birth_value == death_value; }
    double persistence() const { return death_value - birth_value; }

    friend bool operator==(const PersistencePair& a, const PersistencePair& b) {
        return a.degree == b.degree && a.birth_index == b.birth_index && a.death_index == b.death_index;
    }
    friend bool operator<(const PersistencePair& a, const PersistencePair& b) {
        const Index inf = std::numeric_limits<Index>::max();
        return std::tuple(a.degree, a.birth_index, a.death_index.value_or(inf)) <
               std::tuple(b.degree, b.birth_index, b.death_index.value_or(inf));
    }
};

inline std::string to_string(const PersistencePair& p) {
    return "(" + std::to_string(p.birth_index) + ", " +
           (p.death_index ? std::to_string(*p.death_index) : std::string("inf")) + ")";
}

/// Sparse column sorted by row index; the last entry is the lowest one.
template <class C>
using Column = std::vector<std::pair<Index, C>>;

namespace detail {

/// a <- a + scale * b, both sorted.
template <class C>
void axpy(Column<C>& a, const Column<C>& b, C scale, Column<C>& scratch) {
    scratch.clear();
    scratch.reserve(a.size() + b.size());
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            scratch.push_back(*ia++);
        } else if (ia == a.end() || ib->first < ia->first) {
            scratch.emplace_back(ib->first, ib->second * scale);
            ++ib;
        } else {
            C c = ia->second + ib->second * scale;
            if (!CoeffTraits<C>::is_zero(c)) scratch.emplace_back(ia->first, c);
            ++ia;
            ++ib;
        }
    }
    a.swap(scratch);
}

template <class C>
Column<C> to_column(const Chain<C>& c) {
    return Column<C>(c.begin(), c.end());
}

template <class C>
Chain<C> to_chain(const Column<C>& col, int degree) {
    Chain<C> out(degree);
    for (const auto& [i, c] : col) out.add(i, c);
    return out;
}

}  // namespace detail

/// Result of the standard column reduction R = D V. Columns are 1-based
/// filtration indices; column 0 is unused.
template <class C>
struct ReducedMatrices {
    std::vector<Column<C>> r;
    std::vector<Column<C>> v;  // empty when V was not tracked
    std::vector<Index> pivot_column;  // row index -> column whose lowest one sits there

    Index size() const { return r.empty() ? 0 : static_cast<Index>(r.size()) - 1; }
    bool tracks_v() const { return !v.empty(); }
    Index low(Index j) const { return r[j].empty() ? kNoIndex : r[j].back().first; }
};

using Z2Reduction = ReducedMatrices<Z2>;
using RealReduction = ReducedMatrices<double>;

/// Standard left-to-right reduction of the boundary matrix over the field C.
template <class C = Z2>
ReducedMatrices<C> reduce(const Filtration& f, bool track_v = true) {
    const Index n = f.size();
    ReducedMatrices<C> m;
    m.r.resize(n + 1);
    if (track_v) m.v.resize(n + 1);
    m.pivot_column.assign(n + 1, kNoIndex);
    Column<C> scratch;
    for (Index j = 1; j <= n; ++j) {
        Column<C> col = detail::to_column(boundary<C>(f, j));
        Column<C> vcol;
        if (track_v) vcol.emplace_back(j, CoeffTraits<C>::one());
        while (!col.empty()) {
            const Index l = col.back().first;
            const Index k = m.pivot_column[l];
            if (k == kNoIndex) break;
            const C scale = CoeffTraits<C>::zero() - col.back().second / m.r[k].back().second;
            detail::axpy(col, m.r[k], scale, scratch);
            if (track_v) detail::axpy(vcol, m.v[k], scale, scratch);
        }
        if (!col.empty()) m.pivot_column[col.back().first] = j;
        m.r[j] = std::move(col);
        if (track_v) m.v[j] = std::move(vcol);
    }
    return m;
}

/// Every pair of every degree, zero-persistence pairs included, sorted.
template <class C>
std::vector<PersistencePair> all_pairs(const Filtration& f, const ReducedMatrices<C>& m) {
    std::vector<PersistencePair> out;
    for (Index j = 1; j <= m.size(); ++j) {
        const Index i = m.low(j);
        if (i != kNoIndex) {
            out.push_back({f.dim(i), i, j, f.value(i), f.value(j)});
        } else if (m.pivot_column[j] == kNoIndex) {
            out.push_back({f.dim(j), j, std::nullopt, f.value(j), std::numeric_limits<double>::infinity()});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct DiagramOptions {
    bool include_zero_persistence = false;
};

template <class C>
std::vector<PersistencePair> diagram(const Filtration& f, const ReducedMatrices<C>& m, int degree,
                                     DiagramOptions opt = {}) {
    std::vector<PersistencePair> out;
    for (auto& p : all_pairs(f, m))
        if (p.degree == degree && (opt.include_zero_persistence || !p.zero_persistence())) out.push_back(p);
    return out;
}

inline std::vector<PersistencePair> diagram(const Filtration& f, int degree, DiagramOptions opt = {}) {
    return diagram(f, reduce<Z2>(f, false), degree, opt);
}

/// Locates `pair` in the reduction, throwing LookupError when it is not a pair.
template <class C>
void require_pair(const ReducedMatrices<C>& m, const PersistencePair& pair) {
    const Index b = pair.birth_index;
    if (b < 1 || b > m.size()) throw LookupError("pair " + to_string(pair) + " not in diagram");
    if (pair.death_index) {
        const Index d = *pair.death_index;
        if (d < 1 || d > m.size() || m.low(d) != b) throw LookupError("pair " + to_string(pair) + " not in diagram");
    } else if (!m.r[b].empty() || m.pivot_column[b] != kNoIndex) {
        throw LookupError("pair " + to_string(pair) + " not in diagram");
    }
}

/// Persistence cycle of a pair: the reduced column of the death simplex, or
/// for an essential class the V column of the birth simplex.
template <class C>
Chain<C> persistence_cycle(const Filtration& f, const ReducedMatrices<C>& m, const PersistencePair& pair) {
    require_pair(m, pair);
    const int q = f.dim(pair.birth_index);
    if (pair.death_index) return detail::to_chain(m.r[*pair.death_index], q);
    if (!m.tracks_v()) throw std::logic_error("essential cycles need a reduction that tracks V");
    return detail::to_chain(m.v[pair.birth_index], q);
}

/// True iff `z` lies in the span of the reduced boundary columns with index <= k.
template <class C>
bool in_boundary_space(const ReducedMatrices<C>& m, const Chain<C>& z, Index k) {
    Column<C> col = detail::to_column(z);
    Column<C> scratch;
    while (!col.empty()) {
        const Index l = col.back().first;
        const Index j = l < static_cast<Index>(m.pivot_column.size()) ? m.pivot_column[l] : kNoIndex;
        if (j == kNoIndex || j > k) return false;
        const C scale = CoeffTraits<C>::zero() - col.back().second / m.r[j].back().second;
        detail::axpy(col, m.r[j], scale, scratch);
    }
    return true;
}

/// Checks that `z` is a persistence cycle for `pair`: a cycle whose last
/// simplex is the birth simplex, that becomes a boundary exactly at the
/// death index (or never, for an essential pair).
template <class C>
bool check_cycle_conditions(const Filtration& f, const ReducedMatrices<C>& m, const PersistencePair& pair,
                            const Chain<C>& z) {
    const Index b = pair.birth_index;
    if (b < 1 || b > f.size()) return false;
    const int q = f.dim(b);
    for (const auto& [idx, c] : z)
        if (idx < 1 || idx > f.size() || f.dim(idx) != q) return false;
    if (z.max_index() != b) return false;
    if (!boundary(f, z).empty()) {
        if constexpr (std::is_same_v<C, double>) {
            for (const auto& [_, c] : boundary(f, z))
                if (std::abs(c) > 1e-7) return false;
        } else {
            return false;
        }
    }
    if (pair.death_index) {
        const Index d = *pair.death_index;
        return !in_boundary_space(m, z, d - 1) && in_boundary_space(m, z, d);
    }
    return !in_boundary_space(m, z, f.size());
}

}  // namespace voc
