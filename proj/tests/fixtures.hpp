#pragma once

#include <random>
#include <vector>

#include "voc/alpha.hpp"
#include "voc/complex.hpp"

namespace fixtures {

using voc::Filtration;
using voc::Simplex;

/// Filtration whose value equals the index.
inline Filtration by_index(std::vector<Simplex> simplices, int ambient_dim = 0) {
    std::vector<double> values(simplices.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i + 1);
    return Filtration(std::move(simplices), std::move(values), ambient_dim);
}

/// A filled triangle: one loop born at 6, killed at 7.
inline Filtration filled_triangle() {
    return by_index({{0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2}}, 2);
}

/// Square boundary with no fill: the loop born at 8 never dies.
inline Filtration hollow_square() {
    return by_index({{0}, {1}, {2}, {3}, {0, 1}, {1, 2}, {2, 3}, {0, 3}});
}

/// Two triangles glued along an edge plus a third one. The pair (9, 12) has a
/// three-edge optimal cycle while its optimal volume boundary has four edges.
inline Filtration cycle_vs_volume() {
    return by_index({{0}, {1}, {2}, {3},
                     {0, 1}, {0, 3}, {1, 3}, {0, 2}, {1, 2}, {2, 3},
                     {0, 2, 3}, {1, 2, 3}, {0, 1, 2}},
                    2);
}

/// The pair (11, 15) has two different volumes of size two.
inline Filtration tied_volume() {
    return by_index({{0}, {1}, {2}, {3}, {4},
                     {0, 2}, {1, 3}, {2, 3}, {1, 4}, {2, 4}, {0, 1}, {1, 2},
                     {1, 2, 3}, {1, 2, 4}, {0, 1, 2}},
                    2);
}

inline voc::PointCloud random_cloud(std::mt19937_64& rng, int dim, int n, bool weighted = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> w(0.0, 0.002);
    voc::PointCloud pc;
    for (int i = 0; i < n; ++i) {
        std::vector<double> p(static_cast<std::size_t>(dim));
        for (auto& x : p) x = u(rng);
        pc.points.push_back(std::move(p));
    }
    if (weighted) {
        pc.weights.emplace();
        for (int i = 0; i < n; ++i) pc.weights->push_back(w(rng));
    }
    return pc;
}

/// Filtration with explicit level values; the list order is the index order.
inline Filtration with_levels(std::vector<std::pair<Simplex, double>> entries, int ambient_dim = 0) {
    std::vector<Simplex> simplices;
    std::vector<double> values;
    for (auto& [s, v] : entries) {
        simplices.push_back(s);
        values.push_back(v);
    }
    return Filtration(std::move(simplices), std::move(values), ambient_dim);
}

/// Two loops on four vertices with D1 = {(2, 5), (3, 4)} by level. The
/// shortest cycle of (3, 4) is the triangle 0-1-2; its optimal volume is two
/// triangles bounded by the square 0-2-1-3.
inline Filtration short_cycle_long_volume() {
    return with_levels({{{0}, 0}, {{1}, 0}, {{2}, 0}, {{3}, 0},
                        {{0, 1}, 1}, {{0, 3}, 1}, {{0, 2}, 1},
                        {{1, 3}, 2},
                        {{1, 2}, 3},
                        {{2, 3}, 4}, {{0, 2, 3}, 4}, {{1, 2, 3}, 4},
                        {{0, 1, 2}, 5}},
                       2);
}

/// Square boundary completed at level 2 and never filled: D1 = {(2, inf)}.
inline Filtration open_square_levels() {
    return with_levels({{{0}, 0}, {{1}, 0}, {{2}, 0}, {{3}, 0},
                        {{0, 1}, 1}, {{1, 2}, 1}, {{2, 3}, 1}, {{0, 3}, 2}});
}

}  // namespace fixtures
