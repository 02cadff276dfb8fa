#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "voc/complex.hpp"

namespace voc {

/// Points in R^2 or R^3, optionally weighted by squared radii.
struct PointCloud {
    std::vector<std::vector<double>> points;
    std::optional<std::vector<double>> weights;

    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
    std::size_t size() const { return points.size(); }
    double weight(std::size_t i) const { return weights ? (*weights)[i] : 0.0; }
};

/// Raised when the input is not in general position. `subset` names the
/// offending point ids.
class DegeneracyError : public InputError {
public:
    DegeneracyError(const std::string& what, std::vector<Vertex> subset)
        : InputError(what + describe(subset)), subset_(std::move(subset)) {}
    const std::vector<Vertex>& subset() const { return subset_; }

private:
    static std::string describe(const std::vector<Vertex>& s) {
        if (s.empty()) return "";
        std::string out = " (points";
        for (auto v : s) out += " " + std::to_string(v);
        return out + ")";
    }
    std::vector<Vertex> subset_;
};

/// Adds uniform noise in [-amplitude, amplitude]^n, reproducible from `seed`.
inline PointCloud jitter(PointCloud pc, std::uint64_t seed, double amplitude = 1e-6) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    for (auto& p : pc.points)
        for (auto& x : p) x += u(rng);
    return pc;
}

namespace geometry {

/// Sphere orthogonal to the weighted points of a simplex, centred in the
/// simplex's affine hull. `radius2` is the power radius (may be negative).
struct PowerSphere {
    std::vector<double> center;
    double radius2 = 0.0;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double dist2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

/// Solves the small dense system g x = r in place; false if singular
/// relative to `scale`.
inline bool solve_small(std::vector<std::vector<double>> g, std::vector<double> r, std::vector<double>& x,
                        double scale) {
    const std::size_t k = r.size();
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        for (std::size_t i = c + 1; i < k; ++i)
            if (std::abs(g[i][c]) > std::abs(g[p][c])) p = i;
        if (std::abs(g[p][c]) <= 1e-12 * scale) return false;
        std::swap(g[p], g[c]);
        std::swap(r[p], r[c]);
        for (std::size_t i = c + 1; i < k; ++i) {
            const double f = g[i][c] / g[c][c];
            for (std::size_t j = c; j < k; ++j) g[i][j] -= f * g[c][j];
            r[i] -= f * r[c];
        }
    }
    x.assign(k, 0.0);
    for (std::size_t c = k; c-- > 0;) {
        double s = r[c];
        for (std::size_t j = c + 1; j < k; ++j) s -= g[c][j] * x[j];
        x[c] = s / g[c][c];
    }
    return true;
}

/// Power sphere of the points `ids`; std::nullopt if they are affinely dependent.
inline std::optional<PowerSphere> power_sphere(const PointCloud& pc, std::span<const Vertex> ids) {
    const auto& p0 = pc.points[ids[0]];
    const std::size_t k = ids.size() - 1;
    std::vector<std::vector<double>> u(k, std::vector<double>(p0.size()));
    double scale = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t d = 0; d < p0.size(); ++d) u[i][d] = pc.points[ids[i + 1]][d] - p0[d];
        scale = std::max(scale, dot(u[i], u[i]));
    }
    std::vector<std::vector<double>> g(k, std::vector<double>(k));
    std::vector<double> r(k), lam;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) g[i][j] = 2.0 * dot(u[i], u[j]);
        r[i] = dot(u[i], u[i]) - pc.weight(ids[i + 1]) + pc.weight(ids[0]);
    }
    if (k > 0 && !solve_small(g, r, lam, std::max(scale, 1e-300) * 1e-3)) return std::nullopt;
    PowerSphere s;
    s.center = p0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t d = 0; d < p0.size(); ++d) s.center[d] += lam[i] * u[i][d];
    s.radius2 = dist2(s.center, p0) - pc.weight(ids[0]);
    return s;
}

/// Power distance of point i to the sphere: negative means strictly inside.
inline double power_excess(const PointCloud& pc, const PowerSphere& s, std::size_t i) {
    return dist2(s.center, pc.points[i]) - pc.weight(i) - s.radius2;
}

/// Squared diameter of the bounding box; the scale for tolerances.
inline double scale2(const PointCloud& pc) {
    if (pc.points.empty()) return 1.0;
    const int n = pc.dim();
    double s = 0.0;
    for (int d = 0; d < n; ++d) {
        double lo = pc.points[0][d], hi = lo;
        for (const auto& p : pc.points) {
            lo = std::min(lo, p[d]);
            hi = std::max(hi, p[d]);
        }
        s += (hi - lo) * (hi - lo);
    }
    return std::max(s, 1e-300);
}

/// Unweighted circumradius of arbitrary coordinates (affine-hull centre).
inline double circumradius(const std::vector<std::vector<double>>& pts) {
    PointCloud pc;
    pc.points = pts;
    std::vector<Vertex> ids(pts.size());
    std::iota(ids.begin(), ids.end(), 0);
    auto s = power_sphere(pc, ids);
    return s ? std::sqrt(std::max(s->radius2, 0.0)) : 0.0;
}

}  // namespace geometry

namespace detail {

inline void check_cloud(const PointCloud& pc) {
    const int n = pc.dim();
    if (n != 2 && n != 3) throw InputError("point clouds must be 2- or 3-dimensional");
    for (const auto& p : pc.points) {
        if (static_cast<int>(p.size()) != n) throw InputError("points have inconsistent dimension");
        for (double x : p)
            if (!std::isfinite(x)) throw InputError("non-finite coordinate");
    }
    if (pc.weights && pc.weights->size() != pc.size()) throw InputError("weight count differs from point count");
    if (pc.size() < static_cast<std::size_t>(n + 1))
        throw InputError("need at least " + std::to_string(n + 1) + " points");
    std::vector<std::size_t> order(pc.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return pc.points[a] < pc.points[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (pc.points[order[i]] == pc.points[order[i - 1]])
            throw InputError("duplicate point " + std::to_string(order[i]));
}

inline double tolerance(const PointCloud& pc) { return 1e-9 * geometry::scale2(pc); }

/// Emptiness test for the power sphere of `ids`. Returns true when no other
/// point lies strictly inside; throws DegeneracyError for a point on it.
inline bool sphere_is_empty(const PointCloud& pc, std::span<const Vertex> ids, const geometry::PowerSphere& s,
                            double tol) {
    for (std::size_t i = 0; i < pc.size(); ++i) {
        if (std::find(ids.begin(), ids.end(), static_cast<Vertex>(i)) != ids.end()) continue;
        const double e = geometry::power_excess(pc, s, i);
        if (std::abs(e) <= tol) {
            std::vector<Vertex> subset(ids.begin(), ids.end());
            subset.push_back(static_cast<Vertex>(i));
            std::sort(subset.begin(), subset.end());
            throw DegeneracyError("co-spherical points", subset);
        }
        if (e < 0.0) return false;
    }
    return true;
}

inline bool affinely_independent(const PointCloud& pc, std::span<const Vertex> ids) {
    auto s = geometry::power_sphere(pc, ids);
    if (!s) return false;
    // A nearly flat simplex has a huge circumsphere; treat it as dependent.
    return std::isfinite(s->radius2) && geometry::dist2(s->center, pc.points[ids[0]]) < 1e12 * geometry::scale2(pc);
}

inline void require_full_dimension(const PointCloud& pc) {
    std::vector<Vertex> basis{0};
    for (std::size_t i = 1; i < pc.size() && static_cast<int>(basis.size()) <= pc.dim(); ++i) {
        basis.push_back(static_cast<Vertex>(i));
        if (!affinely_independent(pc, basis)) basis.pop_back();
    }
    if (static_cast<int>(basis.size()) <= pc.dim()) {
        std::vector<Vertex> all(pc.size());
        std::iota(all.begin(), all.end(), 0);
        throw DegeneracyError(pc.dim() == 2 ? "all points are collinear" : "all points are coplanar", all);
    }
}

template <class F>
void for_each_subset(int n, int k, F&& f) {
    std::vector<Vertex> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    if (k > n) return;
    while (true) {
        f(std::span<const Vertex>(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

/// Top-dimensional Delaunay (regular, when weighted) simplices by testing
/// every (n+1)-subset against every point. Reference implementation.
inline std::vector<Simplex> delaunay_brute_force(const PointCloud& pc) {
    detail::check_cloud(pc);
    detail::require_full_dimension(pc);
    const double tol = detail::tolerance(pc);
    std::vector<Simplex> out;
    detail::for_each_subset(static_cast<int>(pc.size()), pc.dim() + 1, [&](std::span<const Vertex> ids) {
        if (!detail::affinely_independent(pc, ids)) return;
        auto s = geometry::power_sphere(pc, ids);
        if (detail::sphere_is_empty(pc, ids, *s, tol)) out.emplace_back(ids);
    });
    return out;
}

namespace detail {

/// Unit normal of the facet hyperplane oriented away from `opposite`.
inline std::vector<double> facet_normal(const PointCloud& pc, const Simplex& facet, Vertex opposite) {
    const auto& a = pc.points[facet[0]];
    std::vector<double> nrm(a.size(), 0.0);
    if (a.size() == 2) {
        const auto& b = pc.points[facet[1]];
        nrm = {-(b[1] - a[1]), b[0] - a[0]};
    } else {
        const auto& b = pc.points[facet[1]];
        const auto& c = pc.points[facet[2]];
        const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
        const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
        nrm = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    }
    const double len = std::sqrt(geometry::dot(nrm, nrm));
    for (auto& x : nrm) x /= len;
    std::vector<double> to_q(a.size());
    for (std::size_t d = 0; d < a.size(); ++d) to_q[d] = pc.points[opposite][d] - a[d];
    if (geometry::dot(nrm, to_q) > 0)
        for (auto& x : nrm) x = -x;
    return nrm;
}

inline Simplex with_vertex(const Simplex& facet, Vertex v) {
    std::vector<Vertex> vs(facet.begin(), facet.end());
    vs.push_back(v);
    return Simplex::from_unsorted(vs.begin(), vs.end());
}

/// Finds one Delaunay simplex containing the lexicographically smallest
/// point, which is a hull vertex and therefore never redundant.
inline Simplex initial_simplex(const PointCloud& pc, double tol) {
    const int n = pc.dim();
    std::vector<Vertex> order(pc.size());
    std::iota(order.begin(), order.end(), 0);
    const Vertex p0 = *std::min_element(order.begin(), order.end(),
                                        [&](Vertex a, Vertex b) { return pc.points[a] < pc.points[b]; });
    std::erase(order, p0);
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
        return geometry::dist2(pc.points[a], pc.points[p0]) < geometry::dist2(pc.points[b], pc.points[p0]);
    });
    for (std::size_t k = std::min<std::size_t>(order.size(), 12);; k = std::min(order.size(), 2 * k)) {
        std::optional<Simplex> found;
        for_each_subset(static_cast<int>(k), n, [&](std::span<const Vertex> sub) {
            if (found) return;
            std::vector<Vertex> ids{p0};
            for (auto i : sub) ids.push_back(order[i]);
            std::sort(ids.begin(), ids.end());
            if (!affinely_independent(pc, ids)) return;
            auto s = geometry::power_sphere(pc, ids);
            if (sphere_is_empty(pc, ids, *s, tol)) found = Simplex(std::span<const Vertex>(ids));
        });
        if (found) return *found;
        if (k == order.size()) break;
    }
    throw DegeneracyError("no Delaunay simplex found at the extreme point", {p0});
}

}  // namespace detail

/// Top-dimensional Delaunay (regular) simplices by gift-wrapping: starting
/// from one empty simplex, each unmatched facet is crossed by choosing the
/// point whose sphere through the facet is first reached when the centre
/// slides away from the known side. Every accepted simplex is checked
/// against all points, so degeneracies are reported as in the brute force.
inline std::vector<Simplex> delaunay(const PointCloud& pc) {
    detail::check_cloud(pc);
    detail::require_full_dimension(pc);
    const double tol = detail::tolerance(pc);
    const double height_tol = 1e-12 * std::sqrt(geometry::scale2(pc));

    std::set<Simplex> found;
    std::map<Simplex, int> facet_uses;
    std::deque<std::pair<Simplex, Vertex>> open;
    auto accept = [&](const Simplex& s) {
        if (!found.insert(s).second) return;
        for (int i = 0; i < s.size(); ++i) {
            Simplex facet = s.facet(i);
            if (++facet_uses[facet] == 1) open.emplace_back(facet, s[i]);
        }
    };
    accept(detail::initial_simplex(pc, tol));

    while (!open.empty()) {
        auto [facet, opposite] = open.front();
        open.pop_front();
        if (facet_uses[facet] >= 2) continue;
        auto fs = geometry::power_sphere(pc, facet.vertices());
        if (!fs) throw DegeneracyError("degenerate facet", {facet.begin(), facet.end()});
        const auto nrm = detail::facet_normal(pc, facet, opposite);
        const auto& xa = pc.points[facet[0]];
        const double wa = pc.weight(facet[0]);
        std::optional<Vertex> best;
        double best_t = 0.0;
        for (std::size_t i = 0; i < pc.size(); ++i) {
            if (facet.contains(Simplex{static_cast<Vertex>(i)})) continue;
            std::vector<double> rel(xa.size());
            for (std::size_t d = 0; d < xa.size(); ++d) rel[d] = pc.points[i][d] - xa[d];
            const double h = geometry::dot(nrm, rel);
            if (h <= height_tol) continue;
            // Centre c(t) = c_F + t * nrm is equidistant (in power) from the facet and point i.
            const double t = (geometry::dist2(fs->center, pc.points[i]) - pc.weight(i) -
                              geometry::dist2(fs->center, xa) + wa) /
                             (2.0 * h);
            if (!best || t < best_t) {
                best = static_cast<Vertex>(i);
                best_t = t;
            }
        }
        if (!best) continue;  // hull facet
        Simplex s = detail::with_vertex(facet, *best);
        auto sphere = geometry::power_sphere(pc, s.vertices());
        if (!sphere || !detail::affinely_independent(pc, s.vertices()))
            throw DegeneracyError("flat simplex", {s.begin(), s.end()});
        if (!detail::sphere_is_empty(pc, s.vertices(), *sphere, tol))
            throw DegeneracyError("inconsistent Delaunay pivot", {s.begin(), s.end()});
        accept(s);
    }

    std::vector<bool> used(pc.size(), false);
    for (const auto& s : found)
        for (auto v : s) used[v] = true;
    for (std::size_t i = 0; i < pc.size(); ++i)
        if (!used[i]) throw DegeneracyError("point is redundant in the weighted triangulation", {static_cast<Vertex>(i)});
    return {found.begin(), found.end()};
}

/// All faces of the given top simplices, sorted and unique.
inline std::vector<Simplex> face_closure(const std::vector<Simplex>& tops) {
    std::set<Simplex> all;
    for (const auto& t : tops) {
        const int k = t.size();
        for (int mask = 1; mask < (1 << k); ++mask) {
            std::vector<Vertex> vs;
            for (int i = 0; i < k; ++i)
                if (mask & (1 << i)) vs.push_back(t[i]);
            all.insert(Simplex(std::span<const Vertex>(vs)));
        }
    }
    return {all.begin(), all.end()};
}

/// Maps a power radius to the filtration scale: sqrt for non-negative
/// values, -sqrt(-r2) otherwise, so zero weights give plain radii.
inline double radius_from_power(double r2) { return r2 >= 0 ? std::sqrt(r2) : -std::sqrt(-r2); }

/// Alpha values (as signed radii) for every simplex of the Delaunay complex
/// spanned by `tops`. A simplex whose smallest orthogonal sphere excludes the
/// other vertices of its cofaces enters at that sphere's radius; otherwise
/// it enters together with its earliest coface.
inline std::vector<std::pair<Simplex, double>> alpha_values(const PointCloud& pc, const std::vector<Simplex>& tops) {
    auto all = face_closure(tops);
    std::map<Simplex, std::vector<Simplex>> cofaces;
    for (const auto& s : all)
        if (s.dim() >= 1)
            for (int i = 0; i < s.size(); ++i) cofaces[s.facet(i)].push_back(s);
    std::map<Simplex, double> r2;
    std::vector<Simplex> by_dim = all;
    std::stable_sort(by_dim.begin(), by_dim.end(), [](const Simplex& a, const Simplex& b) { return a.dim() > b.dim(); });
    for (const auto& s : by_dim) {
        auto sphere = geometry::power_sphere(pc, s.vertices());
        if (!sphere) throw DegeneracyError("flat simplex", {s.begin(), s.end()});
        auto it = cofaces.find(s);
        bool gabriel = true;
        double coface_min = std::numeric_limits<double>::infinity();
        if (it != cofaces.end()) {
            for (const auto& c : it->second) {
                coface_min = std::min(coface_min, r2.at(c));
                for (auto v : c)
                    if (!s.contains(Simplex{v}) && geometry::power_excess(pc, *sphere, v) < 0.0) gabriel = false;
            }
        }
        r2[s] = gabriel ? sphere->radius2 : coface_min;
    }
    std::vector<std::pair<Simplex, double>> out;
    out.reserve(all.size());
    for (const auto& s : all) out.emplace_back(s, radius_from_power(r2.at(s)));
    return out;
}

/// Alpha value of a single simplex of the Delaunay complex of `pc`.
inline double alpha_value(const Simplex& s, const PointCloud& pc) {
    for (const auto& [t, v] : alpha_values(pc, delaunay(pc)))
        if (t == s) return v;
    throw LookupError("simplex " + to_string(s) + " is not in the Delaunay complex");
}

inline std::map<Vertex, Point> to_points(const PointCloud& pc) {
    std::map<Vertex, Point> pts;
    for (std::size_t i = 0; i < pc.size(); ++i)
        pts[static_cast<Vertex>(i)] = Point{pc.points[i], pc.weights ? std::optional<double>((*pc.weights)[i]) : std::nullopt};
    return pts;
}

/// Alpha (or weighted alpha) filtration, canonically ordered.
inline Filtration build_alpha_filtration(const PointCloud& pc) {
    return canonical_sort(alpha_values(pc, delaunay(pc)), pc.dim(), to_points(pc));
}

}  // namespace voc
