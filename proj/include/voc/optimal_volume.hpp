#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "voc/alpha.hpp"
#include "voc/complex.hpp"
#include "voc/lp.hpp"
#include "voc/persistence.hpp"

namespace voc {

/// The pair has no finite death, so it has no persistent volume.
class UnsupportedPair : public std::runtime_error {
public:
    explicit UnsupportedPair(const PersistencePair& p)
        : std::runtime_error("pair " + to_string(p) +
                             " never dies: cannot define the volume optimal cycle of an essential class") {}
};

/// The LP solver broke down numerically.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state that contradicts a proven property (e.g. an infeasible volume
/// LP without locality). Always a bug.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Solution of the volume problem for one finite pair.
struct OptimalVolume {
    PersistencePair pair;
    RealChain volume;  // degree q+1, death simplex with coefficient 1
    RealChain cycle;   // boundary of `volume`
    std::vector<PersistencePair> children;
    std::optional<double> radius_used;  // nullopt: no locality restriction
    bool retried_with_epsilon = false;

    struct Diagnostics {
        double objective = 0.0;
        std::size_t lp_iterations = 0;
        std::size_t lp_variables = 0;
        std::size_t lp_constraints = 0;
        std::size_t presolved_variables = 0;
        int radius_attempts = 0;
    } diagnostics;

    std::vector<Index> support() const { return volume.support(); }
};

/// Variables are coefficients of (q+1)-simplices strictly between birth
/// and death; rows ask every q-simplex strictly between birth and death to
/// vanish from the boundary. The death simplex's boundary is the constant.
struct VolumeLp {
    lp::L1Problem problem;
    std::vector<Index> columns;  // LP variable -> simplex index
    std::vector<Index> rows;     // LP row -> q-simplex index
    /// Coefficient of the birth simplex in the boundary of each variable,
    /// and in the boundary of the death simplex.
    std::vector<double> birth_row;
    double birth_constant = 0.0;
};

namespace detail {

inline std::vector<double> centroid(const Filtration& f, Index idx) {
    const auto& s = f.simplex(idx);
    std::vector<double> c(static_cast<std::size_t>(f.ambient_dim()), 0.0);
    for (auto v : s) {
        const auto& p = f.point(v).x;
        if (p.size() != c.size()) throw InputError("vertex coordinates do not match the ambient dimension");
        for (std::size_t d = 0; d < c.size(); ++d) c[d] += p[d];
    }
    for (auto& x : c) x /= s.size();
    return c;
}

inline bool inside_ball(const Filtration& f, Index idx, const std::vector<double>& center, double r) {
    const double r2 = r * r * (1.0 + 1e-12);
    for (auto v : f.simplex(idx))
        if (geometry::dist2(f.point(v).x, center) > r2) return false;
    return true;
}

inline double bbox_diameter(const Filtration& f) {
    if (!f.has_coordinates()) return 0.0;
    const auto n = f.points().begin()->second.x.size();
    std::vector<double> lo(n, std::numeric_limits<double>::infinity()), hi(n, -lo[0]);
    for (const auto& [_, p] : f.points())
        for (std::size_t d = 0; d < n; ++d) {
            lo[d] = std::min(lo[d], p.x[d]);
            hi[d] = std::max(hi[d], p.x[d]);
        }
    double s = 0.0;
    for (std::size_t d = 0; d < n; ++d) s += (hi[d] - lo[d]) * (hi[d] - lo[d]);
    return std::sqrt(s);
}

inline double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) <= lp::Tolerances::support ? r : v;
}

}  // namespace detail

/// Builds the volume LP for a finite pair. With `radius`, only simplices
/// inside the ball of that radius around the death simplex's centroid are
/// variables; the filtration then needs vertex coordinates.
inline VolumeLp assemble_volume_lp(const Filtration& f, const PersistencePair& pair,
                                   std::optional<double> radius = std::nullopt) {
    if (pair.essential()) throw UnsupportedPair(pair);
    const Index b = pair.birth_index;
    const Index d = *pair.death_index;
    if (b < 1 || d > f.size() || b >= d || f.dim(d) != f.dim(b) + 1)
        throw LookupError("pair " + to_string(pair) + " is not a finite pair of this filtration");
    const int q = f.dim(b);
    std::vector<double> center;
    if (radius) {
        if (!f.has_coordinates()) throw InputError("locality radius needs vertex coordinates");
        center = detail::centroid(f, d);
    }

    VolumeLp out;
    std::map<Index, std::size_t> row_of;
    auto row_for = [&](Index tau) -> std::optional<std::size_t> {
        if (tau <= b || tau >= d) return std::nullopt;
        auto [it, inserted] = row_of.try_emplace(tau, out.rows.size());
        if (inserted) {
            out.rows.push_back(tau);
            out.problem.rows.emplace_back();
        }
        return it->second;
    };
    for (const auto& [tau, c] : boundary<double>(f, d)) {
        if (tau == b) out.birth_constant = c;
        if (auto r = row_for(tau)) out.problem.rows[*r].rhs -= c;
    }
    for (Index k = b + 1; k < d; ++k) {
        if (f.dim(k) != q + 1) continue;
        if (radius && !detail::inside_ball(f, k, center, *radius)) continue;
        const std::size_t col = out.columns.size();
        out.columns.push_back(k);
        out.problem.kinds.push_back(lp::VarKind::l1);
        double birth_coeff = 0.0;
        for (const auto& [tau, c] : boundary<double>(f, k)) {
            if (tau == b) birth_coeff = c;
            if (auto r = row_for(tau)) out.problem.rows[*r].terms.emplace_back(col, c);
        }
        out.birth_row.push_back(birth_coeff);
    }
    return out;
}

struct VolumeOptions {
    /// Initial locality radius; default is twice the circumradius of the
    /// death simplex. Ignored without coordinates or when `unbounded`.
    std::optional<double> radius;
    bool unbounded = false;
    double epsilon = 1e-6;
    lp::Options lp;
};

/// Result of one LP solve of the volume problem.
struct VolumeSolve {
    lp::Status status = lp::Status::infeasible;
    std::vector<double> alpha;  // per VolumeLp column
    double objective = 0.0;
    std::size_t iterations = 0;
    std::size_t presolved = 0;
};

/// Solves the assembled volume LP. `birth_sign` of +1 / -1 adds the
/// constraint that the birth simplex's coefficient in the boundary is at
/// least `epsilon` / at most `-epsilon`; 0 solves without it.
inline VolumeSolve solve_volume_lp(const VolumeLp& vlp, int birth_sign = 0, double epsilon = 1e-6,
                                   const lp::Options& opt = {}) {
    lp::L1Problem p = vlp.problem;
    if (birth_sign != 0) {
        // birth_row . alpha + constant - s = eps   or   ... + s = -eps, with s >= 0
        const std::size_t slack = p.kinds.size();
        p.kinds.push_back(lp::VarKind::nonneg);
        lp::SparseRow row;
        for (std::size_t j = 0; j < vlp.birth_row.size(); ++j)
            if (vlp.birth_row[j] != 0.0) row.terms.emplace_back(j, vlp.birth_row[j]);
        row.terms.emplace_back(slack, birth_sign > 0 ? -1.0 : 1.0);
        row.rhs = birth_sign * epsilon - vlp.birth_constant;
        p.rows.push_back(std::move(row));
    }
    auto sol = lp::minimize_l1(std::move(p), opt);
    VolumeSolve out;
    out.status = sol.status;
    out.objective = sol.objective;
    out.iterations = sol.iterations;
    out.presolved = sol.presolved_vars;
    if (sol.status == lp::Status::optimal)
        out.alpha.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(vlp.columns.size()));
    return out;
}

/// Coefficient of the birth simplex in the boundary of the candidate volume.
inline double birth_coefficient(const VolumeLp& vlp, const std::vector<double>& alpha) {
    double s = vlp.birth_constant;
    for (std::size_t j = 0; j < alpha.size(); ++j) s += vlp.birth_row[j] * alpha[j];
    return s;
}

/// Default locality radius: twice the circumradius of the death simplex.
inline double default_radius(const Filtration& f, Index death) {
    std::vector<std::vector<double>> pts;
    for (auto v : f.simplex(death)) pts.push_back(f.point(v).x);
    double r = geometry::circumradius(pts);
    if (r <= 0.0) {
        const auto c = detail::centroid(f, death);
        for (const auto& p : pts) r = std::max(r, std::sqrt(geometry::dist2(p, c)));
    }
    return 2.0 * r;
}

/// Optimal volume of a finite pair: solve without the birth constraint,
/// accept if the birth simplex survives in the boundary, otherwise retry with
/// the constraint in both signs and keep the smaller objective (ties go to
/// the positive branch). An infeasible localized problem doubles the radius
/// until the ball covers the whole point set.
inline OptimalVolume optimal_volume(const Filtration& f, const PersistencePair& pair, const VolumeOptions& opt = {}) {
    if (pair.essential()) throw UnsupportedPair(pair);
    const Index d = *pair.death_index;
    const double support = lp::Tolerances::support;

    std::optional<double> radius;
    const double diameter = detail::bbox_diameter(f);
    if (!opt.unbounded && f.has_coordinates()) radius = opt.radius.value_or(default_radius(f, d));

    OptimalVolume ov;
    ov.pair = pair;
    VolumeLp vlp;
    VolumeSolve sol;
    while (true) {
        ++ov.diagnostics.radius_attempts;
        vlp = assemble_volume_lp(f, pair, radius);
        sol = solve_volume_lp(vlp, 0, opt.epsilon, opt.lp);
        if (sol.status == lp::Status::optimal) break;
        if (sol.status == lp::Status::numerical_failure)
            throw NumericalFailure("volume LP for pair " + to_string(pair) + " failed numerically");
        if (sol.status == lp::Status::unbounded)
            throw InternalError("volume LP for pair " + to_string(pair) + " reported unbounded");
        if (!radius) throw InternalError("volume LP for pair " + to_string(pair) + " is infeasible without locality");
        if (*radius >= diameter) {
            radius.reset();
        } else {
            *radius *= 2.0;
        }
    }
    ov.radius_used = radius;

    if (std::abs(birth_coefficient(vlp, sol.alpha)) <= support) {
        ov.retried_with_epsilon = true;
        double scale = 0.0;
        for (const auto& [_, c] : boundary<double>(f, d)) scale = std::max(scale, std::abs(c));
        const double eps = opt.epsilon * scale;
        auto plus = solve_volume_lp(vlp, +1, eps, opt.lp);
        auto minus = solve_volume_lp(vlp, -1, eps, opt.lp);
        const bool ok_p = plus.status == lp::Status::optimal;
        const bool ok_m = minus.status == lp::Status::optimal;
        if (!ok_p && !ok_m)
            throw InternalError("no volume for pair " + to_string(pair) + " satisfies the birth constraint");
        const std::size_t iters = sol.iterations + plus.iterations + minus.iterations;
        sol = (ok_p && (!ok_m || plus.objective <= minus.objective)) ? plus : minus;
        sol.iterations = iters;
    }

    ov.volume = RealChain(f.dim(d));
    ov.volume.add(d, 1.0);
    for (std::size_t j = 0; j < vlp.columns.size(); ++j)
        if (std::abs(sol.alpha[j]) > support) ov.volume.add(vlp.columns[j], detail::snap(sol.alpha[j]));
    ov.cycle = prune(boundary(f, ov.volume), support);
    ov.diagnostics.objective = sol.objective;
    ov.diagnostics.lp_iterations = sol.iterations;
    ov.diagnostics.lp_variables = vlp.columns.size();
    ov.diagnostics.lp_constraints = vlp.rows.size();
    ov.diagnostics.presolved_variables = sol.presolved;
    return ov;
}

/// Pairs of `diagram` whose death simplex carries a nonzero coefficient in
/// the volume (the pair itself excluded), sorted by birth index.
inline std::vector<PersistencePair> children_pairs(const OptimalVolume& ov, const std::vector<PersistencePair>& diagram) {
    std::vector<PersistencePair> out;
    for (const auto& p : diagram) {
        if (p.essential() || p == ov.pair || p.degree != ov.pair.degree) continue;
        if (std::abs(ov.volume.coefficient_of(*p.death_index)) > lp::Tolerances::support) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline OptimalVolume optimal_volume(const Filtration& f, const PersistencePair& pair,
                                    const std::vector<PersistencePair>& full_diagram, const VolumeOptions& opt = {}) {
    auto ov = optimal_volume(f, pair, opt);
    ov.children = children_pairs(ov, full_diagram);
    return ov;
}

/// Verifies the persistent-volume conditions for `z`: the death simplex
/// with coefficient 1, support inside (birth, death], no boundary on the
/// simplices strictly between birth and death, a nonzero birth coefficient;
/// and that the boundary is a persistence cycle for the pair.
inline bool check_persistent_volume(const Filtration& f, const RealReduction& real, const PersistencePair& pair,
                                    const RealChain& z) {
    if (pair.essential()) return false;
    const Index b = pair.birth_index;
    const Index d = *pair.death_index;
    const double tol = lp::Tolerances::support;
    const int q = f.dim(b);
    if (std::abs(z.coefficient_of(d) - 1.0) > tol) return false;
    for (const auto& [k, c] : z) {
        if (std::abs(c) <= tol) continue;
        if (k <= b || k > d || f.dim(k) != q + 1) return false;
    }
    const RealChain bd = prune(boundary(f, z), tol);
    for (const auto& [tau, c] : bd)
        if (tau > b && tau < d) return false;
    if (std::abs(bd.coefficient_of(b)) <= tol) return false;
    return check_cycle_conditions(f, real, pair, bd);
}

inline bool check_persistent_volume(const Filtration& f, const PersistencePair& pair, const RealChain& z) {
    return check_persistent_volume(f, reduce<double>(f, false), pair, z);
}

/// Optimal cycle of a pair: the l1-smallest cycle of the form
/// z_i + boundary(w) + sum of cycles of pairs alive when the pair is born,
/// with w a chain of (q+1)-simplices present at the birth.
/// `real` must track V so essential classes have representatives.
inline RealChain optimal_cycle(const Filtration& f, const RealReduction& real, const PersistencePair& pair,
                               const lp::Options& opt = {}) {
    const Index b = pair.birth_index;
    const int q = f.dim(b);
    const RealChain zi = persistence_cycle(f, real, pair);

    std::vector<RealChain> alive;
    for (const auto& p : all_pairs(f, real)) {
        if (p.degree != q || p == pair) continue;
        if (p.birth_index < b && (p.essential() || *p.death_index > b)) alive.push_back(persistence_cycle(f, real, p));
    }
    // variables: z over q-simplices <= b, then w over (q+1)-simplices <= b, then one per alive cycle
    std::map<Index, std::size_t> zvar;
    std::vector<Index> zindex;
    lp::L1Problem p;
    for (Index k = 1; k <= b; ++k)
        if (f.dim(k) == q) {
            zvar[k] = p.kinds.size();
            zindex.push_back(k);
            p.kinds.push_back(lp::VarKind::l1);
            lp::SparseRow row;
            row.terms.emplace_back(zvar[k], 1.0);
            row.rhs = zi.coefficient_of(k);
            p.rows.push_back(std::move(row));
        }
    for (Index k = 1; k <= b; ++k)
        if (f.dim(k) == q + 1) {
            const std::size_t var = p.kinds.size();
            p.kinds.push_back(lp::VarKind::free);
            for (const auto& [tau, c] : boundary<double>(f, k)) p.rows[zvar.at(tau)].terms.emplace_back(var, -c);
        }
    for (const auto& zj : alive) {
        const std::size_t var = p.kinds.size();
        p.kinds.push_back(lp::VarKind::free);
        for (const auto& [tau, c] : zj) p.rows[zvar.at(tau)].terms.emplace_back(var, -c);
    }
    auto sol = lp::minimize_l1(std::move(p), opt);
    if (sol.status == lp::Status::numerical_failure)
        throw NumericalFailure("optimal cycle LP for pair " + to_string(pair) + " failed numerically");
    if (sol.status != lp::Status::optimal)
        throw InternalError("optimal cycle LP for pair " + to_string(pair) + " is " + lp::to_string(sol.status));
    RealChain z(q);
    for (std::size_t j = 0; j < zindex.size(); ++j)
        if (std::abs(sol.x[j]) > lp::Tolerances::support) z.add(zindex[j], detail::snap(sol.x[j]));
    return z;
}

}  // namespace voc
