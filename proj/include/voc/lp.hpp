#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace voc::lp {

/// Numerical tolerances shared by the solver and its callers.
struct Tolerances {
    static constexpr double pivot = 1e-12;
    static constexpr double feasibility = 1e-9;
    /// Coefficients at or below this magnitude are not part of a reported support.
    static constexpr double support = 1e-7;
};

/// Row-major dense matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// minimize c.x subject to A x = b, with x_j >= 0 unless free[j].
struct LinearProgram {
    std::vector<double> c;
    DenseMatrix a;
    std::vector<double> b;
    std::vector<bool> free;

    std::size_t num_vars() const { return c.size(); }
    std::size_t num_constraints() const { return b.size(); }

    void validate() const {
        if (a.rows() != b.size() || a.cols() != c.size() || (!free.empty() && free.size() != c.size()))
            throw std::invalid_argument("linear program: inconsistent dimensions");
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(c.begin(), c.end(), finite) || !std::all_of(b.begin(), b.end(), finite))
            throw std::invalid_argument("linear program: non-finite data");
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                if (!finite(a(i, j))) throw std::invalid_argument("linear program: non-finite data");
    }
};

enum class Status { optimal, infeasible, unbounded, numerical_failure };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

struct Solution {
    Status status = Status::numerical_failure;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
};

enum class PivotRule {
    bland,
    /// Most negative reduced cost, switching to Bland's rule after a run of
    /// degenerate pivots so that termination is still guaranteed.
    dantzig,
};

struct Options {
    PivotRule rule = PivotRule::bland;
    std::size_t max_iterations = 5'000'000;
    std::size_t degenerate_run_limit = 50;
};

namespace detail {

class Tableau {
public:
    // Rows 0..m-1 are constraints, row m is the objective (reduced costs);
    // the last column is the right-hand side.
    Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), t_(m + 1, n + 1), basis_(m) {}

    double& at(std::size_t i, std::size_t j) { return t_(i, j); }
    double at(std::size_t i, std::size_t j) const { return t_(i, j); }
    double& rhs(std::size_t i) { return t_(i, n_); }
    double& cost(std::size_t j) { return t_(m_, j); }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void pivot(std::size_t r, std::size_t e) {
        double* pr = t_.row(r);
        const double inv = 1.0 / pr[e];
        for (std::size_t j = 0; j <= n_; ++j) pr[j] *= inv;
        pr[e] = 1.0;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* pi = t_.row(i);
            const double f = pi[e];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_; ++j) pi[j] -= f * pr[j];
            pi[e] = 0.0;
        }
        basis_[r] = e;
    }

    /// Drops constraint row r (used for redundant rows after phase one).
    void drop_row(std::size_t r) {
        DenseMatrix nt(m_, n_ + 1);
        for (std::size_t i = 0, k = 0; i <= m_; ++i) {
            if (i == r) continue;
            std::copy(t_.row(i), t_.row(i) + n_ + 1, nt.row(k++));
        }
        t_ = std::move(nt);
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --m_;
    }

private:
    std::size_t m_;
    std::size_t n_;
    DenseMatrix t_;
    std::vector<std::size_t> basis_;
};

enum class PhaseResult { optimal, unbounded, numerical_failure, iteration_limit };

/// Runs primal simplex iterations on columns [0, allowed) of the tableau.
inline PhaseResult run_simplex(Tableau& t, std::size_t allowed, const Options& opt, std::size_t& iterations) {
    const double tol = Tolerances::feasibility;
    std::size_t degenerate_run = 0;
    while (true) {
        if (iterations >= opt.max_iterations) return PhaseResult::iteration_limit;
        const bool use_bland = opt.rule == PivotRule::bland || degenerate_run >= opt.degenerate_run_limit;
        std::size_t enter = allowed;
        double best = -tol;
        for (std::size_t j = 0; j < allowed; ++j) {
            const double rc = t.cost(j);
            if (rc < best) {
                enter = j;
                if (use_bland) break;
                best = rc;
            }
        }
        if (enter == allowed) return PhaseResult::optimal;

        // entries at or below the pivot tolerance are treated as zero
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a > Tolerances::pivot) best_ratio = std::min(best_ratio, std::max(t.rhs(i), 0.0) / a);
        }
        // Bland tie-break: smallest basic variable among the minimising rows.
        std::size_t leave = t.rows();
        const double slack = 1e-12 * (1.0 + std::abs(best_ratio));
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= Tolerances::pivot || std::max(t.rhs(i), 0.0) / a > best_ratio + slack) continue;
            if (leave == t.rows() || t.basis()[i] < t.basis()[leave]) leave = i;
        }
        if (leave == t.rows()) return PhaseResult::unbounded;
        degenerate_run = (std::abs(best_ratio) <= 1e-12) ? degenerate_run + 1 : 0;
        t.pivot(leave, enter);
        ++iterations;
    }
}

}  // namespace detail

/// Two-phase dense tableau simplex. Optimal solutions are basic; the
/// equality residual is verified before a solution is reported optimal.
inline Solution solve(const LinearProgram& lp, const Options& opt = {}) {
    lp.validate();
    const std::size_t nv = lp.num_vars();
    const std::size_t m0 = lp.num_constraints();
    auto is_free = [&](std::size_t j) { return !lp.free.empty() && lp.free[j]; };

    // Column layout: each variable gets one column, free ones a second
    // (negative part) column.
    std::vector<std::size_t> pos_col(nv), neg_col(nv, SIZE_MAX);
    std::size_t ncols = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        pos_col[j] = ncols++;
        if (is_free(j)) neg_col[j] = ncols++;
    }

    Solution sol;
    // Zero rows either vanish or make the problem infeasible.
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m0; ++i) {
        bool nonzero = false;
        for (std::size_t j = 0; j < nv && !nonzero; ++j) nonzero = lp.a(i, j) != 0.0;
        if (nonzero) {
            rows.push_back(i);
        } else if (std::abs(lp.b[i]) > Tolerances::feasibility) {
            sol.status = Status::infeasible;
            return sol;
        }
    }
    const std::size_t m = rows.size();
    const std::size_t total = ncols + m;  // artificials follow the structural columns

    detail::Tableau t(m, total);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = rows[r];
        const double s = lp.b[i] < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < nv; ++j) {
            const double v = s * lp.a(i, j);
            t.at(r, pos_col[j]) = v;
            if (neg_col[j] != SIZE_MAX) t.at(r, neg_col[j]) = -v;
        }
        t.at(r, ncols + r) = 1.0;
        t.rhs(r) = s * lp.b[i];
        t.basis()[r] = ncols + r;
    }
    // Phase one: minimise the sum of artificials.
    for (std::size_t j = 0; j <= total; ++j) {
        double acc = 0.0;
        if (j < ncols || j == total)
            for (std::size_t r = 0; r < m; ++r) acc -= (j == total ? t.rhs(r) : t.at(r, j));
        if (j == total) t.rhs(m) = acc; else t.cost(j) = acc;
    }
    auto pr = detail::run_simplex(t, total, opt, sol.iterations);
    if (pr != detail::PhaseResult::optimal) {
        sol.status = Status::numerical_failure;
        return sol;
    }
    double scale_b = 0.0;
    for (double v : lp.b) scale_b = std::max(scale_b, std::abs(v));
    if (-t.rhs(m) > Tolerances::feasibility * (1.0 + scale_b)) {
        sol.status = Status::infeasible;
        return sol;
    }
    // Drive remaining artificials out of the basis, dropping redundant rows.
    for (std::size_t r = 0; r < t.rows();) {
        if (t.basis()[r] < ncols) {
            ++r;
            continue;
        }
        std::size_t e = ncols;
        for (std::size_t j = 0; j < ncols; ++j)
            if (std::abs(t.at(r, j)) > 1e-9) {
                e = j;
                break;
            }
        if (e == ncols) {
            t.drop_row(r);
        } else {
            t.pivot(r, e);
            ++sol.iterations;
            ++r;
        }
    }
    // Phase two objective in terms of the current basis.
    const std::size_t mm = t.rows();
    std::vector<double> cost(ncols, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        cost[pos_col[j]] = lp.c[j];
        if (neg_col[j] != SIZE_MAX) cost[neg_col[j]] = -lp.c[j];
    }
    for (std::size_t j = 0; j < total; ++j) t.cost(j) = j < ncols ? cost[j] : 0.0;
    t.rhs(mm) = 0.0;
    for (std::size_t r = 0; r < mm; ++r) {
        const double cb = cost[t.basis()[r]];
        if (cb == 0.0) continue;
        for (std::size_t j = 0; j < total; ++j) t.cost(j) -= cb * t.at(r, j);
        t.rhs(mm) -= cb * t.rhs(r);
    }
    pr = detail::run_simplex(t, ncols, opt, sol.iterations);
    if (pr != detail::PhaseResult::optimal) {
        sol.status = pr == detail::PhaseResult::unbounded ? Status::unbounded : Status::numerical_failure;
        return sol;
    }

    std::vector<double> y(ncols, 0.0);
    for (std::size_t r = 0; r < mm; ++r)
        if (t.basis()[r] < ncols) y[t.basis()[r]] = t.rhs(r);
    sol.x.assign(nv, 0.0);
    for (std::size_t j = 0; j < nv; ++j) {
        sol.x[j] = y[pos_col[j]] - (neg_col[j] != SIZE_MAX ? y[neg_col[j]] : 0.0);
        if (!is_free(j) && sol.x[j] < 0.0) sol.x[j] = 0.0;
    }
    sol.objective = 0.0;
    for (std::size_t j = 0; j < nv; ++j) sol.objective += lp.c[j] * sol.x[j];

    double residual = 0.0;
    for (std::size_t i = 0; i < m0; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < nv; ++j) acc += lp.a(i, j) * sol.x[j];
        residual = std::max(residual, std::abs(acc - lp.b[i]));
    }
    sol.status = residual <= Tolerances::feasibility * (1.0 + scale_b) ? Status::optimal : Status::numerical_failure;
    return sol;
}

// ---------------------------------------------------------------------------
// l1 minimisation front end
// ---------------------------------------------------------------------------

enum class VarKind {
    l1,      ///< free sign, contributes |x| to the objective
    free,    ///< free sign, no cost
    nonneg,  ///< x >= 0, no cost
};

/// Sparse equality row: sum coeffs[k] * x[vars[k]] = rhs.
struct SparseRow {
    std::vector<std::pair<std::size_t, double>> terms;
    double rhs = 0.0;
};

struct L1Problem {
    std::vector<VarKind> kinds;
    std::vector<SparseRow> rows;
};

struct L1Solution {
    Status status = Status::numerical_failure;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t iterations = 0;
    std::size_t presolved_vars = 0;  ///< variables fixed before the simplex ran
};

namespace detail {

/// Repeatedly fixes variables that appear alone in a row and removes empty
/// rows. Returns false when a contradiction is found.
inline bool presolve(L1Problem& p, std::vector<std::optional<double>>& fixed) {
    double rhs_scale = 0.0;
    for (const auto& row : p.rows) rhs_scale = std::max(rhs_scale, std::abs(row.rhs));
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& row : p.rows) {
            // fold in fixed variables and zeros
            std::vector<std::pair<std::size_t, double>> kept;
            for (auto [j, a] : row.terms) {
                if (a == 0.0) continue;
                if (fixed[j]) row.rhs -= a * *fixed[j]; else kept.emplace_back(j, a);
            }
            row.terms.swap(kept);
            if (row.terms.size() == 1) {
                const auto [j, a] = row.terms.front();
                const double v = row.rhs / a;
                if (p.kinds[j] == VarKind::nonneg && v < -Tolerances::feasibility) return false;
                fixed[j] = p.kinds[j] == VarKind::nonneg ? std::max(v, 0.0) : v;
                row.terms.clear();
                row.rhs -= a * *fixed[j];
                changed = true;
            }
        }
    }
    for (const auto& row : p.rows)
        if (row.terms.empty() && std::abs(row.rhs) > Tolerances::feasibility * (1.0 + rhs_scale)) return false;
    return true;
}

}  // namespace detail

/// minimize sum over l1 variables of |x_j| subject to the sparse equality
/// rows. Free l1 variables are split into positive and negative parts.
inline L1Solution minimize_l1(L1Problem p, const Options& opt = {}, bool use_presolve = true) {
    const std::size_t n = p.kinds.size();
    for (const auto& row : p.rows)
        for (auto [j, a] : row.terms)
            if (j >= n || !std::isfinite(a)) throw std::invalid_argument("l1 problem: bad row term");
    L1Solution out;
    std::vector<std::optional<double>> fixed(n);
    const auto original_rows = p.rows;
    if (use_presolve && !detail::presolve(p, fixed)) {
        out.status = Status::infeasible;
        return out;
    }
    // Variables not touched by any remaining row sit at zero.
    std::vector<std::size_t> col_of(n, SIZE_MAX), var_of;
    for (const auto& row : p.rows)
        for (auto [j, a] : row.terms)
            if (!fixed[j] && col_of[j] == SIZE_MAX) {
                col_of[j] = var_of.size();
                var_of.push_back(j);
            }
    std::vector<std::size_t> live_rows;
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        if (!p.rows[i].terms.empty() || std::abs(p.rows[i].rhs) > Tolerances::feasibility) live_rows.push_back(i);

    out.x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        if (fixed[j]) {
            out.x[j] = *fixed[j];
            ++out.presolved_vars;
        }

    if (!var_of.empty() || !live_rows.empty()) {
        LinearProgram lp;
        const std::size_t nv = var_of.size();
        // l1 variables become two nonnegative columns: x = pos - neg
        std::vector<std::size_t> pos(nv), neg(nv, SIZE_MAX);
        std::size_t cols = 0;
        for (std::size_t k = 0; k < nv; ++k) {
            pos[k] = cols++;
            if (p.kinds[var_of[k]] == VarKind::l1) neg[k] = cols++;
        }
        lp.c.assign(cols, 0.0);
        lp.free.assign(cols, false);
        for (std::size_t k = 0; k < nv; ++k) {
            switch (p.kinds[var_of[k]]) {
                case VarKind::l1: lp.c[pos[k]] = 1.0; lp.c[neg[k]] = 1.0; break;
                case VarKind::free: lp.free[pos[k]] = true; break;
                case VarKind::nonneg: break;
            }
        }
        lp.a = DenseMatrix(live_rows.size(), cols);
        lp.b.assign(live_rows.size(), 0.0);
        for (std::size_t r = 0; r < live_rows.size(); ++r) {
            const auto& row = p.rows[live_rows[r]];
            lp.b[r] = row.rhs;
            for (auto [j, a] : row.terms) {
                const std::size_t k = col_of[j];
                lp.a(r, pos[k]) += a;
                if (neg[k] != SIZE_MAX) lp.a(r, neg[k]) -= a;
            }
        }
        auto sol = solve(lp, opt);
        out.iterations = sol.iterations;
        if (sol.status != Status::optimal) {
            out.status = sol.status;
            out.x.clear();
            return out;
        }
        for (std::size_t k = 0; k < nv; ++k)
            out.x[var_of[k]] = sol.x[pos[k]] - (neg[k] != SIZE_MAX ? sol.x[neg[k]] : 0.0);
    }
    out.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        if (p.kinds[j] == VarKind::l1) out.objective += std::abs(out.x[j]);

    double residual = 0.0, scale = 0.0;
    for (const auto& row : original_rows) {
        double acc = 0.0;
        for (auto [j, a] : row.terms) acc += a * out.x[j];
        residual = std::max(residual, std::abs(acc - row.rhs));
        scale = std::max(scale, std::abs(row.rhs));
    }
    out.status = residual <= Tolerances::feasibility * (1.0 + scale) ? Status::optimal : Status::numerical_failure;
    return out;
}

/// Dense convenience form: minimize ||x||_1 over the variables flagged in
/// `l1_vars` (others are free with zero cost) subject to A x + fixed = b.
inline L1Solution minimize_l1(const DenseMatrix& a, const std::vector<double>& b, const std::vector<VarKind>& kinds,
                              const std::vector<double>& fixed_terms = {}, const Options& opt = {}) {
    if (a.rows() != b.size() || a.cols() != kinds.size() || (!fixed_terms.empty() && fixed_terms.size() != b.size()))
        throw std::invalid_argument("minimize_l1: inconsistent dimensions");
    L1Problem p;
    p.kinds = kinds;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        SparseRow row;
        row.rhs = b[i] - (fixed_terms.empty() ? 0.0 : fixed_terms[i]);
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (a(i, j) != 0.0) row.terms.emplace_back(j, a(i, j));
        p.rows.push_back(std::move(row));
    }
    return minimize_l1(std::move(p), opt);
}

}  // namespace voc::lp
