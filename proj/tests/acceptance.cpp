// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "voc/alpha.hpp"
#include "voc/lp.hpp"
#include "voc/merge_tree.hpp"
#include "voc/optimal_volume.hpp"
#include "voc/persistence.hpp"

using namespace voc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::set<Index> support_set(const RealChain& c) {
    auto s = c.support();
    return {s.begin(), s.end()};
}

std::vector<Filtration> alpha_suite(int count, int dim, int lo, int hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> n(lo, hi);
    std::vector<Filtration> out;
    while (static_cast<int>(out.size()) < count) {
        try {
            out.push_back(build_alpha_filtration(fixtures::random_cloud(rng, dim, n(rng))));
        } catch (const DegeneracyError&) {
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random alpha suite: duality, uniqueness, volume validity, nesting
// ---------------------------------------------------------------------------

struct Suite {
    std::vector<Filtration> filtrations;
    // codimension-one volumes per filtration, keyed by death index
    std::vector<std::map<Index, std::set<Index>>> lp_volumes;
};

Outcome duality(Suite& suite) {
    const auto t0 = Clock::now();
    suite.filtrations = alpha_suite(50, 2, 10, 60, 101);
    auto solid = alpha_suite(20, 3, 8, 30, 102);
    suite.filtrations.insert(suite.filtrations.end(), solid.begin(), solid.end());
    int mismatches = 0;
    std::size_t pairs = 0;
    for (const auto& f : suite.filtrations) {
        const int q = f.max_dim() - 1;
        const DiagramOptions all{true};
        const auto by_reduction = diagram(f, q, all);
        const auto by_tree = diagram_from_forest(compute_forest(f), f, all);
        pairs += by_reduction.size();
        if (oracle::as_index_pairs(by_reduction) != oracle::as_index_pairs(by_tree)) ++mismatches;
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << suite.filtrations.size() << " filtrations (50 planar, 20 solid), " << pairs << " pairs, " << mismatches
      << " mismatches, " << secs << " s (limit 60 s)";
    return {mismatches == 0 && secs < 60.0, d.str()};
}

Outcome volumes_valid(Suite& suite) {
    const auto t0 = Clock::now();
    int failures = 0;
    std::size_t checked = 0;
    std::string first;
    suite.lp_volumes.assign(suite.filtrations.size(), {});
    for (std::size_t i = 0; i < suite.filtrations.size(); ++i) {
        const auto& f = suite.filtrations[i];
        const auto real = reduce<double>(f, false);
        for (int q = 0; q < f.max_dim(); ++q)
            for (const auto& p : diagram(f, real, q, {true})) {
                if (p.essential()) continue;
                ++checked;
                bool ok = false;
                try {
                    const auto ov = optimal_volume(f, p);
                    ok = check_persistent_volume(f, real, p, ov.volume) &&
                         check_cycle_conditions(f, real, p, ov.cycle);
                    if (q == f.max_dim() - 1) suite.lp_volumes[i][*p.death_index] = support_set(ov.volume);
                } catch (const std::exception& e) {
                    if (first.empty()) first = e.what();
                }
                if (!ok) {
                    ++failures;
                    if (first.empty()) first = "filtration " + std::to_string(i) + " pair " + to_string(p);
                }
            }
    }
    std::ostringstream d;
    d << checked << " finite pairs of all degrees, " << failures << " failures, " << seconds_since(t0) << " s";
    if (!first.empty()) d << "; first: " << first;
    return {failures == 0, d.str()};
}

Outcome uniqueness(const Suite& suite) {
    int mismatches = 0;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < suite.filtrations.size(); ++i) {
        const auto& f = suite.filtrations[i];
        const auto forest = compute_forest(f);
        for (const auto& p : diagram(f, f.max_dim() - 1, {true})) {
            if (p.essential()) continue;
            ++checked;
            const auto it = suite.lp_volumes[i].find(*p.death_index);
            const auto tree = volume_from_forest(forest, p);
            if (it == suite.lp_volumes[i].end() || it->second != std::set<Index>(tree.begin(), tree.end()))
                ++mismatches;
        }
    }
    std::ostringstream d;
    d << checked << " codimension-one pairs, " << mismatches << " LP supports differ from the merge-tree volume";
    return {mismatches == 0 && checked > 0, d.str()};
}

Outcome nesting(const Suite& suite) {
    std::size_t couples = 0;
    int violations = 0;
    for (const auto& vols : suite.lp_volumes) {
        std::vector<const std::set<Index>*> list;
        for (const auto& [_, v] : vols) list.push_back(&v);
        for (std::size_t a = 0; a < list.size(); ++a)
            for (std::size_t b = a + 1; b < list.size(); ++b) {
                ++couples;
                const auto& x = *list[a];
                const auto& y = *list[b];
                std::vector<Index> common;
                std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
                if (!common.empty() && common.size() != x.size() && common.size() != y.size()) ++violations;
            }
    }
    std::ostringstream d;
    d << couples << " couples of codimension-one volumes, " << violations << " neither nested nor disjoint";
    return {violations == 0 && couples > 0, d.str()};
}

// ---------------------------------------------------------------------------
// Golden examples
// ---------------------------------------------------------------------------

std::set<Simplex> simplices_of(const Filtration& f, const RealChain& c) {
    std::set<Simplex> out;
    for (Index k : c.support()) out.insert(f.simplex(k));
    return out;
}

/// Searches random face-compatible orderings for a pair whose volume LP,
/// solved without the birth constraint, lands on a birth coefficient of zero.
struct RetrySearch {
    std::size_t filtrations = 0;
    std::size_t pairs = 0;
    std::size_t retried = 0;
    std::size_t retried_valid = 0;
    double smallest_birth_coefficient = std::numeric_limits<double>::infinity();
};

Filtration random_ordering(const Filtration& f, std::mt19937_64& rng) {
    std::vector<Simplex> pending(f.simplices());
    std::set<Simplex> present;
    std::vector<Simplex> order;
    while (!pending.empty()) {
        std::vector<std::size_t> ready;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const auto& s = pending[i];
            bool ok = true;
            for (int j = 0; j < s.size() && s.dim() > 0; ++j) ok = ok && present.count(s.facet(j));
            if (ok) ready.push_back(i);
        }
        const std::size_t pick = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(rng)];
        present.insert(pending[pick]);
        order.push_back(pending[pick]);
        pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    std::vector<double> values(order.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<double>(i + 1);
    return Filtration(std::move(order), std::move(values), f.ambient_dim());
}

RetrySearch search_for_retry() {
    RetrySearch s;
    std::mt19937_64 rng(909);
    std::vector<Filtration> bases = alpha_suite(60, 2, 5, 10, 903);
    auto solid = alpha_suite(15, 3, 5, 8, 904);
    bases.insert(bases.end(), solid.begin(), solid.end());
    for (const auto& base : bases)
        for (int shuffle = 0; shuffle < 4; ++shuffle) {
            const auto f = shuffle == 0 ? base : random_ordering(base, rng);
            ++s.filtrations;
            const auto real = reduce<double>(f, false);
            for (int q = 0; q < f.max_dim(); ++q)
                for (const auto& p : diagram(f, real, q, {true})) {
                    if (p.essential()) continue;
                    ++s.pairs;
                    const auto vlp = assemble_volume_lp(f, p);
                    const auto free = solve_volume_lp(vlp);
                    if (free.status == lp::Status::optimal)
                        s.smallest_birth_coefficient =
                            std::min(s.smallest_birth_coefficient, std::abs(birth_coefficient(vlp, free.alpha)));
                    const auto ov = optimal_volume(f, p, VolumeOptions{.unbounded = true});
                    if (ov.retried_with_epsilon) {
                        ++s.retried;
                        if (check_persistent_volume(f, real, p, ov.volume)) ++s.retried_valid;
                    }
                }
        }
    return s;
}

Outcome golden() {
    std::ostringstream d;
    bool pass = true;

    // short cycle versus volume
    {
        const auto f = fixtures::short_cycle_long_volume();
        const auto pd = diagram(f, 1);
        std::vector<std::pair<double, double>> levels;
        for (const auto& p : pd) levels.emplace_back(p.birth_value, p.death_value);
        std::sort(levels.begin(), levels.end());
        const bool pd_ok = levels == std::vector<std::pair<double, double>>{{2, 5}, {3, 4}};
        const auto it = std::find_if(pd.begin(), pd.end(), [](const auto& p) { return p.birth_value == 3; });
        bool ok = pd_ok && it != pd.end();
        if (ok) {
            const auto oc = simplices_of(f, optimal_cycle(f, reduce<double>(f), *it));
            const auto voc = simplices_of(f, optimal_volume(f, *it).cycle);
            const std::set<Simplex> z1{{0, 1}, {0, 2}, {1, 2}};
            const std::set<Simplex> z2{{0, 2}, {1, 2}, {1, 3}, {0, 3}};
            ok = oc == z1 && voc == z2 && oc != voc;
        }
        d << "OC(3,4) = z1 and VOC(3,4) = z2: " << (ok ? "yes" : "no");
        pass = pass && ok;
    }

    // birth constraint needed
    {
        const auto s = search_for_retry();
        const bool ok = s.retried > 0 && s.retried_valid == s.retried;
        d << "; birth-constraint retry: " << s.retried << " of " << s.pairs << " pairs over " << s.filtrations
          << " orderings needed it (smallest free-LP birth coefficient " << s.smallest_birth_coefficient << ")";
        pass = pass && ok;
    }

    // essential class
    {
        const auto f = fixtures::open_square_levels();
        const auto pd = diagram(f, 1);
        bool ok = pd.size() == 1 && pd[0].essential() && pd[0].birth_value == 2;
        if (ok) {
            try {
                optimal_volume(f, pd[0]);
                ok = false;
            } catch (const UnsupportedPair& e) {
                ok = std::string(e.what()).find("cannot define the volume optimal cycle") != std::string::npos;
            }
            ok = ok && optimal_cycle(f, reduce<double>(f), pd[0]).size() == 4;
        }
        d << "; (2, inf) rejected with explanation: " << (ok ? "yes" : "no");
        pass = pass && ok;
    }
    return {pass, d.str()};
}

// ---------------------------------------------------------------------------
// Torus sample
// ---------------------------------------------------------------------------

PointCloud torus_sample(std::size_t n, double big, double small, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi), u(0.0, 1.0);
    PointCloud pc;
    while (pc.size() < n) {
        const double th = angle(rng), ph = angle(rng);
        // area element is proportional to big + small cos(ph)
        if (u(rng) * (big + small) > big + small * std::cos(ph)) continue;
        const double rad = big + small * std::cos(ph);
        pc.points.push_back({rad * std::cos(th), rad * std::sin(th), small * std::sin(ph)});
    }
    return pc;
}

/// Number of pairs whose persistence is at least five times the 95th
/// percentile of the rest, taking the `expected` largest as candidates.
std::size_t prominent(std::vector<double> pers, std::size_t expected, double& threshold) {
    std::sort(pers.begin(), pers.end(), std::greater<>());
    if (pers.size() <= expected) return pers.size();
    std::vector<double> rest(pers.begin() + static_cast<std::ptrdiff_t>(expected), pers.end());
    std::sort(rest.begin(), rest.end());
    const double p95 = rest[static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(rest.size()))) - 1];
    threshold = 5 * p95;
    return static_cast<std::size_t>(std::count_if(pers.begin(), pers.end(), [&](double x) { return x >= threshold; }));
}

Outcome torus() {
    const auto t0 = Clock::now();
    const auto f = build_alpha_filtration(torus_sample(400, 1.0, 0.4, 2024));
    const auto t_alpha = seconds_since(t0);
    const auto z2 = reduce<Z2>(f, false);
    std::vector<double> p1, p2;
    std::vector<PersistencePair> d2;
    for (const auto& p : diagram(f, z2, 1))
        if (!p.essential()) p1.push_back(p.persistence());
    for (const auto& p : diagram(f, z2, 2))
        if (!p.essential()) {
            p2.push_back(p.persistence());
            d2.push_back(p);
        }
    double th1 = 0, th2 = 0;
    const auto n1 = prominent(p1, 2, th1);
    const auto n2 = prominent(p2, 1, th2);

    std::ostringstream d;
    d << f.size() << " simplices (alpha " << t_alpha << " s); prominent D1 " << n1 << " (threshold " << th1
      << "), D2 " << n2 << " (threshold " << th2 << ")";
    bool pass = n1 == 2 && n2 == 1;
    if (!d2.empty()) {
        const auto top = *std::max_element(d2.begin(), d2.end(),
                                           [](const auto& a, const auto& b) { return a.persistence() < b.persistence(); });
        const auto ov = optimal_volume(f, top);
        // every edge of the boundary surface lies in exactly two of its triangles
        std::map<Simplex, int> edge_use;
        std::set<Vertex> verts;
        for (Index t : ov.cycle.support()) {
            const auto& tri = f.simplex(t);
            for (int j = 0; j < 3; ++j) ++edge_use[tri.facet(j)];
            for (auto v : tri) verts.insert(v);
        }
        const bool closed = !edge_use.empty() && std::all_of(edge_use.begin(), edge_use.end(),
                                                             [](const auto& e) { return e.second == 2; });
        const long chi = static_cast<long>(verts.size()) - static_cast<long>(edge_use.size()) +
                         static_cast<long>(ov.cycle.size());
        d << "; D2 volume " << ov.volume.size() << " tetrahedra, boundary " << ov.cycle.size()
          << " triangles, closed " << (closed ? "yes" : "no") << ", Euler characteristic " << chi;
        pass = pass && closed;
    } else {
        pass = false;
    }
    const double secs = seconds_since(t0);
    d << "; " << secs << " s (limit 300 s)";
    return {pass && secs < 300.0, d.str()};
}

// ---------------------------------------------------------------------------
// Merge-tree strip
// ---------------------------------------------------------------------------

Filtration strip(std::size_t triangles, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t cols = triangles / 2 + 1;
    auto top = [](std::size_t i) { return static_cast<Vertex>(2 * i); };
    auto bottom = [](std::size_t i) { return static_cast<Vertex>(2 * i + 1); };
    auto cell = [](std::initializer_list<Vertex> vs) { return Simplex::from_unsorted(vs.begin(), vs.end()); };
    struct Entry {
        Simplex s;
        double value;
    };
    std::vector<Entry> entries;
    entries.reserve(cols * 2 + cols * 3 + triangles);
    for (std::size_t i = 0; i < cols; ++i) {
        entries.push_back({cell({top(i)}), 0.0});
        entries.push_back({cell({bottom(i)}), 0.0});
    }
    auto edge_value = [&](std::size_t k) { return entries[k].value; };
    std::vector<std::size_t> vertical(cols), upper(cols), lower(cols), diagonal(cols);
    for (std::size_t i = 0; i < cols; ++i) {
        vertical[i] = entries.size();
        entries.push_back({cell({top(i), bottom(i)}), u(rng)});
        if (i + 1 < cols) {
            upper[i] = entries.size();
            entries.push_back({cell({top(i), top(i + 1)}), u(rng)});
            lower[i] = entries.size();
            entries.push_back({cell({bottom(i), bottom(i + 1)}), u(rng)});
            diagonal[i] = entries.size();
            entries.push_back({cell({top(i + 1), bottom(i)}), u(rng)});
        }
    }
    for (std::size_t i = 0; i + 1 < cols; ++i) {
        const double a = std::max({u(rng), edge_value(upper[i]), edge_value(vertical[i]), edge_value(diagonal[i])});
        entries.push_back({cell({top(i), top(i + 1), bottom(i)}), a});
        const double b = std::max({u(rng), edge_value(lower[i]), edge_value(vertical[i + 1]), edge_value(diagonal[i])});
        entries.push_back({cell({top(i + 1), bottom(i), bottom(i + 1)}), b});
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return x.value != y.value ? x.value < y.value : x.s.dim() < y.s.dim();
    });
    std::vector<Simplex> simplices;
    std::vector<double> values;
    simplices.reserve(entries.size());
    values.reserve(entries.size());
    for (auto& e : entries) {
        simplices.push_back(e.s);
        values.push_back(e.value);
    }
    return Filtration(std::move(simplices), std::move(values), 2);
}

Outcome merge_tree_speed() {
    const auto f = strip(1'000'000, 77);
    const auto t0 = Clock::now();
    const auto forest = compute_forest(f);
    const double secs = seconds_since(t0);
    const auto& st = forest.stats();
    const double ratio = static_cast<double>(st.probes) / static_cast<double>(std::max<std::uint64_t>(st.find_calls, 1));
    std::ostringstream d;
    d << f.counts_by_dim()[2] << " triangles, compute_forest " << secs << " s (limit 10 s), " << st.probes
      << " probes over " << st.find_calls << " find calls (" << ratio << " per call, limit 10), "
      << diagram_from_forest(forest, f).size() << " pairs";
    return {secs < 10.0 && st.probes <= 10 * st.find_calls && f.counts_by_dim()[2] == 1'000'000, d.str()};
}

// ---------------------------------------------------------------------------
// LP solver
// ---------------------------------------------------------------------------

Outcome lp_solver() {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> small(-3, 3), nvars(1, 6), ncons(1, 4);
    int mismatches = 0;
    int by_status[4] = {0, 0, 0, 0};
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = nvars(rng), m = ncons(rng);
        std::vector<std::vector<double>> a(m, std::vector<double>(n));
        std::vector<double> b(m), c(n);
        for (auto& row : a)
            for (auto& v : row) v = small(rng);
        for (auto& v : b) v = small(rng);
        for (auto& v : c) v = small(rng);
        const auto expect = oracle::enumerate_lp(a, b, c);
        lp::LinearProgram prog;
        prog.c = c;
        prog.b = b;
        prog.a = lp::DenseMatrix(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) prog.a(i, j) = a[i][j];
        const auto got = lp::solve(prog);
        ++by_status[static_cast<int>(expect.status)];
        if (got.status != expect.status) {
            ++mismatches;
        } else if (expect.status == lp::Status::optimal) {
            const double err = std::abs(got.objective - expect.objective);
            worst = std::max(worst, err);
            if (err > 1e-9) ++mismatches;
        }
    }
    // degenerate instance on which largest-coefficient pivoting cycles
    lp::LinearProgram cyc;
    const std::vector<std::vector<double>> ca = {
        {1, 0, 0, 0.25, -8, -1, 9}, {0, 1, 0, 0.5, -12, -0.5, 3}, {0, 0, 1, 0, 0, 1, 0}};
    cyc.c = {0, 0, 0, -0.75, 20, -0.5, 6};
    cyc.b = {0, 0, 1};
    cyc.a = lp::DenseMatrix(3, 7);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 7; ++j) cyc.a(i, j) = ca[i][j];
    lp::Options bland;
    bland.rule = lp::PivotRule::bland;
    const auto cs = lp::solve(cyc, bland);
    const bool cycling_ok = cs.status == lp::Status::optimal && std::abs(cs.objective + 1.25) <= 1e-9;
    std::ostringstream d;
    d << "200 random LPs (" << by_status[0] << " optimal, " << by_status[1] << " infeasible, " << by_status[2]
      << " unbounded), " << mismatches << " mismatches, worst objective error " << worst
      << "; cycling instance under Bland: " << lp::to_string(cs.status) << " objective " << cs.objective;
    return {mismatches == 0 && cycling_ok, d.str()};
}

}  // namespace

int main() {
    Suite suite;
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"duality oracle", [&] { return duality(suite); }},
        {"persistent volume validity", [&] { return volumes_valid(suite); }},
        {"uniqueness oracle", [&] { return uniqueness(suite); }},
        {"nesting", [&] { return nesting(suite); }},
        {"golden examples", golden},
        {"torus sample", torus},
        {"merge-tree performance", merge_tree_speed},
        {"LP solver", lp_solver},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
