#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "voc/alpha.hpp"
#include "voc/complex.hpp"
#include "voc/merge_tree.hpp"
#include "voc/optimal_volume.hpp"
#include "voc/persistence.hpp"

namespace voc::io {

using json = nlohmann::json;

namespace detail {

inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Next line that is neither blank nor a comment, split into tokens.
inline bool next_tokens(std::istream& in, std::vector<std::string>& tokens, std::size_t& line_no) {
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        tokens.clear();
        for (std::string t; ss >> t;) tokens.push_back(t);
        if (!tokens.empty()) return true;
    }
    return false;
}

template <class T>
T parse_number(const std::string& tok, std::size_t line_no) {
    std::istringstream ss(tok);
    T v{};
    ss >> v;
    if (!ss || !ss.eof()) throw InputError("line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v)) throw InputError("line " + std::to_string(line_no) + ": non-finite number");
    return v;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FILT v1
// ---------------------------------------------------------------------------

inline void write_filtration(std::ostream& out, const Filtration& f) {
    out << "filt 1 " << f.ambient_dim() << ' ' << f.size() << '\n';
    for (Index i = 1; i <= f.size(); ++i) {
        const auto& s = f.simplex(i);
        out << i << ' ' << detail::fmt_double(f.value(i)) << ' ' << s.dim();
        for (auto v : s) out << ' ' << v;
        out << '\n';
    }
    if (f.has_coordinates()) {
        out << "points\n";
        for (const auto& [id, p] : f.points()) {
            out << id;
            for (double x : p.x) out << ' ' << detail::fmt_double(x);
            if (p.weight) out << ' ' << detail::fmt_double(*p.weight);
            out << '\n';
        }
    }
}

/// Reads FILT v1 and rejects filtrations that break the face/order/value rules.
inline Filtration read_filtration(std::istream& in) {
    std::vector<std::string> tok;
    std::size_t line = 0;
    if (!detail::next_tokens(in, tok, line) || tok.size() != 4 || tok[0] != "filt" || tok[1] != "1")
        throw InputError("missing 'filt 1 <ambient_dim> <K>' header");
    const int ambient = detail::parse_number<int>(tok[2], line);
    const auto k = detail::parse_number<Index>(tok[3], line);
    if (ambient < 0 || k < 0) throw InputError("negative size in header");
    std::vector<Simplex> simplices;
    std::vector<double> values;
    for (Index i = 1; i <= k; ++i) {
        if (!detail::next_tokens(in, tok, line)) throw InputError("expected " + std::to_string(k) + " simplices");
        if (tok.size() < 4) throw InputError("line " + std::to_string(line) + ": expected 'index value dim v0 ..'");
        if (detail::parse_number<Index>(tok[0], line) != i)
            throw InputError("line " + std::to_string(line) + ": expected index " + std::to_string(i));
        const double value = detail::parse_number<double>(tok[1], line);
        const int dim = detail::parse_number<int>(tok[2], line);
        if (dim < 0 || dim > 4 || tok.size() != static_cast<std::size_t>(dim) + 4)
            throw InputError("line " + std::to_string(line) + ": vertex count does not match dimension");
        std::vector<Vertex> vs;
        for (std::size_t j = 3; j < tok.size(); ++j) vs.push_back(detail::parse_number<Vertex>(tok[j], line));
        try {
            simplices.emplace_back(std::span<const Vertex>(vs));
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(line) + ": " + e.what());
        }
        values.push_back(value);
    }
    std::map<Vertex, Point> points;
    if (detail::next_tokens(in, tok, line)) {
        if (tok.size() != 1 || tok[0] != "points") throw InputError("line " + std::to_string(line) + ": unexpected content");
        while (detail::next_tokens(in, tok, line)) {
            const std::size_t n = static_cast<std::size_t>(ambient);
            if (tok.size() != n + 1 && tok.size() != n + 2)
                throw InputError("line " + std::to_string(line) + ": expected 'id x1..xn [weight]'");
            Point p;
            for (std::size_t j = 1; j <= n; ++j) p.x.push_back(detail::parse_number<double>(tok[j], line));
            if (tok.size() == n + 2) p.weight = detail::parse_number<double>(tok[n + 1], line);
            if (!points.emplace(detail::parse_number<Vertex>(tok[0], line), std::move(p)).second)
                throw InputError("line " + std::to_string(line) + ": duplicate point id");
        }
    }
    Filtration f(std::move(simplices), std::move(values), ambient, std::move(points));
    auto report = validate_filtration(f);
    if (!report.ok) throw InputError("invalid filtration: " + report.violations.front().message);
    if (f.max_dim() > ambient && ambient > 0) throw InputError("simplex dimension exceeds the ambient dimension");
    if (f.has_coordinates())
        for (const auto& s : f.simplices())
            for (auto v : s)
                if (!f.points().count(v)) throw InputError("vertex " + std::to_string(v) + " has no coordinates");
    return f;
}

inline Filtration read_filtration(const std::string& path) {
    auto in = detail::open_input(path);
    return read_filtration(in);
}

inline void write_filtration(const std::string& path, const Filtration& f) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    write_filtration(out, f);
}

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

/// One point per line, `x1 .. xn [weight]`; with `weighted` the last column
/// is the weight.
inline PointCloud read_points(std::istream& in, bool weighted) {
    PointCloud pc;
    if (weighted) pc.weights.emplace();
    std::vector<std::string> tok;
    std::size_t line = 0, cols = 0;
    while (detail::next_tokens(in, tok, line)) {
        if (cols == 0) cols = tok.size();
        if (tok.size() != cols) throw InputError("line " + std::to_string(line) + ": inconsistent column count");
        std::vector<double> p;
        for (const auto& t : tok) p.push_back(detail::parse_number<double>(t, line));
        if (weighted) {
            pc.weights->push_back(p.back());
            p.pop_back();
        }
        pc.points.push_back(std::move(p));
    }
    if (pc.points.empty()) throw InputError("no points");
    return pc;
}

inline PointCloud read_points(const std::string& path, bool weighted) {
    auto in = detail::open_input(path);
    return read_points(in, weighted);
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json pair_json(const PersistencePair& p) {
    return {{"degree", p.degree},
            {"birth_index", p.birth_index},
            {"death_index", p.death_index ? json(*p.death_index) : json(nullptr)},
            {"birth_value", number_or_null(p.birth_value)},
            {"death_value", p.essential() ? json(nullptr) : number_or_null(p.death_value)},
            {"essential", p.essential()}};
}

inline json diagram_json(int degree, const std::vector<PersistencePair>& pairs) {
    json arr = json::array();
    for (const auto& p : pairs) {
        json j = pair_json(p);
        j.erase("degree");
        arr.push_back(std::move(j));
    }
    return {{"degree", degree}, {"pairs", std::move(arr)}};
}

inline json simplex_json(const Simplex& s) {
    json v = json::array();
    for (auto x : s) v.push_back(x);
    return v;
}

/// Chain as a list of {index, vertices, coefficient}.
inline json chain_json(const Filtration& f, const RealChain& c) {
    json arr = json::array();
    for (const auto& [idx, coeff] : c)
        arr.push_back({{"index", idx}, {"vertices", simplex_json(f.simplex(idx))}, {"coefficient", coeff}});
    return arr;
}

inline json volume_json(const Filtration& f, const OptimalVolume& ov) {
    json kids = json::array();
    for (const auto& p : ov.children) kids.push_back(pair_json(p));
    const auto& d = ov.diagnostics;
    return {{"pair", pair_json(ov.pair)},
            {"volume", chain_json(f, ov.volume)},
            {"cycle", chain_json(f, ov.cycle)},
            {"children", std::move(kids)},
            {"radius_used", ov.radius_used ? json(*ov.radius_used) : json(nullptr)},
            {"retried_with_epsilon", ov.retried_with_epsilon},
            {"diagnostics",
             {{"objective", d.objective},
              {"lp_iterations", d.lp_iterations},
              {"lp_variables", d.lp_variables},
              {"lp_constraints", d.lp_constraints},
              {"presolved_variables", d.presolved_variables},
              {"radius_attempts", d.radius_attempts}}}};
}

inline json cycle_json(const Filtration& f, const PersistencePair& p, const RealChain& z) {
    return {{"pair", pair_json(p)}, {"cycle", chain_json(f, z)}};
}

/// Pairs of the persistence tree with parent links and volumes. Pairs are
/// keyed by death index.
inline json tree_json(const PersistenceForest& forest, const PersistenceTree& tree,
                      bool include_zero_persistence = false) {
    json nodes = json::array();
    for (std::size_t i = 0; i < tree.pairs.size(); ++i) {
        const auto& p = tree.pairs[i];
        if (!include_zero_persistence && p.zero_persistence()) continue;
        // skip zero-persistence ancestors so parents stay visible pairs
        std::optional<Index> parent = tree.parent[i];
        while (!include_zero_persistence && parent && tree.pairs[*tree.position(*parent)].zero_persistence())
            parent = tree.parent[*tree.position(*parent)];
        json kids = json::array();
        std::vector<Index> stack = tree.children[i];
        while (!stack.empty()) {
            Index d = stack.back();
            stack.pop_back();
            const auto pos = *tree.position(d);
            if (!include_zero_persistence && tree.pairs[pos].zero_persistence())
                stack.insert(stack.end(), tree.children[pos].begin(), tree.children[pos].end());
            else
                kids.push_back(d);
        }
        std::vector<Index> sorted_kids = kids.get<std::vector<Index>>();
        std::sort(sorted_kids.begin(), sorted_kids.end());
        json j = pair_json(p);
        j["parent"] = parent ? json(*parent) : json(nullptr);
        j["children"] = sorted_kids;
        j["volume"] = volume_from_forest(forest, p);
        nodes.push_back(std::move(j));
    }
    return {{"degree", forest.top_dim() - 1}, {"nodes", std::move(nodes)}};
}

// ---------------------------------------------------------------------------
// OFF mesh
// ---------------------------------------------------------------------------

/// Triangles of the cycle when it has degree 2, else the triangles of the
/// volume; lower-degree cycles are written as two-vertex faces. Vertices are
/// padded to three coordinates.
inline void write_off(std::ostream& out, const Filtration& f, const OptimalVolume& ov) {
    if (!f.has_coordinates()) throw InputError("OFF export needs vertex coordinates");
    const RealChain& faces = ov.cycle.degree() == 2 ? ov.cycle : ov.volume.degree() == 2 ? ov.volume : ov.cycle;
    std::map<Vertex, std::size_t> vid;
    for (const auto& [idx, c] : faces)
        for (auto v : f.simplex(idx)) vid.emplace(v, 0);
    std::size_t next = 0;
    for (auto& [v, i] : vid) i = next++;
    out << "OFF\n" << vid.size() << ' ' << faces.size() << " 0\n";
    for (const auto& [v, i] : vid) {
        const auto& x = f.point(v).x;
        for (std::size_t d = 0; d < 3; ++d) out << (d ? " " : "") << detail::fmt_double(d < x.size() ? x[d] : 0.0);
        out << '\n';
    }
    for (const auto& [idx, c] : faces) {
        std::vector<Vertex> vs(f.simplex(idx).begin(), f.simplex(idx).end());
        if (c < 0 && vs.size() >= 2) std::swap(vs[0], vs[1]);
        out << vs.size();
        for (auto v : vs) out << ' ' << vid.at(v);
        out << '\n';
    }
}

}  // namespace voc::io
