#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace voc {

/// 1-based position of a simplex in a filtration. 0 means "no simplex".
using Index = std::int64_t;
using Vertex = std::int32_t;

inline constexpr Index kNoIndex = 0;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// ---------------------------------------------------------------------------
// Simplex
// ---------------------------------------------------------------------------

/// A simplex stored as its strictly increasing vertex list. Capacity is
/// fixed so that large complexes stay allocation-free per simplex.
class Simplex {
public:
    static constexpr int kMaxVertices = 5;

    Simplex() = default;

    Simplex(std::initializer_list<Vertex> vs) { assign(vs.begin(), vs.end()); }

    explicit Simplex(std::span<const Vertex> vs) { assign(vs.begin(), vs.end()); }

    /// Builds a simplex from an arbitrary vertex list (sorted on the way in).
    template <class It>
    static Simplex from_unsorted(It first, It last) {
        std::array<Vertex, kMaxVertices> tmp{};
        int n = 0;
        for (; first != last; ++first) {
            if (n == kMaxVertices) throw InputError("simplex has too many vertices");
            tmp[n++] = *first;
        }
        std::sort(tmp.begin(), tmp.begin() + n);
        return Simplex(std::span<const Vertex>(tmp.data(), n));
    }

    int dim() const { return size_ - 1; }
    int size() const { return size_; }
    bool empty() const { return size_ == 0; }
    Vertex operator[](int i) const { return v_[i]; }
    const Vertex* begin() const { return v_.data(); }
    const Vertex* end() const { return v_.data() + size_; }
    std::span<const Vertex> vertices() const { return {v_.data(), static_cast<std::size_t>(size_)}; }

    /// Face obtained by dropping the i-th vertex.
    Simplex facet(int i) const {
        Simplex s;
        for (int j = 0; j < size_; ++j)
            if (j != i) s.v_[s.size_++] = v_[j];
        return s;
    }

    bool contains(const Simplex& face) const {
        return std::includes(begin(), end(), face.begin(), face.end());
    }

    friend bool operator==(const Simplex& a, const Simplex& b) {
        return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
    }
    friend std::strong_ordering operator<=>(const Simplex& a, const Simplex& b) {
        return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
    }

private:
    template <class It>
    void assign(It first, It last) {
        size_ = 0;
        for (; first != last; ++first) {
            if (size_ == kMaxVertices) throw InputError("simplex has too many vertices");
            if (*first < 0) throw InputError("negative vertex id");
            if (size_ > 0 && *first <= v_[size_ - 1])
                throw InputError("simplex vertices must be strictly increasing");
            v_[size_++] = *first;
        }
    }

    std::array<Vertex, kMaxVertices> v_{};
    std::int8_t size_ = 0;
};

inline std::string to_string(const Simplex& s) {
    std::string out = "[";
    for (int i = 0; i < s.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s[i]);
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// Coefficients
// ---------------------------------------------------------------------------

/// The two-element field.
struct Z2 {
    bool bit = false;

    constexpr Z2() = default;
    constexpr Z2(int v) : bit((v & 1) != 0) {}

    friend constexpr Z2 operator+(Z2 a, Z2 b) { return Z2(a.bit != b.bit); }
    friend constexpr Z2 operator-(Z2 a, Z2 b) { return a + b; }
    friend constexpr Z2 operator-(Z2 a) { return a; }
    friend constexpr Z2 operator*(Z2 a, Z2 b) { return Z2(a.bit && b.bit); }
    friend constexpr Z2 operator/(Z2 a, Z2) { return a; }
    friend constexpr bool operator==(Z2 a, Z2 b) { return a.bit == b.bit; }
};

template <class C>
struct CoeffTraits;

template <>
struct CoeffTraits<Z2> {
    static constexpr Z2 zero() { return Z2(0); }
    static constexpr Z2 one() { return Z2(1); }
    static constexpr Z2 sign(int) { return Z2(1); }
    static constexpr bool is_zero(Z2 c) { return !c.bit; }
};

template <>
struct CoeffTraits<double> {
    /// Below this magnitude a real coefficient produced by elimination is treated as cancelled.
    static constexpr double kCancel = 1e-10;
    static constexpr double zero() { return 0.0; }
    static constexpr double one() { return 1.0; }
    static constexpr double sign(int i) { return (i % 2 == 0) ? 1.0 : -1.0; }
    static bool is_zero(double c) { return std::abs(c) <= kCancel; }
};

// ---------------------------------------------------------------------------
// Chain
// ---------------------------------------------------------------------------

/// Sparse formal sum of degree-q simplices addressed by filtration index.
template <class C>
class Chain {
public:
    using Coeff = C;
    using Terms = std::map<Index, C>;

    Chain() = default;
    explicit Chain(int degree) : degree_(degree) {}

    int degree() const { return degree_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const Terms& terms() const { return terms_; }
    auto begin() const { return terms_.begin(); }
    auto end() const { return terms_.end(); }

    C coefficient_of(Index idx) const {
        auto it = terms_.find(idx);
        return it == terms_.end() ? CoeffTraits<C>::zero() : it->second;
    }

    void add(Index idx, C c) {
        auto [it, inserted] = terms_.try_emplace(idx, c);
        if (!inserted) it->second = it->second + c;
        if (CoeffTraits<C>::is_zero(it->second)) terms_.erase(it);
    }

    void add(const Chain& other, C scale) {
        for (const auto& [idx, c] : other.terms_) add(idx, c * scale);
    }

    /// Largest index in the support, or kNoIndex.
    Index max_index() const { return terms_.empty() ? kNoIndex : terms_.rbegin()->first; }

    std::vector<Index> support() const {
        std::vector<Index> out;
        out.reserve(terms_.size());
        for (const auto& [idx, _] : terms_) out.push_back(idx);
        return out;
    }

    friend bool operator==(const Chain& a, const Chain& b) {
        return a.degree_ == b.degree_ && a.terms_ == b.terms_;
    }

private:
    int degree_ = 0;
    Terms terms_;
};

using Z2Chain = Chain<Z2>;
using RealChain = Chain<double>;

/// Drops real coefficients whose magnitude is at most `threshold`.
inline RealChain prune(const RealChain& c, double threshold) {
    RealChain out(c.degree());
    for (const auto& [idx, v] : c)
        if (std::abs(v) > threshold) out.add(idx, v);
    return out;
}

/// Z2 reduction of a real chain with integral coefficients. Non-integral
/// coefficients yield std::nullopt.
inline std::optional<Z2Chain> to_z2(const RealChain& c, double tol = 1e-7) {
    Z2Chain out(c.degree());
    for (const auto& [idx, v] : c) {
        const double r = std::round(v);
        if (std::abs(v - r) > tol) return std::nullopt;
        out.add(idx, Z2(static_cast<int>(std::fmod(std::abs(r), 2.0))));
    }
    return out;
}

inline RealChain to_real(const Z2Chain& c) {
    RealChain out(c.degree());
    for (const auto& [idx, _] : c) out.add(idx, 1.0);
    return out;
}

// ---------------------------------------------------------------------------
// Boundary of a bare simplex
// ---------------------------------------------------------------------------

/// Faces of `s` with their incidence coefficients: (-1)^i for dropping
/// vertex i over the reals, 1 over Z2. Vertices have an empty boundary.
template <class C>
std::vector<std::pair<Simplex, C>> boundary(const Simplex& s) {
    std::vector<std::pair<Simplex, C>> out;
    if (s.dim() < 1) return out;
    out.reserve(s.size());
    for (int i = 0; i < s.size(); ++i) out.emplace_back(s.facet(i), CoeffTraits<C>::sign(i));
    return out;
}

/// Formal sum keyed directly by simplices; used where no filtration exists.
template <class C>
using SimplexChain = std::map<Simplex, C>;

template <class C>
SimplexChain<C> boundary(const SimplexChain<C>& chain) {
    SimplexChain<C> out;
    for (const auto& [s, c] : chain) {
        for (const auto& [face, sign] : boundary<C>(s)) {
            auto [it, inserted] = out.try_emplace(face, c * sign);
            if (!inserted) it->second = it->second + c * sign;
            if (CoeffTraits<C>::is_zero(it->second)) out.erase(it);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Filtration
// ---------------------------------------------------------------------------

struct Point {
    std::vector<double> x;
    std::optional<double> weight;
};

/// Ordered simplices with values. Construction never rejects a bad order;
/// use validate_filtration() to check face, order and value rules. Facet
/// and coface tables are built once and the object is immutable afterwards.
class Filtration {
public:
    Filtration() = default;

    Filtration(std::vector<Simplex> simplices, std::vector<double> values, int ambient_dim = 0,
               std::map<Vertex, Point> points = {})
        : simplices_(std::move(simplices)),
          values_(std::move(values)),
          ambient_dim_(ambient_dim),
          points_(std::move(points)) {
        if (simplices_.size() != values_.size())
            throw InputError("filtration: simplex and value counts differ");
        build_tables();
    }

    Index size() const { return static_cast<Index>(simplices_.size()); }
    bool empty() const { return simplices_.empty(); }
    int ambient_dim() const { return ambient_dim_; }
    int max_dim() const { return max_dim_; }

    const Simplex& simplex(Index i) const { return simplices_[check(i) - 1]; }
    double value(Index i) const { return values_[check(i) - 1]; }
    int dim(Index i) const { return simplex(i).dim(); }

    const std::vector<Simplex>& simplices() const { return simplices_; }
    const std::vector<double>& values() const { return values_; }
    const std::map<Vertex, Point>& points() const { return points_; }
    bool has_coordinates() const { return !points_.empty(); }
    bool has_weights() const {
        return std::any_of(points_.begin(), points_.end(),
                           [](const auto& kv) { return kv.second.weight.has_value(); });
    }

    /// Index of `s`, or kNoIndex. With duplicates the first occurrence wins.
    Index find(const Simplex& s) const {
        auto it = std::lower_bound(lookup_.begin(), lookup_.end(), s,
                                   [this](Index i, const Simplex& key) { return simplices_[i - 1] < key; });
        if (it == lookup_.end() || simplices_[*it - 1] != s) return kNoIndex;
        return *it;
    }

    Index index_of(const Simplex& s) const {
        Index i = find(s);
        if (i == kNoIndex) throw LookupError("simplex " + to_string(s) + " not in filtration");
        return i;
    }

    /// Facet indices in vertex-drop order (entry i drops vertex i). A missing
    /// facet is reported as kNoIndex.
    std::span<const Index> facets(Index i) const {
        check(i);
        return {facets_.data() + facet_offsets_[i - 1],
                static_cast<std::size_t>(facet_offsets_[i] - facet_offsets_[i - 1])};
    }

    /// Immediate cofaces (one dimension up) in index order.
    std::span<const Index> immediate_cofaces(Index i) const {
        check(i);
        return {cofaces_.data() + coface_offsets_[i - 1],
                static_cast<std::size_t>(coface_offsets_[i] - coface_offsets_[i - 1])};
    }

    /// Number of simplices per dimension.
    std::vector<Index> counts_by_dim() const {
        std::vector<Index> out(static_cast<std::size_t>(std::max(max_dim_ + 1, 0)), 0);
        for (const auto& s : simplices_) ++out[s.dim()];
        return out;
    }

    const Point& point(Vertex v) const {
        auto it = points_.find(v);
        if (it == points_.end()) throw LookupError("no coordinates for vertex " + std::to_string(v));
        return it->second;
    }

private:
    Index check(Index i) const {
        if (i < 1 || i > size()) throw LookupError("simplex index " + std::to_string(i) + " out of range");
        return i;
    }

    void build_tables() {
        const auto n = simplices_.size();
        max_dim_ = -1;
        for (const auto& s : simplices_) {
            if (s.empty()) throw InputError("filtration contains an empty simplex");
            max_dim_ = std::max(max_dim_, s.dim());
        }
        lookup_.resize(n);
        std::iota(lookup_.begin(), lookup_.end(), Index{1});
        std::stable_sort(lookup_.begin(), lookup_.end(),
                         [this](Index a, Index b) { return simplices_[a - 1] < simplices_[b - 1]; });

        facet_offsets_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i)
            facet_offsets_[i + 1] = facet_offsets_[i] + (simplices_[i].dim() >= 1 ? simplices_[i].size() : 0);
        facets_.assign(static_cast<std::size_t>(facet_offsets_[n]), kNoIndex);
        std::vector<Index> coface_count(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = simplices_[i];
            if (s.dim() < 1) continue;
            for (int j = 0; j < s.size(); ++j) {
                Index f = find(s.facet(j));
                facets_[facet_offsets_[i] + j] = f;
                if (f != kNoIndex) ++coface_count[f];
            }
        }
        coface_offsets_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) coface_offsets_[i + 1] = coface_offsets_[i] + coface_count[i + 1];
        cofaces_.assign(static_cast<std::size_t>(coface_offsets_[n]), kNoIndex);
        std::vector<Index> fill(coface_offsets_.begin(), coface_offsets_.end() - 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (Index k = facet_offsets_[i]; k < facet_offsets_[i + 1]; ++k) {
                Index f = facets_[k];
                if (f != kNoIndex) cofaces_[fill[f - 1]++] = static_cast<Index>(i + 1);
            }
        }
    }

    std::vector<Simplex> simplices_;
    std::vector<double> values_;
    int ambient_dim_ = 0;
    int max_dim_ = -1;
    std::map<Vertex, Point> points_;

    std::vector<Index> lookup_;
    std::vector<Index> facet_offsets_;
    std::vector<Index> facets_;
    std::vector<Index> coface_offsets_;
    std::vector<Index> cofaces_;
};

/// Boundary of the simplex at `idx` as an indexed chain.
template <class C>
Chain<C> boundary(const Filtration& f, Index idx) {
    const int d = f.dim(idx);
    Chain<C> out(std::max(d - 1, 0));
    if (d < 1) return out;
    auto fs = f.facets(idx);
    for (int i = 0; i < static_cast<int>(fs.size()); ++i) {
        if (fs[i] == kNoIndex)
            throw InputError("face of " + to_string(f.simplex(idx)) + " missing from filtration");
        out.add(fs[i], CoeffTraits<C>::sign(i));
    }
    return out;
}

template <class C>
Chain<C> boundary(const Filtration& f, const Chain<C>& chain) {
    Chain<C> out(std::max(chain.degree() - 1, 0));
    for (const auto& [idx, c] : chain) out.add(boundary<C>(f, idx), c);
    return out;
}

// ---------------------------------------------------------------------------
// Validation, cofaces, canonical ordering
// ---------------------------------------------------------------------------

struct Violation {
    enum class Kind { missing_face, face_after_coface, value_decrease, duplicate, face_value_exceeds };
    Index index;
    Kind kind;
    std::string message;
};

struct ValidationReport {
    bool ok = true;
    std::vector<Violation> violations;
};

inline ValidationReport validate_filtration(const Filtration& f) {
    ValidationReport rep;
    auto flag = [&](Index i, Violation::Kind k, std::string msg) {
        rep.ok = false;
        rep.violations.push_back({i, k, std::move(msg)});
    };
    for (Index i = 1; i <= f.size(); ++i) {
        const auto& s = f.simplex(i);
        if (i > 1 && f.value(i) < f.value(i - 1))
            flag(i, Violation::Kind::value_decrease, "value decreases at index " + std::to_string(i));
        if (f.find(s) != i)
            flag(i, Violation::Kind::duplicate, "simplex " + to_string(s) + " appears more than once");
        auto fs = f.facets(i);
        for (std::size_t j = 0; j < fs.size(); ++j) {
            if (fs[j] == kNoIndex) {
                flag(i, Violation::Kind::missing_face,
                     "face " + to_string(s.facet(static_cast<int>(j))) + " of " + to_string(s) + " is missing");
            } else if (fs[j] > i) {
                flag(i, Violation::Kind::face_after_coface,
                     "face " + to_string(f.simplex(fs[j])) + " comes after " + to_string(s));
            } else if (f.value(fs[j]) > f.value(i)) {
                flag(i, Violation::Kind::face_value_exceeds,
                     "face " + to_string(f.simplex(fs[j])) + " has a larger value than " + to_string(s));
            }
        }
    }
    return rep;
}

/// All simplices of `target_dim` having `s` as a face, in index order.
inline std::vector<Index> cofaces(const Filtration& f, const Simplex& s, int target_dim) {
    const Index start = f.index_of(s);
    std::vector<Index> frontier{start};
    for (int d = s.dim(); d < target_dim && !frontier.empty(); ++d) {
        std::vector<Index> next;
        for (Index i : frontier)
            for (Index c : f.immediate_cofaces(i)) next.push_back(c);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        frontier = std::move(next);
    }
    if (target_dim < s.dim()) return {};
    return frontier;
}

/// Sorts (simplex, value) pairs by (value, dim, vertices). The input must be
/// face-closed and values must not decrease from a face to its coface.
inline Filtration canonical_sort(std::vector<std::pair<Simplex, double>> raw, int ambient_dim = 0,
                                 std::map<Vertex, Point> points = {}) {
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        if (a.first.dim() != b.first.dim()) return a.first.dim() < b.first.dim();
        return a.first < b.first;
    });
    std::vector<Simplex> simplices;
    std::vector<double> values;
    simplices.reserve(raw.size());
    values.reserve(raw.size());
    for (auto& [s, v] : raw) {
        if (!std::isfinite(v)) throw InputError("non-finite filtration value for " + to_string(s));
        simplices.push_back(s);
        values.push_back(v);
    }
    Filtration f(std::move(simplices), std::move(values), ambient_dim, std::move(points));
    for (Index i = 1; i <= f.size(); ++i) {
        if (i > 1 && f.simplex(i) == f.simplex(i - 1))
            throw InputError("simplex " + to_string(f.simplex(i)) + " listed twice");
        for (Index face : f.facets(i)) {
            if (face == kNoIndex)
                throw InputError("input is not face-closed at " + to_string(f.simplex(i)));
            if (f.value(face) > f.value(i))
                throw InputError("face " + to_string(f.simplex(face)) + " has a larger value than " +
                                 to_string(f.simplex(i)));
        }
    }
    return f;
}

}  // namespace voc
