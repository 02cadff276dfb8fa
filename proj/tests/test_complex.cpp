#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "voc/complex.hpp"

using namespace voc;

TEST(Simplex, RejectsUnsortedOrRepeatedVertices) {
    EXPECT_THROW((Simplex{2, 1}), InputError);
    EXPECT_THROW((Simplex{1, 1}), InputError);
    EXPECT_THROW((Simplex{-1, 2}), InputError);
    std::vector<Vertex> vs{3, 0, 2};
    EXPECT_EQ(Simplex::from_unsorted(vs.begin(), vs.end()), (Simplex{0, 2, 3}));
}

TEST(Simplex, FacetDropsOneVertex) {
    Simplex s{1, 4, 7};
    EXPECT_EQ(s.dim(), 2);
    EXPECT_EQ(s.facet(0), (Simplex{4, 7}));
    EXPECT_EQ(s.facet(1), (Simplex{1, 7}));
    EXPECT_EQ(s.facet(2), (Simplex{1, 4}));
    EXPECT_TRUE(s.contains(Simplex{1, 7}));
    EXPECT_FALSE(s.contains(Simplex{2}));
}

TEST(Filtration, LookupAndTables) {
    auto f = fixtures::filled_triangle();
    EXPECT_EQ(f.size(), 7);
    EXPECT_EQ(f.index_of(Simplex{1, 2}), 6);
    EXPECT_EQ(f.find(Simplex{5}), kNoIndex);
    EXPECT_THROW(f.index_of(Simplex{5}), LookupError);
    EXPECT_THROW(f.simplex(0), LookupError);
    EXPECT_THROW(f.simplex(8), LookupError);
    auto fs = f.facets(7);
    EXPECT_EQ(std::vector<Index>(fs.begin(), fs.end()), (std::vector<Index>{6, 5, 4}));
    auto up = f.immediate_cofaces(1);
    EXPECT_EQ(std::vector<Index>(up.begin(), up.end()), (std::vector<Index>{4, 5}));
    EXPECT_EQ(f.counts_by_dim(), (std::vector<Index>{3, 3, 1}));
    EXPECT_EQ(cofaces(f, Simplex{0}, 2), (std::vector<Index>{7}));
}

TEST(Filtration, BoundaryOfBoundaryVanishes) {
    auto f = fixtures::tied_volume();
    for (Index i = 1; i <= f.size(); ++i) {
        auto b = boundary<double>(f, i);
        EXPECT_TRUE(boundary(f, b).empty()) << i;
        EXPECT_TRUE(boundary(f, boundary<Z2>(f, i)).empty()) << i;
    }
}

TEST(Filtration, ValidationReportsEachViolation) {
    EXPECT_TRUE(validate_filtration(fixtures::cycle_vs_volume()).ok);

    Filtration missing({{0}, {0, 1}}, {0, 0});
    auto r = validate_filtration(missing);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.violations[0].kind, Violation::Kind::missing_face);
    EXPECT_THROW(boundary<Z2>(missing, 2), InputError);

    Filtration late({{0}, {0, 1}, {1}}, {0, 1, 1});
    r = validate_filtration(late);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.violations[0].kind, Violation::Kind::face_after_coface);

    Filtration decreasing({{0}, {1}, {0, 1}}, {0, 2, 1});
    r = validate_filtration(decreasing);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.violations[0].kind, Violation::Kind::value_decrease);

    Filtration dup({{0}, {0}}, {0, 0});
    r = validate_filtration(dup);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(r.violations[0].kind, Violation::Kind::duplicate);
}

TEST(Filtration, CanonicalSortOrdersByValueThenDimension) {
    std::vector<std::pair<Simplex, double>> raw{
        {Simplex{0, 1}, 1.0}, {Simplex{1}, 0.0}, {Simplex{0}, 0.0}, {Simplex{0, 1, 2}, 1.0},
        {Simplex{2}, 0.5},    {Simplex{0, 2}, 1.0}, {Simplex{1, 2}, 0.7}};
    auto f = canonical_sort(raw);
    std::vector<Simplex> expect{{0}, {1}, {2}, {1, 2}, {0, 1}, {0, 2}, {0, 1, 2}};
    EXPECT_EQ(f.simplices(), expect);
    EXPECT_TRUE(validate_filtration(f).ok);

    raw.push_back({Simplex{0, 3}, 2.0});
    EXPECT_THROW(canonical_sort(raw), InputError);
    raw.pop_back();
    raw[1].second = 5.0;  // vertex above its edges
    EXPECT_THROW(canonical_sort(raw), InputError);
    raw[1].second = std::nan("");
    EXPECT_THROW(canonical_sort(raw), InputError);
}

TEST(Chain, AddCancelsAndPrunes) {
    RealChain c(1);
    c.add(3, 1.0);
    c.add(3, -1.0);
    EXPECT_TRUE(c.empty());
    c.add(2, 1e-9);
    c.add(4, 2.0);
    EXPECT_EQ(prune(c, 1e-7).support(), (std::vector<Index>{4}));
    c.add(6, 0.5);
    EXPECT_FALSE(to_z2(c).has_value());
    RealChain d(1);
    d.add(1, -1.0);
    d.add(5, 1.0);
    auto z = to_z2(d);
    ASSERT_TRUE(z);
    EXPECT_EQ(z->support(), (std::vector<Index>{1, 5}));
    Z2Chain y(1);
    y.add(1, Z2(1));
    y.add(1, Z2(1));
    EXPECT_TRUE(y.empty());
}
