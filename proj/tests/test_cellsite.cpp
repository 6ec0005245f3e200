#include "doctest.h"
#include "perverscope/models.hpp"
#include "perverscope/rational.hpp"

#include <algorithm>
#include <random>

using namespace perverscope;

namespace {

// Filled triangle: 3 vertices, 3 edges, 1 face, standard orientations.
CellSite filled_triangle(int flip_sign = 1)
{
    CellSite s;
    for (const char* v : {"0", "1", "2"})
        s.add_cell(v, 0);
    for (const char* e : {"01", "02", "12"})
        s.add_cell(e, 1);
    s.add_cell("f", 2);
    s.add_cover("0", "01", -1);
    s.add_cover("1", "01", 1);
    s.add_cover("0", "02", -1);
    s.add_cover("2", "02", 1);
    s.add_cover("1", "12", -1);
    s.add_cover("2", "12", 1);
    s.add_cover("01", "f", flip_sign);
    s.add_cover("02", "f", -1);
    s.add_cover("12", "f", 1);
    s.compact = true;
    return s;
}

CellSite hollow_triangle()
{
    CellSite s;
    for (const char* v : {"0", "1", "2"})
        s.add_cell(v, 0);
    for (const char* e : {"01", "02", "12"})
        s.add_cell(e, 1);
    s.add_cover("0", "01", -1);
    s.add_cover("1", "01", 1);
    s.add_cover("0", "02", -1);
    s.add_cover("2", "02", 1);
    s.add_cover("1", "12", -1);
    s.add_cover("2", "12", 1);
    return s;
}

bool has_kind(const std::vector<Violation>& v, const std::string& kind)
{
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == kind; });
}

// Brute force over all subsets: S is locally closed iff S = U ∩ D for some up-set U and down-set D.
bool locally_closed_by_enumeration(const CellSite& s, const CellSet& cells)
{
    const int n = static_cast<int>(s.size());
    std::vector<CellSet> ups, downs;
    for (long mask = 0; mask < (1L << n); ++mask) {
        CellSet x;
        for (int c = 0; c < n; ++c)
            if (mask & (1L << c))
                x.push_back(c);
        if (is_up_closed(s, x))
            ups.push_back(x);
        if (is_down_closed(s, x))
            downs.push_back(x);
    }
    for (const auto& u : ups)
        for (const auto& d : downs)
            if (set_intersection(u, d) == cells)
                return true;
    return false;
}

CellSet random_subset(std::mt19937& rng, int n)
{
    CellSet x;
    std::bernoulli_distribution coin(0.5);
    for (int c = 0; c < n; ++c)
        if (coin(rng))
            x.push_back(c);
    return x;
}

}  // namespace

TEST_CASE("open stars")
{
    const CellSite c = circle_site(2);
    SUBCASE("maximal cell")
    {
        CHECK(open_star(c, "e0") == CellSet{c.index("e0")});
    }
    SUBCASE("vertex of the two-vertex circle")
    {
        CHECK(open_star(c, "v0") == cells_by_name(c, {"v0", "e0", "e1"}));
    }
    SUBCASE("cone point is the minimum")
    {
        const CellSite cone = cone_model(1).site;
        CHECK(open_star(cone, "o") == all_cells(cone));
    }
    SUBCASE("unknown cell")
    {
        CHECK_THROWS_AS(open_star(c, "nope"), MathError);
    }
    SUBCASE("up-closed with a unique minimal cell")
    {
        const CellSite cone = cone_model(1).site;
        for (int x = 0; x < static_cast<int>(cone.size()); ++x) {
            const CellSet st = open_star(cone, x);
            CHECK(is_up_closed(cone, st));
            for (int y : st)
                CHECK(cone.leq(x, y));
        }
    }
}

TEST_CASE("intersection of two open stars is a union of open stars")
{
    for (const CellSite& s : {circle_site(4), sphere_site(2), disk_model().site, plane_model().site}) {
        const int n = static_cast<int>(s.size());
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const CellSet x = set_intersection(open_star(s, a), open_star(s, b));
                CellSet u;
                for (int c : x)
                    for (int d : open_star(s, c))
                        u.push_back(d);
                std::sort(u.begin(), u.end());
                u.erase(std::unique(u.begin(), u.end()), u.end());
                CHECK(u == x);
            }
    }
}

TEST_CASE("closed complements")
{
    const CellSite i = interval_site();
    CHECK(closed_complement(i, all_cells(i)).empty());
    CHECK(closed_complement(i, {i.index("e")}) == cells_by_name(i, {"v0", "v1"}));
    CHECK_THROWS_AS(closed_complement(i, {i.index("v0")}), MathError);

    const CellSite cone = cone_model(1).site;
    const CellSet u = set_difference(all_cells(cone), {cone.index("o")});
    const CellSet z = closed_complement(cone, u);
    CHECK(z == CellSet{cone.index("o")});
    CHECK(is_up_closed(cone, u));
    CHECK(is_down_closed(cone, z));
}

TEST_CASE("verify_site")
{
    CHECK(verify_site(hollow_triangle()).empty());
    CHECK(verify_site(filled_triangle()).empty());
    CHECK(verify_site(sphere_site(3)).empty());
    CHECK(verify_site(link_site(0)).empty());
    CHECK(verify_site(link_site(2)).empty());
    CHECK(verify_site(closed_cone_site(link_site(1))).empty());
    CHECK(verify_site(plane_model().site).empty());
    CHECK(verify_site(nodal_model().site).empty());

    SUBCASE("flipped edge sign in a filled triangle")
    {
        const auto v = verify_site(filled_triangle(-1));
        CHECK(has_kind(v, "sign-condition"));
    }
    SUBCASE("dimension jump")
    {
        CellSite s;
        s.add_cell("v", 0);
        s.add_cell("f", 2);
        s.add_cover("v", "f", 1);
        CHECK(has_kind(verify_site(s), "dimension"));
    }
    SUBCASE("locally closed strata against enumeration")
    {
        CellSite i = interval_site();
        i.set_stratum("edge", {i.index("e")}, 1);
        i.set_stratum("ends", cells_by_name(i, {"v0", "v1"}), 0);
        CHECK(verify_site(i).empty());
        CHECK(locally_closed_by_enumeration(i, {i.index("e")}));

        const CellSet half = cells_by_name(i, {"v0", "e"});
        CHECK(is_locally_closed(i, half) == locally_closed_by_enumeration(i, half));
        CellSite j = interval_site();
        j.set_stratum("half", half, 1);
        j.set_stratum("rest", {j.index("v1")}, 0);
        CHECK(!has_kind(verify_site(j), "locally-closed") == locally_closed_by_enumeration(j, half));

        CellSite k = interval_site();
        k.set_stratum("edge", {k.index("e")}, 1);
        CHECK(has_kind(verify_site(k), "partition"));

        const CellSet ends = cells_by_name(i, {"v0", "v1"});
        CHECK(is_locally_closed(i, ends));
    }
}

TEST_CASE("is_locally_closed matches enumeration on random subsets")
{
    std::mt19937 rng(7);
    for (const CellSite& s : {filled_triangle(), circle_site(3), interval_site(), sphere_site(1)}) {
        for (int trial = 0; trial < 40; ++trial) {
            const CellSet x = random_subset(rng, static_cast<int>(s.size()));
            CHECK(is_locally_closed(s, x) == locally_closed_by_enumeration(s, x));
        }
    }
}

TEST_CASE("closures")
{
    std::mt19937 rng(11);
    const CellSite s = sphere_site(2);
    for (int trial = 0; trial < 30; ++trial) {
        const CellSet x = random_subset(rng, static_cast<int>(s.size()));
        const CellSet u = up_closure(s, x), d = down_closure(s, x);
        CHECK(is_up_closed(s, u));
        CHECK(is_down_closed(s, d));
        CHECK(set_intersection(u, x) == x);
        CHECK(set_intersection(d, x) == x);
        CHECK(closed_complement(s, u) == set_difference(all_cells(s), u));
    }
}

TEST_CASE("skeleton flags are flags")
{
    for (const CellSite& s : {circle_site(5), sphere_site(3), disk_model().site, plane_model().site,
                              closed_cone_site(link_site(1))}) {
        const Flag f = skeleton_flag(s);
        CHECK_NOTHROW(validate_flag(s, f));
        CHECK(f.steps.front().size() == s.size());
    }
}

TEST_CASE("validate_flag rejects bad flags")
{
    const CellSite i = interval_site();
    CHECK_THROWS_AS(validate_flag(i, Flag{{all_cells(i), {i.index("e")}}}), MathError);
    CHECK_THROWS_AS(validate_flag(i, Flag{{{i.index("v0")}, all_cells(i)}}), MathError);
    CHECK_NOTHROW(validate_flag(i, Flag{{all_cells(i), {i.index("v0")}, {}}}));
}

TEST_CASE("pre-images of flags are flags")
{
    for (int n = 1; n <= 4; ++n) {
        const CellMap f = cyclic_cover_map(n);
        CHECK_NOTHROW(validate_map(f));
        const CellSite& y = f.target;
        const Flag g{{all_cells(y), {y.index("v0"), y.index("v1")}, {y.index("v1")}}};
        const Flag p = pull_flag(f, g);
        CHECK_NOTHROW(validate_flag(f.source, p));
        CHECK(p.steps[2].size() == static_cast<std::size_t>(n));
    }
    const CellMap pr = circle_projection_map();
    const Flag pf = pull_flag(pr, skeleton_flag(pr.target));
    CHECK_NOTHROW(validate_flag(pr.source, pf));
}

TEST_CASE("cellular maps")
{
    const CellSite i = interval_site();
    // collapsing the edge onto a vertex is monotone
    CHECK_NOTHROW(map_by_names(i, i, {{"v0", "v0"}, {"v1", "v0"}, {"e", "v0"}}));
    // sending a vertex above its edge is not
    CHECK_THROWS_AS(map_by_names(i, i, {{"v0", "e"}, {"v1", "v1"}, {"e", "v0"}}), MathError);
    const CellMap id = identity_map(i);
    CHECK(preimage(id, {i.index("e")}) == CellSet{i.index("e")});
}

TEST_CASE("subsites carry names and strata")
{
    const OpenModel m = disk_model();
    CHECK(m.site.size() == m.open.size());
    CHECK(m.site.open_in_compact);
    CHECK(m.site.stratum_cdim("p") == 0);
    CHECK(m.site.stratum_cdim("generic") == 1);
    CHECK(m.site.stratum_of(m.site.index("p")) == "p");
    std::vector<int> parent;
    const CellSite sub = subsite(m.ambient, m.open, &parent);
    for (int c = 0; c < static_cast<int>(sub.size()); ++c)
        CHECK(sub.name(c) == m.ambient.name(parent[static_cast<std::size_t>(c)]));
}
