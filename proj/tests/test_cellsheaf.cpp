#include "doctest.h"
#include "perverscope/cellsheaf.hpp"
#include "perverscope/localsys.hpp"
#include "perverscope/models.hpp"

#include <algorithm>
#include <random>

using namespace perverscope;

namespace {

GradedDims h_of(const SheafComplex& k, const CellSite& s) { return cohomology(sections_complex(k, s)); }

GradedDims hc_of(const SheafComplex& k, const CellSite& s, const CellSet& u)
{
    return cohomology(compact_sections_complex(k, s, u));
}

CellMap inclusion(const CellSite& sub, const CellSite& site)
{
    std::map<std::string, std::string> table;
    for (int c = 0; c < static_cast<int>(sub.size()); ++c)
        table[sub.name(c)] = sub.name(c);
    return map_by_names(sub, site, table);
}

// Random sheaf complex built from pieces whose supports are open or closed.
SheafComplex random_complex(std::mt19937& rng, const CellSite& s)
{
    const int n = static_cast<int>(s.size());
    std::uniform_int_distribution<int> cell(0, n - 1), kind(0, 3), deg(-1, 1), rank(1, 2);
    SheafComplex k;
    const int pieces = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < pieces; ++i) {
        CellSet seed = {cell(rng)};
        if (rng() % 2)
            seed.push_back(cell(rng));
        std::sort(seed.begin(), seed.end());
        seed.erase(std::unique(seed.begin(), seed.end()), seed.end());
        CellSheaf f;
        switch (kind(rng)) {
        case 0: f = constant_on(s, up_closure(s, seed), rank(rng)); break;
        case 1: f = constant_on(s, down_closure(s, seed), rank(rng)); break;
        case 2: f = skyscraper(s, seed.front(), rank(rng)); break;
        default: f = constant_sheaf(s, rank(rng)); break;
        }
        const SheafComplex p = single(f, deg(rng));
        k = i == 0 ? p : direct_sum(k, p);
    }
    return k;
}

// dim of each term equals the ranks of the maps in and out, around the whole sequence.
bool exact_by_dimensions(const std::vector<GradedDims>& terms, const std::vector<std::map<int, long>>& ranks)
{
    auto rk = [&](int map, int n) {
        auto it = ranks[static_cast<std::size_t>(map)].find(n);
        return it == ranks[static_cast<std::size_t>(map)].end() ? 0L : it->second;
    };
    int lo = 0, hi = 0;
    bool any = false;
    for (const auto& t : terms)
        if (!t.empty()) {
            lo = any ? std::min(lo, t.lo()) : t.lo();
            hi = any ? std::max(hi, t.hi()) : t.hi();
            any = true;
        }
    if (!any)
        return true;
    for (int n = lo - 1; n <= hi + 1; ++n) {
        // A^n: in from C^{n-1}, out to B^n
        if (terms[0][n] != rk(2, n - 1) + rk(0, n))
            return false;
        if (terms[1][n] != rk(0, n) + rk(1, n))
            return false;
        if (terms[2][n] != rk(1, n) + rk(2, n))
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("sections of constant and twisted sheaves")
{
    CHECK(h_of(single(constant_sheaf(circle_site(4))), circle_site(4)) == GradedDims{{0, 1}, {1, 1}});
    CHECK(h_of(single(constant_sheaf(interval_site())), interval_site()) == GradedDims{{0, 1}});
    CHECK(h_of(single(constant_sheaf(sphere_site(2))), sphere_site(2)) == GradedDims{{0, 1}, {2, 1}});
    const CellSite c = circle_site(4);
    CHECK(h_of(single(circle_local_system(matrix_from_ints({{-1}}))), c).empty());
    // non-compact sites go through the injective model
    const OpenModel d = disk_model();
    CHECK(h_of(single(constant_sheaf(d.site)), d.site) == GradedDims{{0, 1}});
    const OpenModel cone = cone_model(2);
    CHECK(h_of(single(constant_sheaf(cone.site)), cone.site) == GradedDims{{0, 1}});
}

TEST_CASE("compactly supported cohomology")
{
    const CellSite c = circle_site(4);
    const SheafComplex q = single(constant_sheaf(c));
    CHECK(hc_of(q, c, all_cells(c)) == h_of(q, c));

    const CellSite i = interval_site();
    const CellSet edge = {i.index("e")};
    CHECK(hc_of(single(constant_sheaf(i)), i, edge) == GradedDims{{1, 1}});

    const OpenModel d = disk_model();
    CHECK(hc_of(single(constant_sheaf(d.ambient)), d.ambient, d.open) == GradedDims{{2, 1}});

    CellSite noncompact = circle_site(3);
    noncompact.compact = false;
    CHECK_THROWS_AS(compact_sections_complex(single(constant_sheaf(noncompact)), noncompact, all_cells(noncompact)),
                    MathError);
}

TEST_CASE("attaching sequences are exact")
{
    std::mt19937 rng(3);
    for (const CellSite& s : {interval_site(), circle_site(4), sphere_site(2), closed_cone_site(link_site(1))}) {
        for (int trial = 0; trial < 6; ++trial) {
            const SheafComplex k = random_complex(rng, s);
            const int n = static_cast<int>(s.size());
            const CellSet u = up_closure(s, {static_cast<int>(rng() % static_cast<unsigned>(n))});
            const CellSet z = closed_complement(s, u);

            const auto les = compact_attaching_sequence(k, s, u);
            CHECK(les.exact);
            CHECK(les.terms[0] == hc_of(k, s, u));
            CHECK(les.terms[1] == h_of(k, s));
            CHECK(les.terms[2] == h_of(restrict_to(k, s, z), subsite(s, z)));
            CHECK(exact_by_dimensions(les.terms, les.ranks));

            const auto loc = local_attaching_sequence(k, s, u);
            CHECK(loc.exact);
            CHECK(loc.terms[1] == h_of(k, s));
            CHECK(loc.terms[2] == h_of(restrict_to(k, s, u), subsite(s, u)));
            CHECK(exact_by_dimensions(loc.terms, loc.ranks));
        }
    }
}

TEST_CASE("interval attaching sequence")
{
    const CellSite i = interval_site();
    const CellSet u = {i.index("e")};
    const auto les = compact_attaching_sequence(single(constant_sheaf(i)), i, u);
    CHECK(les.exact);
    CHECK(les.terms[0] == GradedDims{{1, 1}});
    CHECK(les.terms[1] == GradedDims{{0, 1}});
    CHECK(les.terms[2] == GradedDims{{0, 2}});
}

TEST_CASE("derived stalks")
{
    const CellSite c = circle_site(4);
    const int e = c.index("e2");
    CHECK(derived_stalk(single(skyscraper(c, e, 3)), e) == GradedDims{{0, 3}});
    for (int x = 0; x < static_cast<int>(c.size()); ++x)
        CHECK(derived_stalk(single(constant_sheaf(c)), x) == GradedDims{{0, 1}});

    SUBCASE("punctured cone over a genus-one link")
    {
        const OpenModel m = cone_model(2);
        const CellSet u = set_difference(all_cells(m.site), {m.site.index("o")});
        const CellSite us = subsite(m.site, u);
        const SheafComplex push = pushforward(single(constant_sheaf(us)), inclusion(us, m.site));
        CHECK(derived_stalk(push, m.site.index("o")) == GradedDims{{0, 1}, {1, 2}, {2, 2}, {3, 1}});
        // τ≤1 keeps H^0 and H^1 of the stalk at the vertex
        CHECK(derived_stalk(truncate_leq(push, 1), m.site.index("o")) == GradedDims{{0, 1}, {1, 2}});
    }
}

TEST_CASE("costalks")
{
    const CellSite c = circle_site(4);
    for (int x = 0; x < static_cast<int>(c.size()); ++x) {
        // a skyscraper on a cell of dimension k is the constant sheaf on an open k-cell there
        const SheafComplex sky = single(skyscraper(c, x, 2));
        CHECK(costalk(sky, c, x) == derived_stalk(sky, x).shifted(-c.dim(x)));
    }
    CHECK(costalk(single(constant_sheaf(c)), c, c.index("v0")) == GradedDims{{1, 1}});
    CHECK(costalk(single(constant_sheaf(c)), c, c.index("e0")) == GradedDims{{1, 1}});
    const OpenModel p = plane_model();
    CHECK(costalk(single(constant_sheaf(p.site)), p.site, p.site.index("p|p")) == GradedDims{{4, 1}});

    SUBCASE("cone point of the genus-one cone")
    {
        // Local cohomology at the vertex: H^k_o = H^{k-1}(punctured cone) for k >= 2.
        const OpenModel m = cone_model(2);
        CHECK(costalk(single(constant_sheaf(m.site)), m.site, m.site.index("o")) ==
              GradedDims{{2, 2}, {3, 2}, {4, 1}});
    }
}

TEST_CASE("pushforward along the identity")
{
    std::mt19937 rng(5);
    const CellSite s = projective_line_site();
    for (int trial = 0; trial < 5; ++trial) {
        const SheafComplex k = random_complex(rng, s);
        const SheafComplex p = pushforward(k, identity_map(s));
        CHECK(h_of(p, s) == h_of(k, s));
        for (int x = 0; x < static_cast<int>(s.size()); ++x)
            CHECK(derived_stalk(p, x) == derived_stalk(k, x));
    }
}

TEST_CASE("cyclic covers and products")
{
    const CellMap f = cyclic_cover_map(2);
    const SheafComplex q = single(constant_sheaf(f.source));
    const SheafComplex p = pushforward(q, f);
    for (int x = 0; x < static_cast<int>(f.target.size()); ++x)
        CHECK(derived_stalk(p, x) == GradedDims{{0, 2}});
    CHECK(h_of(p, f.target) == GradedDims{{0, 1}, {1, 1}});
    CHECK(h_of(q, f.source) == GradedDims{{0, 1}, {1, 1}});

    const CellMap pr = circle_projection_map();
    const SheafComplex pp = pushforward(single(constant_sheaf(pr.source)), pr);
    CHECK(h_of(pp, pr.target) == GradedDims{{0, 1}, {1, 1}});
}

TEST_CASE("Leray identity and stalks of pushforwards on random sheaves")
{
    std::mt19937 rng(17);
    std::vector<CellMap> maps = {cyclic_cover_map(1), cyclic_cover_map(3), circle_projection_map(),
                                 identity_map(projective_line_site()), normalization_map()};
    for (const CellMap& f : maps) {
        for (int trial = 0; trial < 4; ++trial) {
            const SheafComplex k = random_complex(rng, f.source);
            const SheafComplex p = pushforward(k, f);
            CHECK(h_of(p, f.target) == h_of(k, f.source));
            for (int y = 0; y < static_cast<int>(f.target.size()); ++y) {
                const CellSet pre = preimage(f, open_star(f.target, y));
                GradedDims expect;
                if (!pre.empty())
                    expect = h_of(restrict_to(k, f.source, pre), subsite(f.source, pre));
                CHECK(derived_stalk(p, y) == expect);
            }
        }
    }
}

TEST_CASE("extension by zero")
{
    const CellSite i = interval_site();
    const SheafComplex q = single(constant_sheaf(i));
    const SheafComplex same = extend_by_zero(q, i, all_cells(i));
    CHECK(h_of(same, i) == h_of(q, i));

    const CellSet edge = {i.index("e")};
    const CellSite es = subsite(i, edge);
    const SheafComplex jl = extend_by_zero(single(constant_sheaf(es)), i, edge);
    CHECK(h_of(jl, i) == GradedDims{{1, 1}});
    CHECK(derived_stalk(jl, i.index("v0")).empty());
    CHECK(derived_stalk(jl, i.index("e")) == GradedDims{{0, 1}});
    CHECK_THROWS_AS(extend_by_zero(single(constant_sheaf(subsite(i, {i.index("v0")}))), i, {i.index("v0")}),
                    MathError);
}

TEST_CASE("j_* of a twisted local system on the punctured disk has the invariants at the puncture")
{
    const OpenModel d = disk_model();
    const int p = d.site.index("p");
    const CellSet u = set_difference(all_cells(d.site), {p});
    const CellSite us = subsite(d.site, u);
    const int a1 = us.index("a1"), left = us.index("left");
    for (const auto& t : {matrix_from_ints({{1}}), matrix_from_ints({{-1}}), matrix_from_ints({{1, 1}, {0, 1}}),
                          matrix_from_ints({{0, -1}, {1, 0}}), matrix_from_ints({{1, 0}, {0, 1}})}) {
        const CellSheaf l = twisted_sheaf(us, all_cells(us), a1, left, t);
        CHECK_NOTHROW(validate_sheaf(l, us));
        const SheafComplex jstar = pushforward(single(l), inclusion(us, d.site));
        const SheafComplex jshriek = extend_by_zero(single(l), d.site, u);
        const long inv = circle_cohomology(t).h0;
        CHECK(derived_stalk(jstar, p)[0] == inv);
        CHECK(derived_stalk(jstar, p)[1] == circle_cohomology(t).h1);
        CHECK(derived_stalk(jshriek, p).empty());
        CHECK(derived_stalk(jstar, d.site.index("q")) == GradedDims{{0, t.rows()}});
    }
}

TEST_CASE("truncation with inclusion")
{
    const OpenModel m = cone_model(2);
    const CellSet u = set_difference(all_cells(m.site), {m.site.index("o")});
    const CellSite us = subsite(m.site, u);
    const SheafComplex push = pushforward(single(constant_sheaf(us)), inclusion(us, m.site));
    for (int t = push.lo - 1; t <= push.hi() + 1; ++t) {
        const Truncation tr = truncate_leq_with_inclusion(push, t);
        CHECK_NOTHROW(validate_complex(tr.complex, m.site));
        for (int x = 0; x < static_cast<int>(m.site.size()); ++x) {
            GradedDims expect;
            const GradedDims full = derived_stalk(push, x);
            for (const auto& [n, v] : full.map())
                if (n <= t)
                    expect.set(n, v);
            CHECK(derived_stalk(tr.complex, x) == expect);
        }
    }
}

TEST_CASE("direct sums with disjoint supports on the two ends of a cover")
{
    const CellSite i = interval_site();
    const SheafComplex a = single(skyscraper(i, i.index("v0")));
    const SheafComplex b = single(skyscraper(i, i.index("e")));
    const SheafComplex s = direct_sum(a, b);
    CHECK_NOTHROW(validate_complex(s, i));
    CHECK(h_of(s, i) == h_of(a, i) + h_of(b, i));
}

TEST_CASE("malformed sheaves are rejected")
{
    const CellSite i = interval_site();
    CellSheaf f = constant_sheaf(i);
    f.restr[{i.index("v0"), i.index("e")}] = matrix_from_ints({{1, 0}});
    CHECK_THROWS_AS(validate_sheaf(f, i), MathError);

    // non-commuting diamond on a filled square
    const CellSite sq = product_site(interval_site(), interval_site());
    CellSheaf g = constant_sheaf(sq);
    g.restr[{sq.index("e|v0"), sq.index("e|e")}] = matrix_from_ints({{2}});
    CHECK_THROWS_AS(validate_sheaf(g, sq), MathError);
}
