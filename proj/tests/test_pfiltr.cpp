#include "doctest.h"
#include "perverscope/io.hpp"
#include "perverscope/models.hpp"
#include "perverscope/perversity.hpp"
#include "perverscope/pfiltr.hpp"


using namespace perverscope;

namespace {

Json fixture(const std::string& name)
{
    return read_json_file(std::string(PERVERSCOPE_FIXTURES) + "/" + name);
}

struct FlagExample {
    CellSite site;
    std::vector<SplitSummand> summands;
    Flag flag;
};

FlagExample disk_example()
{
    FlagExample e{site_from_json(fixture("disk_site.json")), {}, {}};
    e.summands = summands_from_json(fixture("disk_summands.json"), e.site);
    e.flag = flag_from_json(fixture("disk_flag.json"), e.site);
    return e;
}

FlagExample plane_example()
{
    FlagExample e{site_from_json(fixture("plane_site.json")), {}, {}};
    e.summands = summands_from_json(fixture("plane_blowup_summands.json"), e.site);
    e.flag = flag_from_json(fixture("plane_flag.json"), e.site);
    return e;
}

// E_∞^{p, n-p} of the skeletal filtration of the cellular complex of Rf_*K.
std::map<std::pair<int, int>, long> skeletal_limit(const SheafComplex& k, const CellMap& f)
{
    const SheafComplex e = pushforward(k, f);
    const CellSet all = all_cells(f.target);
    int lo = 0;
    const auto coords = cellular_coords(e, f.target, all, lo);
    std::vector<std::vector<int>> levels;
    for (const auto& v : coords) {
        levels.emplace_back();
        for (const auto& x : v)
            levels.back().push_back(f.target.dim(x.cell));
    }
    return limit_page(filtration_by_levels(cellular_complex(e, f.target, all), levels)).dims;
}

FiltrationTable table(std::map<int, long> totals, int lo, std::map<int, std::vector<long>> rows)
{
    FiltrationTable t;
    t.level_lo = lo;
    t.totals = std::move(totals);
    t.dims = std::move(rows);
    t.level_hi = lo + (t.dims.empty() ? 0 : static_cast<int>(t.dims.begin()->second.size())) - 1;
    return t;
}

}  // namespace

TEST_CASE("table accessors and validation")
{
    const FiltrationTable t = table({{0, 2}, {1, 1}}, -1, {{0, {0, 1, 2}}, {1, {0, 0, 1}}});
    CHECK_NOTHROW(t.validate());
    CHECK(t.at(0, -5) == 0);
    CHECK(t.at(0, 0) == 1);
    CHECK(t.at(0, 9) == 2);
    CHECK(t.graded(0, 0) == 1);
    CHECK(t.graded(1, 1) == 1);
    CHECK(t.total(7) == 0);
    CHECK(!t.str().empty());

    CHECK_THROWS_AS(table({{0, 2}}, 0, {{0, {1, 0}}}).validate(), MathError);
    CHECK_THROWS_AS(table({{0, 2}}, 0, {{0, {0, 1}}}).validate(), MathError);
    CHECK_THROWS_AS(table({{0, 2}}, 0, {{0, {0, 3}}}).validate(), MathError);

    const FiltrationTable wide = table({{0, 2}, {1, 1}}, -3, {{0, {0, 0, 0, 1, 2}}, {1, {0, 0, 0, 0, 1}}});
    CHECK(same_filtration(t, wide));
    CHECK(table_differences(t, wide).empty());
}

TEST_CASE("shifts and normalization")
{
    const FiltrationTable t = table({{0, 2}, {1, 1}}, 2, {{0, {0, 1, 2}}, {1, {0, 0, 1}}});
    const NormalizedTable n = normalize(t);
    CHECK(n.m == 3);
    CHECK(n.table.graded(0, 0) == 1);
    CHECK(normalize(n.table).m == 0);
    CHECK(same_filtration(shift_levels(n.table, -3), t));

    for (int a = -3; a <= 3; ++a) {
        const FiltrationTable s = shift_complex(n.table, a);
        // P_b H^n(C[a]) = P_{b+a} H^{n+a}(C)
        for (int deg = -1; deg <= 2; ++deg)
            for (int b = -4; b <= 4; ++b)
                CHECK(s.at(deg - a, b - a) == n.table.at(deg, b));
        CHECK(normalize(s).m == -a);
        CHECK(same_filtration(shift_complex(s, -a), n.table));
    }
    CHECK_THROWS_AS(normalize(FiltrationTable{}), MathError);
}

TEST_CASE("flag kernel filtration equals the split filtration on certified flags")
{
    for (const FlagExample& e : {disk_example(), plane_example()}) {
        CHECK(e.site.affine);
        const FlagCertificate cert = certify_flag(e.summands, e.site, e.flag);
        CHECK(cert.ok);
        CHECK(cert.failures.empty());
        const FiltrationTable split = split_filtration(e.summands, e.site);
        const FiltrationTable kernel = flag_kernel_filtration(assemble(e.summands), e.site, e.flag);
        CHECK(same_filtration(split, kernel));
        CHECK(table_differences(split, kernel).empty());
        // exhaustive, with graded pieces summing to the Betti numbers
        const GradedDims h = cohomology(sections_complex(assemble(e.summands), e.site));
        for (const auto& [n, d] : h.map()) {
            long g = 0;
            for (int b = kernel.level_lo; b <= kernel.level_hi + 1; ++b)
                g += kernel.graded(n, b);
            CHECK(g == d);
            CHECK(kernel.total(n) == d);
        }
    }
}

TEST_CASE("split complex fixture equals the assembled summands")
{
    const FlagExample e = disk_example();
    const SheafComplex k = complex_from_json(fixture("disk_split_complex.json"), e.site);
    const FiltrationTable from_fixture = flag_kernel_filtration(k, e.site, e.flag);
    CHECK(same_filtration(from_fixture, split_filtration(e.summands, e.site)));
}

TEST_CASE("elementary flags")
{
    const OpenModel m = disk_model();
    const SheafComplex q1 = single(constant_sheaf(m.site), -1);
    SUBCASE("Y ⊇ ∅ jumps in one step")
    {
        const Flag f{{all_cells(m.site), {}}};
        const FiltrationTable t = flag_kernel_filtration(q1, m.site, f);
        CHECK(t.at(-1, -2) == 0);
        CHECK(t.at(-1, -1) == 1);
    }
    SUBCASE("a single perverse sheaf sits in level 0")
    {
        const Flag f{{all_cells(m.site), {m.site.index("q")}}};
        const FiltrationTable t = flag_kernel_filtration(q1, m.site, f);
        CHECK(t.at(-1, -1) == 0);
        CHECK(t.at(-1, 0) == 1);
        const FiltrationTable s = split_filtration({{q1, 0}}, m.site);
        CHECK(same_filtration(t, s));
        CHECK(normalize(s).m == 0);
    }
    SUBCASE("a flag that starts below Y is rejected")
    {
        CHECK_THROWS_AS(flag_kernel_filtration(q1, m.site, Flag{{{m.site.index("q")}}}), MathError);
    }
    SUBCASE("non-affine sites are rejected")
    {
        const CellSite p1 = projective_line_site();
        CHECK_THROWS_AS(flag_kernel_filtration(single(constant_sheaf(p1)), p1, skeleton_flag(p1)), MathError);
    }
}

TEST_CASE("uncertified flags are caught")
{
    const FlagExample e = disk_example();
    // the empty-step flag does not separate the two summands
    const Flag bad{{all_cells(e.site), {}}};
    const FlagCertificate cert = certify_flag(e.summands, e.site, bad);
    CHECK(!cert.ok);
    CHECK(!cert.failures.empty());
    CHECK(!same_filtration(flag_kernel_filtration(assemble(e.summands), e.site, bad),
                           split_filtration(e.summands, e.site)));
}

TEST_CASE("split filtration")
{
    const OpenModel m = disk_model();
    const SheafComplex q1 = single(constant_sheaf(m.site), -1);
    const SheafComplex sky = single(skyscraper(m.site, m.site.index("p")));
    const FiltrationTable two = split_filtration({{sky, 0}, {q1, 1}}, m.site);
    CHECK(two.at(0, -1) == 0);
    CHECK(two.at(0, 0) == 1);
    CHECK(two.at(0, 1) == 2);
    CHECK(normalize(two).m == 0);
    const FiltrationTable up = split_filtration({{sky, 2}, {q1, 3}}, m.site);
    CHECK(normalize(up).m == 2);
    CHECK(same_filtration(up, shift_complex(two, -2)));
    CHECK(same_filtration(normalize(up).table, shift_levels(shift_complex(two, -2), 2)));
    // not perverse: Q in degree 0 on the disk
    CHECK_THROWS_WITH_AS(split_filtration({{single(constant_sheaf(m.site)), 0}}, m.site),
                         doctest::Contains("not perverse"), MathError);
    CHECK_THROWS_AS(split_filtration({}, m.site), MathError);
}

TEST_CASE("Leray filtrations")
{
    SUBCASE("identity map: filtration by degree of the complex")
    {
        const CellSite l = projective_line_site();
        const SheafComplex k = complex_from_json(fixture("p1_blowup_complex.json"), l);
        const CellMap id = map_from_json(fixture("p1_identity_map.json"));
        const FiltrationTable t = leray_filtration(k, id);
        CHECK(t.total(0) == 1);
        CHECK(t.total(2) == 3);
        CHECK(t.total(4) == 1);
        CHECK(t.at(2, 0) == 1);
        CHECK(t.at(2, 1) == 1);
        CHECK(t.at(2, 2) == 3);
        CHECK(t.at(4, 1) == 0);
        CHECK(t.at(4, 2) == 1);
        CHECK(same_filtration(t, skeletal_leray_filtration(k, id)));
    }
    SUBCASE("product projection is Künneth split")
    {
        const CellMap pr = map_from_json(fixture("circle_projection_map.json"));
        const SheafComplex k = single(constant_sheaf(pr.source));
        const FiltrationTable t = leray_filtration(k, pr);
        CHECK(t.total(0) == 1);
        CHECK(t.total(1) == 1);
        CHECK(t.at(0, -1) == 0);
        CHECK(t.at(0, 0) == 1);
        CHECK(t.at(1, -1) == 0);
        CHECK(t.at(1, 0) == 1);
        CHECK(same_filtration(t, skeletal_leray_filtration(k, pr)));
    }
    SUBCASE("non-compact target")
    {
        const OpenModel m = disk_model();
        const CellMap id = identity_map(m.site);
        CHECK_THROWS_AS(leray_filtration(single(constant_sheaf(m.site)), id), MathError);
        CHECK_THROWS_AS(skeletal_leray_filtration(single(constant_sheaf(m.site)), id), MathError);
    }
}

TEST_CASE("Leray by truncation agrees with the skeletal spectral sequence")
{
    std::vector<std::pair<SheafComplex, CellMap>> cases;
    for (int n = 1; n <= 3; ++n) {
        const CellMap f = cyclic_cover_map(n);
        cases.emplace_back(single(constant_sheaf(f.source)), f);
        cases.emplace_back(single(circle_local_system(matrix_from_ints({{-1}}), 2 * n)), f);
        cases.emplace_back(single(circle_local_system(matrix_from_ints({{1, 1}, {0, 1}}), 2 * n), 1), f);
    }
    const CellMap pr = circle_projection_map();
    cases.emplace_back(single(constant_sheaf(pr.source)), pr);
    const CellSite l = projective_line_site();
    cases.emplace_back(complex_from_json(fixture("p1_blowup_complex.json"), l), identity_map(l));
    cases.emplace_back(direct_sum(single(constant_sheaf(l), -1), single(skyscraper(l, l.index("s0.0")), 1)),
                       identity_map(l));

    for (const auto& [k, f] : cases) {
        const FiltrationTable a = leray_filtration(k, f);
        const FiltrationTable b = skeletal_leray_filtration(k, f);
        CHECK(same_filtration(a, b));
        // Gr_i H^n = E_∞^{n-i, i}
        const auto einf = skeletal_limit(k, f);
        for (const auto& [n, d] : a.totals) {
            long sum = 0;
            for (int i = a.level_lo; i <= a.level_hi + 1; ++i) {
                auto it = einf.find({n - i, i});
                const long e = it == einf.end() ? 0 : it->second;
                CHECK(a.graded(n, i) == e);
                sum += e;
            }
            CHECK(sum == d);
        }
        // the filtered space is H^*(X, K)
        CHECK(a.totals == cohomology(sections_complex(k, f.source)).map());
    }
}

TEST_CASE("Leray and perverse Leray differ in the middle degree")
{
    const CellSite l = projective_line_site();
    const SheafComplex k = complex_from_json(fixture("p1_blowup_complex.json"), l);
    const auto summands = summands_from_json(fixture("p1_blowup_summands.json"), l);
    const FiltrationTable perverse = normalize(split_filtration(summands, l)).table;
    const FiltrationTable leray = normalize(leray_filtration(k, identity_map(l))).table;
    CHECK(perverse.totals == leray.totals);
    const auto diff = table_differences(leray, perverse);
    REQUIRE(diff.size() == 1);
    CHECK(diff.front() == std::pair<int, int>{2, 1});
    CHECK(leray.at(2, 1) == 1);
    CHECK(perverse.at(2, 1) == 2);
}

TEST_CASE("table round trip through JSON")
{
    const FlagExample e = plane_example();
    const FiltrationTable t = split_filtration(e.summands, e.site);
    const FiltrationTable back = table_from_json(table_to_json(t));
    CHECK(same_filtration(t, back));
    CHECK(back.level_lo == t.level_lo);
    CHECK(back.dims == t.dims);
}
