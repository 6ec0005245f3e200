#include "doctest.h"
#include "perverscope/io.hpp"

#include <filesystem>
#include <functional>
#include <set>

using namespace perverscope;

namespace {

std::string fixture_path(const std::string& name)
{
    return std::string(PERVERSCOPE_FIXTURES) + "/" + name;
}

Json fixture(const std::string& name)
{
    return read_json_file(fixture_path(name));
}

void check_same_site(const CellSite& a, const CellSite& b)
{
    REQUIRE(a.size() == b.size());
    for (int c = 0; c < static_cast<int>(a.size()); ++c) {
        CHECK(a.name(c) == b.name(c));
        CHECK(a.dim(c) == b.dim(c));
    }
    std::set<std::tuple<std::string, std::string, int>> ca, cb;
    for (const auto& cv : a.covers())
        ca.insert({a.name(cv.face), a.name(cv.coface), cv.sign});
    for (const auto& cv : b.covers())
        cb.insert({b.name(cv.face), b.name(cv.coface), cv.sign});
    CHECK(ca == cb);
    CHECK(a.compact == b.compact);
    CHECK(a.affine == b.affine);
    CHECK(a.has_compactification() == b.has_compactification());
    CHECK(a.stratum_names() == b.stratum_names());
    for (const auto& s : a.stratum_names()) {
        CHECK(a.stratum_cells(s) == b.stratum_cells(s));
        CHECK(a.stratum_cdim(s) == b.stratum_cdim(s));
    }
}

void check_same_complex(const SheafComplex& a, const SheafComplex& b, const CellSite& site)
{
    CHECK(a.lo == b.lo);
    REQUIRE(a.terms.size() == b.terms.size());
    for (std::size_t i = 0; i < a.terms.size(); ++i) {
        CHECK(a.terms[i].stalk == b.terms[i].stalk);
        for (const auto& cv : site.covers())
            CHECK(a.terms[i].restriction(cv.face, cv.coface) == b.terms[i].restriction(cv.face, cv.coface));
    }
    REQUIRE(a.diffs.size() == b.diffs.size());
    for (std::size_t i = 0; i < a.diffs.size(); ++i)
        for (std::size_t c = 0; c < site.size(); ++c)
            CHECK(a.diffs[i][c] == b.diffs[i][c]);
}

// [Q -> Q] with the identity differential on every cell.
SheafComplex identity_cone(const CellSite& site)
{
    SheafComplex k;
    k.lo = -1;
    k.terms = {constant_sheaf(site), constant_sheaf(site)};
    std::vector<RationalMatrix> d;
    for (std::size_t c = 0; c < site.size(); ++c)
        d.push_back(identity(1));
    k.diffs.push_back(d);
    return k;
}

void expect_rejected(const std::function<void()>& f, const std::string& needle)
{
    CHECK_THROWS_WITH_AS(f(), doctest::Contains(needle.c_str()), SchemaError);
}

}  // namespace

TEST_CASE("every fixture parses under its schema")
{
    const CellSite disk = site_from_json(fixture("disk_site.json"));
    const CellSite plane = site_from_json(fixture("plane_site.json"));
    const CellSite p1 = site_from_json(fixture("p1_site.json"));
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(PERVERSCOPE_FIXTURES)) {
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".json")
            continue;
        ++count;
        CAPTURE(name);
        const Json j = read_json_file(entry.path().string());
        REQUIRE(j.contains("schema"));
        CHECK(j.contains("comment"));
        const std::string schema = j["schema"].get<std::string>();
        CHECK_NOTHROW(expect_schema(j, schema.c_str()));
        if (schema == kSiteSchema) {
            CHECK_NOTHROW(site_from_json(j));
        } else if (schema == kComplexSchema) {
            const CellSite& site = name.rfind("p1", 0) == 0 ? p1 : disk;
            CHECK_NOTHROW(complex_from_json(j, site));
        } else if (schema == kFlagSchema) {
            CHECK_NOTHROW(flag_from_json(j, name.rfind("plane", 0) == 0 ? plane : disk));
        } else if (schema == kMapSchema) {
            CHECK_NOTHROW(validate_map(map_from_json(j)));
        } else if (schema == kSummandsSchema) {
            const CellSite& site = name.rfind("p1", 0) == 0 ? p1 : name.rfind("plane", 0) == 0 ? plane : disk;
            CHECK_NOTHROW(summands_from_json(j, site));
        } else if (schema == kMonodromySchema) {
            CHECK_NOTHROW(rep_from_json(j));
        } else if (schema == kStratificationSchema) {
            CHECK_NOTHROW(validate_stratification(stratification_from_json(j)));
        } else if (schema == kSurfaceSchema) {
            CHECK_NOTHROW(surface_from_json(j));
        } else if (schema == kWangSchema) {
            CHECK_NOTHROW(wang_from_json(j));
        } else {
            FAIL("unexpected schema " << schema);
        }
    }
    CHECK(count >= 30);
}

TEST_CASE("site round trips")
{
    for (const CellSite& s : {interval_site(), circle_site(5), sphere_site(2), projective_line_site(),
                              closed_cone_site(link_site(1)), product_site(circle_site(2), interval_site())}) {
        const Json j = site_to_json(s);
        CHECK(j["schema"] == kSiteSchema);
        check_same_site(s, site_from_json(j));
    }
    for (const OpenModel& m : {disk_model(), plane_model(), nodal_model(), cone_model(2)})
        check_same_site(m.site, site_from_json(open_model_to_json(m)));
    CHECK_THROWS_AS(site_to_json(disk_model().site), MathError);
}

TEST_CASE("complex round trips")
{
    const OpenModel m = disk_model();
    const CellSite& s = m.site;
    const CellSet u = set_difference(all_cells(s), {s.index("p")});
    const std::vector<SheafComplex> ks{
        single(constant_sheaf(s)),
        single(constant_sheaf(s, 3), -2),
        direct_sum(single(skyscraper(s, s.index("p"), 2)), single(constant_sheaf(s), 1)),
        extend_by_zero(single(constant_sheaf(subsite(s, u))), s, u),
        identity_cone(s),
    };
    for (const auto& k : ks) {
        const SheafComplex back = complex_from_json(complex_to_json(k, s), s);
        check_same_complex(k, back, s);
        CHECK(cohomology(sections_complex(k, s)) == cohomology(sections_complex(back, s)));
    }
    const CellSite c = circle_site(4);
    const SheafComplex tw = single(circle_local_system(matrix_from_ints({{0, -1}, {1, 0}}), 4));
    check_same_complex(tw, complex_from_json(complex_to_json(tw, c), c), c);
}

TEST_CASE("complex term shorthands")
{
    const OpenModel m = disk_model();
    const CellSite& s = m.site;
    const Json j = {{"terms",
                     Json::array({{{"constant", {{"rank", 2}}}},
                                  {{"skyscraper", {{"cell", "p"}}}},
                                  {{"constant", {{"support", Json::array({"p"})}}}}})},
                    {"lo", -1}};
    const SheafComplex k = complex_from_json(j, s);
    CHECK(k.lo == -1);
    CHECK(k.terms[0].stalk == constant_sheaf(s, 2).stalk);
    CHECK(k.terms[1].stalk == skyscraper(s, s.index("p")).stalk);
    CHECK(k.terms[2].stalk == constant_on(s, {s.index("p")}).stalk);
}

TEST_CASE("other round trips")
{
    SUBCASE("flags")
    {
        const CellSite s = sphere_site(2);
        const Flag f = skeleton_flag(s);
        CHECK(flag_from_json(flag_to_json(f, s), s).steps == f.steps);
    }
    SUBCASE("maps")
    {
        for (const CellMap& f : {cyclic_cover_map(3), circle_projection_map(), identity_map(interval_site())}) {
            const CellMap g = map_from_json(map_to_json(f));
            CHECK(g.image == f.image);
            check_same_site(f.source, g.source);
            check_same_site(f.target, g.target);
        }
    }
    SUBCASE("monodromy with rational entries")
    {
        RationalMatrix t = matrix_from_ints({{2, 0}, {0, 1}});
        t(0, 1) = Rational(1, 3);
        const MonodromyRep rep{2, {t, identity(2)}};
        const MonodromyRep back = rep_from_json(rep_to_json(rep));
        CHECK(back.rank == 2);
        REQUIRE(back.generators.size() == 2);
        CHECK(back.generators[0] == t);
    }
    SUBCASE("Wang input")
    {
        const WangInput w = wang_from_json(fixture("wang_torus_fiber.json"));
        const WangInput back = wang_from_json(wang_to_json(w));
        CHECK(back.fiber_betti == w.fiber_betti);
        CHECK(back.monodromy == w.monodromy);
        CHECK(wang(w.fiber_betti, w.monodromy) == GradedDims{{0, 1}, {1, 2}, {2, 2}, {3, 1}});
    }
    SUBCASE("stratifications")
    {
        MapStratification ms = stratification_from_json(fixture("c3_blowup.json"));
        MapStratification back = stratification_from_json(stratification_to_json(ms));
        CHECK(back.name == ms.name);
        CHECK(back.dim_x == ms.dim_x);
        CHECK(back.fiber_product_dim == ms.fiber_product_dim);
        REQUIRE(back.strata.size() == ms.strata.size());
        const MapStratification sw = stratification_from_json(fixture("swap_double_cover.json"));
        const MapStratification sw2 = stratification_from_json(stratification_to_json(sw));
        CHECK(sw2.strata[0].comp_monodromy == sw.strata[0].comp_monodromy);
        CHECK(sw2.strata[0].components == 2);
    }
    SUBCASE("surfaces and shapes")
    {
        const auto pts = surface_from_json(fixture("a2.json"));
        const auto back = surface_from_json(surface_to_json(pts));
        REQUIRE(back.size() == 1);
        CHECK(back[0].intersection == pts[0].intersection);
        CHECK(back[0].components == 2);
        const DTShape shape = dt_semismall(stratification_from_json(fixture("swap_double_cover.json")));
        const DTShape shape2 = shape_from_json(shape_to_json(shape));
        REQUIRE(shape2.summands.size() == shape.summands.size());
        for (std::size_t i = 0; i < shape.summands.size(); ++i) {
            CHECK(shape2.summands[i].stratum == shape.summands[i].stratum);
            CHECK(shape2.summands[i].local_system == shape.summands[i].local_system);
            CHECK(shape2.summands[i].rank == shape.summands[i].rank);
            CHECK(shape2.summands[i].multiplicity == shape.summands[i].multiplicity);
            CHECK(shape2.summands[i].shift == shape.summands[i].shift);
        }
    }
    SUBCASE("graded dimensions")
    {
        const GradedDims g{{-2, 1}, {0, 3}, {5, 2}};
        CHECK(dims_from_json(dims_to_json(g), "x") == g);
    }
}

TEST_CASE("strict rejection")
{
    const CellSite disk = site_from_json(fixture("disk_site.json"));
    expect_rejected([] { read_json_file("/nonexistent/file.json"); }, "cannot open");
    expect_rejected([] { expect_schema(Json{{"schema", "perverscope.flag/1"}}, kSiteSchema); }, "wrong schema");
    expect_rejected([] { expect_schema(Json::object(), kSiteSchema); }, "missing \"schema\"");
    expect_rejected([] { site_from_json(Json{{"cells", Json::array()}}); }, "missing field \"covers\"");
    expect_rejected([] { site_from_json(Json{{"cells", Json::array()}, {"covers", Json::array()}, {"extra", 1}}); },
                    "unknown field \"extra\"");
    expect_rejected(
        [] { site_from_json(Json{{"cells", Json::array({Json::array({"a", 0}), Json::array({"a", 0})})}, {"covers", Json::array()}}); },
        "duplicate cell");
    expect_rejected(
        [] {
            site_from_json(Json{{"cells", Json::array({Json::array({"a", 0}), Json::array({"b", 1})})},
                                {"covers", Json::array({Json::array({"a", "b", 2})})}});
        },
        "signs");
    expect_rejected(
        [] { site_from_json(Json{{"cells", Json::array({Json::array({"a", 0})})}, {"covers", Json::array({Json::array({"a", "z", 1})})}}); },
        "unknown cell");
    expect_rejected(
        [] {
            site_from_json(Json{{"cells", Json::array({Json::array({"a", 0}), Json::array({"b", 1})})},
                                {"covers", Json::array({Json::array({"a", "b", 1})})},
                                {"compact", true},
                                {"open", Json::array({"a"})}});
        },
        "not up-closed");
    expect_rejected([] { site_from_json(Json{{"cells", Json::array()}, {"covers", Json::array()}, {"comment", 3}}); },
                    "comment");

    expect_rejected([&] { complex_from_json(Json{{"terms", Json::array()}}, disk); }, "no terms");
    expect_rejected([&] { complex_from_json(Json{{"terms", Json::array({{{"bogus", Json::object()}}})}}, disk); },
                    "unknown term kind");
    expect_rejected(
        [&] {
            complex_from_json(Json{{"terms", Json::array({{{"explicit", {{"stalks", {{"p", 1}, {"e", 1}}}}}}})}}, disk);
        },
        "missing restriction");

    expect_rejected([] { matrix_from_json(Json::array({Json::array({1, 2}), Json::array({1})}), "m"); }, "ragged");
    expect_rejected([] { matrix_from_json(Json::array({Json::array({"1/x"})}), "m"); }, "bad rational");
    expect_rejected([] { matrix_from_json(Json::array({Json::array({1.5})}), "m"); }, "integers");
    expect_rejected([] { matrix_from_json(Json::array({Json::array({1})}), 2, 2, "m"); }, "2x2");
    CHECK(matrix_from_json(Json::array({Json::array({"-3/6"})}), "m")(0, 0) == Rational(-1, 2));

    expect_rejected([] { dims_from_json(Json{{"x", 1}}, "d"); }, "not an integer");
    expect_rejected([] { dims_from_json(Json{{"0", -1}}, "d"); }, "negative");

    expect_rejected([] { wang_from_json(Json{{"fiber_betti", {{"0", 1}}}, {"monodromy", {{"a", Json::array({Json::array({1})})}}}}); },
                    "");
    expect_rejected([] { wang_from_json(Json{{"fiber_betti", {{"0", 2}}}, {"monodromy", {{"0", Json::array({Json::array({1})})}}}}); },
                    "");
    expect_rejected([] { rep_from_json(Json{{"rank", 2}, {"generators", Json::array({Json::array({Json::array({1})})})}}); }, "");
    expect_rejected([] { stratification_from_json(Json{{"name", "x"}, {"dim_x", "two"}, {"strata", Json::array()}}); },
                    "integer");
    expect_rejected([] { table_from_json(Json{{"level_lo", 0}, {"level_hi", 0}}); }, "missing field \"degrees\"");
}
