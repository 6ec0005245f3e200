// Writes the fixtures/ corpus.  Usage: gen_fixtures <directory>
#include "perverscope/io.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace perverscope;

namespace {

std::filesystem::path dir;

void write(const std::string& name, Json j, const std::string& comment)
{
    Json out = Json::object();
    out["schema"] = j["schema"];
    out["comment"] = comment;
    for (const auto& [k, v] : j.items())
        if (k != "schema")
            out[k] = v;
    std::ofstream f(dir / name);
    f << out.dump(1) << "\n";
    if (!f)
        throw std::runtime_error("cannot write " + (dir / name).string());
}

Json with_schema(const char* schema, Json body)
{
    Json j = {{"schema", schema}};
    for (const auto& [k, v] : body.items())
        j[k] = v;
    return j;
}

Json constant_complex(long rank = 1, int lo = 0)
{
    return {{"schema", kComplexSchema}, {"lo", lo}, {"terms", Json::array({{{"constant", {{"rank", rank}}}}})}};
}

Json summand(const Json& complex, int level)
{
    Json c = complex;
    c.erase("schema");
    return {{"level", level}, {"complex", c}};
}

Json pieces(const std::vector<Json>& list)
{
    Json a = Json::array();
    for (const auto& x : list)
        a.push_back(x);
    return with_schema(kSummandsSchema, {{"summands", a}});
}

Json perm(const std::vector<std::vector<long>>& rows) { return matrix_to_json(matrix_from_ints(rows)); }

Json stratum(const std::string& name, int dim_s, int k, long components = 1, Json monodromy = nullptr)
{
    Json s = {{"name", name}, {"dim_s", dim_s}, {"fiber_dim", k}, {"components", components}};
    if (!monodromy.is_null())
        s["monodromy"] = monodromy;
    return s;
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::cerr << "usage: gen_fixtures <directory>\n";
        return 2;
    }
    dir = argv[1];
    std::filesystem::create_directories(dir);
    try {
        // sites
        write("circle_site.json", site_to_json(circle_site(4)), "circle with four vertices and four edges; trivial");
        for (int g = 0; g <= 2; ++g)
            write("cone_g" + std::to_string(g) + "_site.json", open_model_to_json(cone_model(2 * g)),
                  "open cone over the link of the affine cone on a genus-" + std::to_string(g) +
                      " curve; strata o (vertex) and smooth; IC vertex stalk is the primitive cohomology of the curve");
        write("disk_site.json", open_model_to_json(disk_model()),
              "open disk with marked point p, affine; derived by hand");
        write("plane_site.json", open_model_to_json(plane_model()),
              "product of two open disks with the origin p|p marked, affine; derived by hand");
        write("nodal_site.json", open_model_to_json(nodal_model()),
              "two open disks glued at their centres; derived by hand");
        write("p1_site.json", site_to_json(projective_line_site()), "2-sphere with marked point s0.0; trivial");

        // complexes
        write("constant.json", constant_complex(), "rank-one constant sheaf in degree 0 on any site; trivial");
        write("constant_shift1.json", constant_complex(1, -1), "constant sheaf placed in degree -1; trivial");
        write("constant_shift2.json", constant_complex(1, -2), "constant sheaf placed in degree -2; trivial");
        {
            const OpenModel m = disk_model();
            const CellSet u = set_difference(all_cells(m.site), {m.site.index("p")});
            const CellSite us = subsite(m.site, u);
            const SheafComplex jl = extend_by_zero(single(constant_sheaf(us)), m.site, u);
            write("disk_jshriek.json", complex_to_json(jl, m.site),
                  "extension by zero of the constant sheaf off p; fails co-support at p under the strict bounds; "
                  "derived by hand");
            Json sky = {{"schema", kComplexSchema},
                        {"lo", 0},
                        {"terms", Json::array({{{"skyscraper", {{"cell", "p"}}}}})}};
            write("disk_summands.json", pieces({summand(sky, 0), summand(constant_complex(1, -1), 1)}),
                  "skyscraper at p at level 0 and the shifted constant sheaf at level 1; derived by hand");
            write("disk_flag.json", with_schema(kFlagSchema, {{"steps", Json::array({"all", Json::array({"q"})})}}),
                  "flag Y, {q}; certified by brute force");
            Json split = {{"schema", kComplexSchema},
                          {"lo", 0},
                          {"terms", Json::array({{{"explicit", complex_to_json(direct_sum(single(skyscraper(m.site, m.site.index("p"))),
                                                                                      single(constant_sheaf(m.site))),
                                                                           m.site)["terms"][0]["explicit"]}}})}};
            write("disk_split_complex.json", split, "direct sum of the disk summands; derived by hand");
        }
        {
            const OpenModel m = plane_model();
            Json sky = {{"schema", kComplexSchema},
                        {"lo", 0},
                        {"terms", Json::array({{{"skyscraper", {{"cell", "p|p"}}}}})}};
            write("plane_blowup_summands.json", pieces({summand(constant_complex(1, -2), 0), summand(sky, 0)}),
                  "pushforward along the blow-up of the plane at the origin: shifted constant sheaf plus a "
                  "skyscraper, both at level 0; derived by hand");
            Json steps = Json::array({"all"});
            Json y1 = Json::array();
            for (int c = 0; c < static_cast<int>(m.site.size()); ++c)
                if (m.site.name(c).rfind("q|", 0) == 0)
                    y1.push_back(m.site.name(c));
            steps.push_back(y1);
            steps.push_back(Json::array({"q|q"}));
            write("plane_flag.json", with_schema(kFlagSchema, {{"steps", steps}}),
                  "flag Y, {q} x D, {(q,q)}; certified by brute force");
        }
        {
            const CellSite l = projective_line_site();
            Json c = {{"schema", kComplexSchema},
                      {"lo", 0},
                      {"terms", Json::array({{{"constant", Json::object()}},
                                             {{"explicit", {{"stalks", Json::object()}}}},
                                             {{"explicit", complex_to_json(direct_sum(single(constant_sheaf(l)),
                                                                                      single(skyscraper(l, l.index("s0.0")))),
                                                                           l)["terms"][0]["explicit"]}}})}};
            write("p1_blowup_complex.json", c,
                  "Q + Q[-2] + Q_t[-2] on the projective line: pushforward of a surface fibred over a curve with one "
                  "reducible fibre; derived by hand");
            Json sky = {{"schema", kComplexSchema},
                        {"lo", 0},
                        {"terms", Json::array({{{"skyscraper", {{"cell", "s0.0"}}}}})}};
            write("p1_blowup_summands.json",
                  pieces({summand(constant_complex(1, -1), 1), summand(sky, 2), summand(constant_complex(1, -1), 3)}),
                  "perverse summands of the same complex at levels 1, 2, 3; derived by hand");
            write("p1_identity_map.json", map_to_json(identity_map(l)), "identity of the projective line; trivial");
        }
        write("cyclic_cover3_map.json", map_to_json(cyclic_cover_map(3)),
              "threefold cyclic cover of the circle; derived by hand");
        write("circle_projection_map.json", map_to_json(circle_projection_map()),
              "projection of circle x interval onto the circle; trivial");

        // monodromy
        write("swap.json", rep_to_json({2, {matrix_from_ints({{0, 1}, {1, 0}})}}),
              "swap of two sheets: trivial plus sign; derived by hand");
        write("rot90.json", rep_to_json({2, {matrix_from_ints({{0, -1}, {1, 0}})}}),
              "rotation by a quarter turn: irreducible of rank 2 over Q, no invariants; derived by hand");
        write("minus_one.json", rep_to_json({1, {matrix_from_ints({{-1}})}}),
              "rank-one monodromy -1: no cohomology on the circle; derived by hand");
        write("s3_perm.json",
              rep_to_json({3, {matrix_from_ints({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}}),
                               matrix_from_ints({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}})}}),
              "permutation representation of S3: trivial plus standard; derived by hand");

        write("wang_torus_fiber.json",
              wang_to_json({GradedDims{{0, 1}, {1, 2}, {2, 1}},
                            {{0, identity(1)}, {1, matrix_from_ints({{1, 1}, {0, 1}})}, {2, identity(1)}}}),
              "2-torus bundle over the circle with unipotent monodromy on H^1: Betti (1,2,2,1); derived by hand");

        // stratifications
        write("plane_blowup.json",
              with_schema(kStratificationSchema, {{"name", "blow-up of the plane at a point"},
                                                  {"dim_x", 2},
                                                  {"generically_finite", true},
                                                  {"strata", Json::array({stratum("open", 2, 0), stratum("origin", 0, 1)})}}),
              "semismall with both strata relevant; IC_Y plus a rank-one skyscraper; standard example");
        write("c3_blowup.json",
              with_schema(kStratificationSchema, {{"name", "blow-up of a point in 3-space"},
                                                  {"dim_x", 3},
                                                  {"generically_finite", true},
                                                  {"fiber_product_dim", 4},
                                                  {"strata", Json::array({stratum("open", 3, 0), stratum("origin", 0, 2)})}}),
              "not semismall (standard example); exceptional fibre is a projective plane so k = 2 and the "
              "defect is 1");
        write("quadric_cone_small.json",
              with_schema(kStratificationSchema,
                          {{"name", "small resolution of the quadric cone"},
                           {"dim_x", 3},
                           {"generically_finite", true},
                           {"strata", Json::array({stratum("open", 3, 0), stratum("vertex", 0, 1)})}}),
              "user-supplied record: a line over the vertex; small");
        write("swap_double_cover.json",
              with_schema(kStratificationSchema,
                          {{"name", "double cover with swap monodromy"},
                           {"dim_x", 1},
                           {"generically_finite", true},
                           {"strata", Json::array({stratum("open", 1, 0, 2, Json::array({perm({{0, 1}, {1, 0}})}))})}}),
              "two sheets exchanged by monodromy: trivial plus sign; derived by hand");
        write("identity.json",
              with_schema(kStratificationSchema, {{"name", "identity"},
                                                  {"dim_x", 2},
                                                  {"generically_finite", true},
                                                  {"strata", Json::array({stratum("all", 2, 0)})}}),
              "identity map; trivial");
        write("hilbert_chow_2.json", stratification_to_json(hilbert_chow_strat(2)),
              "Hilbert-Chow morphism for two points; all strata relevant; standard example");

        // surfaces
        write("minus_one_curve.json", surface_to_json({{"p", matrix_from_ints({{-1}}), 1}}),
              "one (-1)-curve: IC_Y plus a rank-one skyscraper; derived by hand");
        write("a2.json", surface_to_json({{"p", matrix_from_ints({{-2, 1}, {1, -2}}), 2}}),
              "A2 configuration: IC_Y plus a rank-two skyscraper; derived by hand");
        write("degenerate.json", surface_to_json({{"p", matrix_from_ints({{0}}), 1}}),
              "zero intersection form: decomposition obstructed; trivial");
    } catch (const std::exception& e) {
        std::cerr << "gen_fixtures: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
