// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "perverscope/decomp.hpp"
#include "perverscope/hilbpart.hpp"
#include "perverscope/io.hpp"
#include "perverscope/lefcomb.hpp"
#include "perverscope/localsys.hpp"
#include "perverscope/models.hpp"
#include "perverscope/perversity.hpp"
#include "perverscope/pfiltr.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace perverscope;

namespace {

// Collects the first few failed expectations of one criterion.
struct Checker {
    long checks = 0;
    long failed = 0;
    std::vector<std::string> failures;

    void expect(bool ok, const std::string& what)
    {
        ++checks;
        if (ok)
            return;
        if (++failed <= 5)
            failures.push_back(what);
    }
};

Json fixture(const std::string& name)
{
    return read_json_file(std::string(PERVERSCOPE_FIXTURES) + "/" + name);
}

CellSite open_part(const CellSite& site, const std::string& stratum)
{
    return subsite(site, site.stratum_cells(stratum));
}

GradedDims h_of(const SheafComplex& k, const CellSite& site)
{
    return cohomology(sections_complex(k, site));
}

RationalMatrix random_invertible(std::mt19937& rng, int n)
{
    std::uniform_int_distribution<int> entry(-4, 4), den(1, 4);
    for (;;) {
        RationalMatrix m = zeros(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                m(i, j) = Rational(entry(rng), den(rng));
        if (!is_zero(determinant<Rational>(m)))
            return m;
    }
}

// ---------------------------------------------------------------------------

void circle_local_systems(Checker& c)
{
    std::mt19937 rng(2024);
    const CellSite circle = circle_site(4);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        RationalMatrix t = random_invertible(rng, n);
        if (trial % 5 == 0) {
            // unipotent, so that both groups are nonzero
            t = identity(n);
            if (n > 1)
                t(0, n - 1) = Rational(rng() % 5 + 1);
        }
        const RationalMatrix tm = t - identity(n);
        const long corank = n - rank<Rational>(tm);
        const CircleCohomology cc = circle_cohomology(t);
        c.expect(cc.h0 == corank, "H^0 differs from dim ker(T - 1)");
        c.expect(cc.h1 == corank, "H^1 differs from dim coker(T - 1)");
        GradedDims expect;
        expect.add(0, cc.h0);
        expect.add(1, cc.h1);
        const GradedDims h = h_of(single(circle_local_system(t, 4)), circle);
        c.expect(h == expect, "cellular circle gives " + h.str() + ", expected " + expect.str());
    }
}

SheafComplex cone_ic(int genus)
{
    const OpenModel m = cone_model(2 * genus);
    return deligne_ic(m.site, constant_sheaf(open_part(m.site, "smooth")));
}

void cone_ic_stalks(Checker& c)
{
    for (int g = 0; g <= 2; ++g) {
        const OpenModel m = cone_model(2 * g);
        const SheafComplex ic = cone_ic(g);
        const int o = m.site.index("o");
        GradedDims vertex;
        vertex.add(0, 1);
        vertex.add(1, 2 * g);
        const std::string tag = "g = " + std::to_string(g) + ": ";
        c.expect(derived_stalk(ic, o) == vertex, tag + "vertex stalk " + derived_stalk(ic, o).str());
        for (int x = 0; x < static_cast<int>(m.site.size()); ++x) {
            if (x == o)
                continue;
            c.expect(derived_stalk(ic, x) == GradedDims{{0, 1}}, tag + "stalk at " + m.site.name(x));
        }
        if (g == 0) {
            const SheafComplex q = single(constant_sheaf(m.site));
            for (int x = 0; x < static_cast<int>(m.site.size()); ++x)
                c.expect(derived_stalk(ic, x) == derived_stalk(q, x), "g = 0 differs from the constant sheaf");
            c.expect(h_of(ic, m.site) == h_of(q, m.site), "g = 0 sections differ from the constant sheaf");
        }
    }
}

void selfduality_dichotomy(Checker& c)
{
    for (int g = 0; g <= 2; ++g) {
        const OpenModel m = cone_model(2 * g);
        const std::string tag = "g = " + std::to_string(g) + ": ";
        c.expect(numerical_selfduality(cone_ic(g), m.site, 2).self_dual, tag + "IC[2] not self-dual");
        const SelfDualityReport q = numerical_selfduality(single(constant_sheaf(m.site)), m.site, 2);
        c.expect(q.self_dual == (g == 0), tag + "Q[2] self-duality " + std::to_string(q.self_dual));
        // H^k(Q[2]) is Q in degree -2; H_c^{-k}(Q[2]) = H^{2-k}_c(U) = H^{1-k}(U) for k != -2 on
        // the open cone, so the failures are at k = 0 and k = -1 with the ranks of H^1(U), H^2(U).
        const GradedDims u = punctured_cone_cohomology(curve_link_datum(g));
        std::map<int, std::pair<long, long>> expect;
        for (int k = -1; k <= 0; ++k)
            if (u[1 - k] != 0)
                expect[k] = {0, u[1 - k]};
        c.expect(q.defects == expect, tag + "failure degrees differ from the punctured cone table");
    }
}

void leray_identity(Checker& c)
{
    struct Case {
        std::string name;
        SheafComplex k;
        CellMap f;
    };
    std::vector<Case> cases;
    for (const char* map_file : {"circle_projection_map.json", "cyclic_cover3_map.json", "p1_identity_map.json"}) {
        const CellMap f = map_from_json(fixture(map_file));
        for (const char* sheaf : {"constant.json", "constant_shift1.json", "constant_shift2.json"})
            cases.push_back({std::string(map_file) + " / " + sheaf, complex_from_json(fixture(sheaf), f.source), f});
    }
    const CellMap cover = map_from_json(fixture("cyclic_cover3_map.json"));
    const int cells = static_cast<int>(cover.source.size()) / 2;
    for (const char* rep_file : {"minus_one.json", "rot90.json", "swap.json"}) {
        const MonodromyRep rep = rep_from_json(fixture(rep_file));
        cases.push_back({std::string("cyclic_cover3_map.json / ") + rep_file,
                         single(circle_local_system(rep.generators.front(), cells)), cover});
    }
    const CellMap p1 = map_from_json(fixture("p1_identity_map.json"));
    cases.push_back({"p1_identity_map.json / p1_blowup_complex.json",
                     complex_from_json(fixture("p1_blowup_complex.json"), p1.source), p1});

    for (const Case& e : cases) {
        const SheafComplex push = pushforward(e.k, e.f);
        c.expect(h_of(push, e.f.target) == h_of(e.k, e.f.source), e.name + ": H(Y, Rf_*K) != H(X, K)");
        if (e.name.rfind("cyclic", 0) == 0) {
            // Leray spectral sequence: skeletal filtration of the cellular complex of Rf_*K
            const CellSet all = all_cells(e.f.target);
            int lo = 0;
            const auto coords = cellular_coords(push, e.f.target, all, lo);
            std::vector<std::vector<int>> levels;
            for (const auto& v : coords) {
                levels.emplace_back();
                for (const auto& x : v)
                    levels.back().push_back(e.f.target.dim(x.cell));
            }
            const FilteredComplex fc = filtration_by_levels(cellular_complex(push, e.f.target, all), levels);
            c.expect(is_E2_degenerate(fc), e.name + ": Leray spectral sequence not E2-degenerate");
        }
    }
}

void semismall_suite(Checker& c)
{
    const MapStratification plane = stratification_from_json(fixture("plane_blowup.json"));
    c.expect(is_semismall(plane), "plane blow-up not semismall");
    c.expect(relevant_strata(plane).size() == plane.strata.size(), "plane blow-up has irrelevant strata");
    for (int n = 1; n <= 6; ++n) {
        const MapStratification hc = hilbert_chow_strat(n);
        c.expect(is_semismall(hc), "Hilbert-Chow n = " + std::to_string(n) + " not semismall");
        c.expect(relevant_strata(hc).size() == hc.strata.size(),
                 "Hilbert-Chow n = " + std::to_string(n) + " has irrelevant strata");
    }
    c.expect(!is_semismall(stratification_from_json(fixture("c3_blowup.json"))), "C^3 blow-up reported semismall");

    const DTShape shape = dt_semismall(plane);
    c.expect(shape.summands.size() == 2, "plane blow-up shape has " + std::to_string(shape.summands.size()) + " summands");
    if (shape.summands.size() == 2) {
        const DTSummand& ic = shape.summands[0];
        const DTSummand& sky = shape.summands[1];
        c.expect(ic.stratum == "open" && ic.rank == 1 && ic.multiplicity == 1 && ic.local_system == "trivial",
                 "first summand is not IC_Y");
        c.expect(sky.stratum == "origin" && sky.rank * sky.multiplicity == 1 && sky.local_system == "trivial",
                 "second summand is not a rank-one skyscraper");
    }
    const EndoReport e = endo_dimension(shape, plane);
    c.expect(e.algebra_dim == 2, "endomorphism dimension " + std::to_string(e.algebra_dim));
    c.expect(e.component_count == e.algebra_dim, "component count " + std::to_string(e.component_count));
}

void refined_forms(Checker& c)
{
    for (const char* file : {"minus_one_curve.json", "a2.json"})
        for (const ExceptionalConfig& p : surface_from_json(fixture(file)))
            c.expect(refined_form_sign(p.intersection, 1), std::string(file) + ": form not negative definite");
    c.expect(!refined_form_sign(matrix_from_ints({{0}}), 1), "[[0]] accepted");
    c.expect(!refined_form_sign(matrix_from_ints({{1}}), 1), "[[1]] accepted");
}

void stanley_pipeline(Checker& c)
{
    const std::vector<HVector> expect = {{1, 1, 1, 1}, {1, 3, 3, 1}, {1, 9, 9, 1}};
    const auto polys = shipped_polytopes();
    c.expect(polys.size() == 3, "expected three shipped polytopes");
    for (std::size_t i = 0; i < polys.size() && i < expect.size(); ++i) {
        const HVector h = f_to_h(polys[i].f, polys[i].d);
        c.expect(h == expect[i], polys[i].name + ": wrong h-vector");
        c.expect(mcmullen_check(h).ok(), polys[i].name + ": McMullen conditions fail");
    }
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> entry(-1000, 1000);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 1 + static_cast<int>(rng() % 8);
        FVector f(static_cast<std::size_t>(d));
        for (auto& x : f)
            x = entry(rng);
        c.expect(h_to_f(f_to_h(f, d), d) == f, "round trip failed at trial " + std::to_string(trial));
    }
}

// Invariants of S_a on the a-th tensor power of a graded space with Koszul signs, counted by orbits
// of basis tensors: an orbit contributes one invariant unless some permutation fixing a tensor
// acts on it by -1.
GradedDims brute_sym_power(const GradedDims& betti, int a)
{
    std::vector<int> degree;
    for (const auto& [q, b] : betti.map())
        for (long k = 0; k < b; ++k)
            degree.push_back(q);
    const int n = static_cast<int>(degree.size());
    GradedDims out;
    if (a == 0) {
        out.add(0, 1);
        return out;
    }
    if (n == 0)
        return out;
    std::vector<int> perm(static_cast<std::size_t>(a));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> group;
    do
        group.push_back(perm);
    while (std::next_permutation(perm.begin(), perm.end()));

    auto odd = [&](int basis) { return degree[static_cast<std::size_t>(basis)] % 2 != 0; };
    std::set<std::vector<int>> seen;
    std::vector<int> t(static_cast<std::size_t>(a), 0);
    for (;;) {
        if (!seen.count(t)) {
            std::map<std::vector<int>, int> image_sign;
            bool killed = false;
            for (const auto& s : group) {
                std::vector<int> u(static_cast<std::size_t>(a));
                for (int i = 0; i < a; ++i)
                    u[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])];
                int sign = 1;
                for (int i = 0; i < a; ++i)
                    for (int j = i + 1; j < a; ++j)
                        if (s[static_cast<std::size_t>(i)] > s[static_cast<std::size_t>(j)] &&
                            odd(t[static_cast<std::size_t>(s[static_cast<std::size_t>(i)])]) &&
                            odd(t[static_cast<std::size_t>(s[static_cast<std::size_t>(j)])]))
                            sign = -sign;
                auto [it, fresh] = image_sign.emplace(u, sign);
                if (!fresh && it->second != sign)
                    killed = true;
            }
            for (const auto& [u, s] : image_sign)
                seen.insert(u);
            if (!killed) {
                int deg = 0;
                for (int x : t)
                    deg += degree[static_cast<std::size_t>(x)];
                out.add(deg, 1);
            }
        }
        int i = a - 1;
        while (i >= 0 && t[static_cast<std::size_t>(i)] == n - 1)
            t[static_cast<std::size_t>(i--)] = 0;
        if (i < 0)
            break;
        ++t[static_cast<std::size_t>(i)];
    }
    return out;
}

void gottsche_partitions(Checker& c)
{
    const auto e = euler_product_coeffs(20);
    for (int n = 0; n <= 20; ++n)
        c.expect(e[static_cast<std::size_t>(n)] == static_cast<long>(partitions(n).size()),
                 "Euler product coefficient " + std::to_string(n));
    const SurfaceBetti c2{{1, 0, 0, 0, 0}};
    for (int n = 0; n <= 8; ++n)
        c.expect(gottsche(c2, n).total() == e[static_cast<std::size_t>(n)], "C^2, n = " + std::to_string(n));

    const SurfaceBetti p2{{1, 0, 1, 0, 1}};
    const SurfaceBetti genus_one{{1, 4, 6, 4, 1}};  // abelian surface
    for (const SurfaceBetti& s : {p2, genus_one})
        for (int n = 1; n <= 4; ++n) {
            const GradedDims g = gottsche(s, n);
            bool pal = true;
            for (const auto& [q, b] : g.map())
                pal = pal && q >= 0 && q <= 4 * n && g[4 * n - q] == b;
            c.expect(pal, "not palindromic about 2n for n = " + std::to_string(n) + ": " + g.str());
        }

    const SurfaceBetti k3{{1, 0, 22, 0, 1}};
    const SurfaceBetti ruled{{1, 2, 2, 2, 1}};
    for (const SurfaceBetti& s : {c2, p2, genus_one, ruled, k3})
        for (int a = 0; a <= 3; ++a)
            c.expect(sym_power_betti(s, a) == brute_sym_power(s.dims(), a),
                     "symmetric power a = " + std::to_string(a) + " of " + s.dims().str());
}

void heisenberg(Checker& c)
{
    const HeisenbergReport r = heisenberg_check(6);
    c.expect(r.ok && r.failures.empty(), r.failures.empty() ? "report not ok" : r.failures.front());
    c.expect(r.identities_checked > 0, "no identities checked");
    c.expect(r.graded_dims == std::vector<long>{1, 1, 2, 3, 5, 7, 11}, "graded dimensions");
}

void perverse_filtration(Checker& c)
{
    struct Example {
        std::string name;
        const char* site;
        const char* summands;
        const char* flag;
    };
    for (const Example& e : {Example{"split two-summand model", "disk_site.json", "disk_summands.json", "disk_flag.json"},
                             Example{"blow-up model", "plane_site.json", "plane_blowup_summands.json", "plane_flag.json"}}) {
        const CellSite site = site_from_json(fixture(e.site));
        const auto summands = summands_from_json(fixture(e.summands), site);
        const Flag flag = flag_from_json(fixture(e.flag), site);
        const FlagCertificate cert = certify_flag(summands, site, flag);
        c.expect(cert.ok, e.name + ": flag not certified");
        const FiltrationTable split = split_filtration(summands, site);
        const FiltrationTable kernel = flag_kernel_filtration(assemble(summands), site, flag);
        c.expect(same_filtration(split, kernel), e.name + ": flag kernel " + kernel.str() + " vs split " + split.str());
        // every degree and level, over a range covering both tables
        const int lo = std::min(split.level_lo, kernel.level_lo) - 1;
        const int hi = std::max(split.level_hi, kernel.level_hi) + 1;
        std::set<int> degrees;
        for (const auto& [n, d] : split.totals)
            degrees.insert(n);
        for (const auto& [n, d] : kernel.totals)
            degrees.insert(n);
        for (int n : degrees)
            for (int b = lo; b <= hi; ++b)
                c.expect(split.at(n, b) == kernel.at(n, b), e.name + ": differs at degree " + std::to_string(n) +
                                                                ", level " + std::to_string(b));
    }
}

void perversity_ledger(Checker& c)
{
    struct IcCase {
        std::string name;
        CellSite site;
        SheafComplex ic;
        int shift;
    };
    std::vector<IcCase> cases;
    for (int g = 0; g <= 2; ++g)
        cases.push_back({"cone g = " + std::to_string(g), cone_model(2 * g).site, cone_ic(g), 2});
    const OpenModel d = disk_model();
    const CellSite us = open_part(d.site, "generic");
    cases.push_back({"disk, constant", d.site, deligne_ic(d.site, constant_sheaf(us)), 1});
    for (const auto& t : {matrix_from_ints({{-1}}), matrix_from_ints({{1, 1}, {0, 1}}),
                          matrix_from_ints({{0, -1}, {1, 0}})})
        cases.push_back({"disk, twisted rank " + std::to_string(t.rows()), d.site,
                         deligne_ic(d.site, twisted_sheaf(us, all_cells(us), us.index("a1"), us.index("left"), t)), 1});
    const OpenModel nodal = nodal_model();
    cases.push_back({"nodal curve", nodal.site, deligne_ic(nodal.site, constant_sheaf(open_part(nodal.site, "generic"))), 1});
    const OpenModel plane = plane_model();
    cases.push_back({"plane", plane.site, deligne_ic(plane.site, constant_sheaf(open_part(plane.site, "generic"))), 2});

    for (const IcCase& e : cases) {
        const PerversityReport r = check_perversity(e.ic, e.site, e.shift, Bounds::intersection);
        c.expect(r.support_ok, e.name + ": IC support bound violated");
        c.expect(r.cosupport_ok, e.name + ": IC co-support bound violated");
    }

    // j_!Q[1] and j_*Q[1] from the punctured line
    const int p = d.site.index("p");
    const CellSet u = set_difference(all_cells(d.site), {p});
    const SheafComplex jshriek = extend_by_zero(single(constant_sheaf(subsite(d.site, u))), d.site, u);
    const PerversityReport rs = check_perversity(jshriek, d.site, 1, Bounds::intersection);
    c.expect(rs.support_ok, "j_!Q[1]: support should pass");
    c.expect(!rs.cosupport_ok, "j_!Q[1]: co-support should fail");
    bool at_puncture = false;
    for (const auto& [deg, entries] : rs.costalks)
        for (const StratumEntry& s : entries)
            at_puncture = at_puncture || (s.stratum == "p" && deg >= 0 && s.dim > 0);
    c.expect(at_puncture, "j_!Q[1]: no co-support failure at the puncture");

    const CellMap j = [&] {
        std::map<std::string, std::string> table;
        for (int x : u)
            table[d.site.name(x)] = d.site.name(x);
        return map_by_names(subsite(d.site, u), d.site, table);
    }();
    const SheafComplex jstar = pushforward(single(constant_sheaf(j.source)), j);
    // Rj_*Q[1] has no local cohomology at the puncture; its H^0 there breaks support, so the
    // j_*-type object under test is the underived j_*Q[1] = τ≤0 Rj_*Q[1].
    const PerversityReport rj = check_perversity(jstar, d.site, 1, Bounds::intersection);
    c.expect(rj.cosupport_ok, "Rj_*Q[1] fails co-support");
    const SheafComplex jtrunc = truncate_leq(jstar, 0);
    const PerversityReport rt = check_perversity(jtrunc, d.site, 1, Bounds::intersection);
    c.expect(rt.support_ok && rt.cosupport_ok, "j_*Q[1] fails the IC bounds");
}

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;
    std::function<void(Checker&)> run;
};

}  // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "circle local systems: 50 random monodromies vs the 4-cell circle", 1.0, circle_local_systems},
        {2, "cone IC stalks for genus 0, 1, 2", 1.0, cone_ic_stalks},
        {3, "self-duality dichotomy on the open cone", 1.0, selfduality_dichotomy},
        {4, "Leray identity on fixture maps, E2 degeneration on the cyclic cover", 2.0, leray_identity},
        {5, "semismall suite", 1.0, semismall_suite},
        {6, "refined intersection forms", 1.0, refined_forms},
        {7, "Stanley pipeline and 1000 f/h round trips", 1.0, stanley_pipeline},
        {8, "Göttsche formula and partitions", 5.0, gottsche_partitions},
        {9, "Heisenberg relations, degree <= 6", 1.0, heisenberg},
        {10, "flag kernel filtration equals split filtration", 2.0, perverse_filtration},
        {11, "perversity ledger under the IC bounds", 1.0, perversity_ledger},
    };

    int failed = 0;
    for (const Criterion& cr : criteria) {
        Checker c;
        std::string error;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            error = e.what();
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool timely = seconds < cr.limit_seconds;
        const bool ok = error.empty() && c.failed == 0 && timely;
        std::printf("%s  [%2d] %-68s %7.3fs (limit %.0fs, %ld checks)\n", ok ? "PASS" : "FAIL", cr.id, cr.title,
                    seconds, cr.limit_seconds, c.checks);
        if (!error.empty())
            std::printf("        exception: %s\n", error.c_str());
        for (const std::string& f : c.failures)
            std::printf("        %s\n", f.c_str());
        if (c.failed > 5)
            std::printf("        ... %ld failures in total\n", c.failed);
        if (!timely)
            std::printf("        over the time limit\n");
        if (!ok)
            ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
