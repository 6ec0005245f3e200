#include "perverscope/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

using namespace perverscope;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitMath = 3;
constexpr int kExitInternal = 4;

struct Outcome {
    Json report;
    int status = 0;
};

/// Inputs are loaded when a Task is created; `run` only computes.
struct Task {
    std::function<Outcome()> run;
};

struct Globals {
    std::string format = "json";
    std::string out;
    int jobs = 1;
};

std::vector<long> parse_list(const std::string& text, const char* what)
{
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw SchemaError(std::string(what) + ": \"" + item + "\" is not an integer");
        out.push_back(v);
    }
    if (out.empty())
        throw SchemaError(std::string(what) + ": empty list");
    return out;
}

Json load(const std::string& path, const char* schema)
{
    Json j = read_json_file(path);
    expect_schema(j, schema);
    return j;
}

// A filtration document, or a filtration report whose "raw" member is one.
Json load_table(const std::string& path)
{
    Json j = read_json_file(path);
    if (j.is_object() && !j.contains("schema") && j.contains("raw"))
        j = j["raw"];
    expect_schema(j, kFiltrationSchema);
    return j;
}

Json stalk_table(const SheafComplex& k, const CellSite& site, bool with_costalks)
{
    Json rows = Json::array();
    for (int c = 0; c < static_cast<int>(site.size()); ++c) {
        Json r = {{"cell", site.name(c)}, {"stratum", site.stratum_of(c)}, {"stalk", dims_to_json(derived_stalk(k, c))}};
        if (with_costalks)
            r["costalk"] = dims_to_json(costalk(k, site, c));
        rows.push_back(r);
    }
    return rows;
}

Json stratum_table(const SheafComplex& k, const CellSite& site)
{
    Json rows = Json::array();
    for (const auto& s : site.stratum_names()) {
        const int c = site.stratum_cells(s).front();
        rows.push_back({{"stratum", s},
                        {"cdim", site.stratum_cdim(s)},
                        {"cell", site.name(c)},
                        {"stalk", dims_to_json(derived_stalk(k, c))},
                        {"costalk", dims_to_json(costalk(k, site, c))}});
    }
    return rows;
}

int top_cdim(const CellSite& site)
{
    int top = 0;
    for (const auto& s : site.stratum_names())
        top = std::max(top, site.stratum_cdim(s));
    return top;
}

std::string open_stratum(const CellSite& site)
{
    std::string name;
    for (const auto& s : site.stratum_names())
        if (site.stratum_cdim(s) == top_cdim(site)) {
            if (!name.empty())
                throw MathError("the site has more than one stratum of top dimension");
            name = s;
        }
    if (name.empty())
        throw MathError("the site has no strata");
    return name;
}

Json table_pair(const FiltrationTable& t)
{
    const auto n = normalize(t);
    return {{"raw", table_to_json(t)}, {"normalized", table_to_json(n.table)}, {"normalization_shift", n.m}};
}

// --------------------------------------------------------------- TSV output

void flatten(const Json& j, const std::string& path, std::ostringstream& os)
{
    if (j.is_object()) {
        if (j.empty())
            os << path << "\t{}\n";
        for (const auto& [k, v] : j.items())
            flatten(v, path.empty() ? k : path + "." + k, os);
    } else if (j.is_array()) {
        if (j.empty())
            os << path << "\t[]\n";
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], path + "." + std::to_string(i), os);
    } else {
        os << path << "\t" << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
    }
}

std::string render(const Json& j, const std::string& format)
{
    if (format == "tsv") {
        std::ostringstream os;
        flatten(j, "", os);
        return os.str();
    }
    return j.dump(2) + "\n";
}

Json error_object(const char* kind, const std::string& message)
{
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

// ----------------------------------------------------------- command table

/// Parses one command line and returns the loaded task.  Throws CLI::ParseError,
/// SchemaError or MathError.
class Invocation {
public:
    Invocation();
    Task parse(std::vector<std::string> args);
    int print_help(const CLI::ParseError& e) { return app_.exit(e); }
    Globals globals;
    bool batch = false;
    std::string manifest;

private:
    CLI::App app_{"Exact computations with constructible sheaves on cell sites"};
    std::function<Task()> selected_;
    // option storage
    std::string a_, b_, c_;
    int shift_ = 0, n_ = 0, d_ = 0, genus_ = 0;
    bool compact_support_ = false;
    std::string bounds_ = "perverse", list_;
};

Invocation::Invocation()
{
    app_.require_subcommand(1);
    app_.add_option("--format", globals.format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));
    app_.add_option("--out", globals.out, "write the report here instead of stdout");
    app_.add_option("--jobs", globals.jobs, "worker threads for batch manifests")->check(CLI::PositiveNumber);

    auto sub = [&](CLI::App* parent, const char* name, const char* help, std::function<Task()> task) {
        CLI::App* s = parent->add_subcommand(name, help);
        s->callback([this, task] { selected_ = task; });
        return s;
    };

    // site
    CLI::App* site = app_.add_subcommand("site", "cell sites")->require_subcommand(1);
    sub(site, "check", "verify the poset and sign invariants", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        return Task{[s] {
            Json v = Json::array();
            const auto violations = verify_site(s);
            for (const auto& x : violations)
                v.push_back({{"kind", x.kind}, {"message", x.message}, {"cells", x.cells}});
            return Outcome{{{"cells", s.size()}, {"strata", s.stratum_names()}, {"violations", v}},
                           violations.empty() ? 0 : kExitMath};
        }};
    })->add_option("site", a_)->required();

    // sheaf
    CLI::App* sheaf = app_.add_subcommand("sheaf", "sheaf complexes")->require_subcommand(1);
    auto* sc = sub(sheaf, "cohomology", "H^* and, when defined, H^*_c", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        const SheafComplex k = complex_from_json(load(b_, kComplexSchema), s);
        const bool compact = compact_support_;
        return Task{[s, k, compact] {
            Json r = {{"h", dims_to_json(cohomology(sections_complex(k, s)))}};
            if (s.has_compactification() || compact)
                r["hc"] = dims_to_json(cohomology(compact_sections_complex(k, s, all_cells(s))));
            return Outcome{r};
        }};
    });
    sc->add_option("site", a_)->required();
    sc->add_option("complex", b_)->required();
    sc->add_flag("--compact-support", compact_support_, "require H^*_c (errors without a compact ambient)");
    auto* ss = sub(sheaf, "stalks", "derived stalks and costalks at every cell", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        const SheafComplex k = complex_from_json(load(b_, kComplexSchema), s);
        return Task{[s, k] { return Outcome{{{"cells", stalk_table(k, s, true)}}}; }};
    });
    ss->add_option("site", a_)->required();
    ss->add_option("complex", b_)->required();
    auto* sp = sub(sheaf, "pushforward", "H^*(Y, Rf_*K) against H^*(X, K)", [this] {
        const CellMap f = map_from_json(load(a_, kMapSchema));
        const SheafComplex k = complex_from_json(load(b_, kComplexSchema), f.source);
        return Task{[f, k] {
            const GradedDims hy = cohomology(sections_complex(pushforward(k, f), f.target));
            const GradedDims hx = cohomology(sections_complex(k, f.source));
            Json r = {{"h_target", dims_to_json(hy)}, {"h_source", dims_to_json(hx)}, {"equal", hy == hx}};
            if (f.target.compact) {
                const auto le = leray_filtration(k, f);
                r["leray"] = table_to_json(le);
            }
            return Outcome{r, hy == hx ? 0 : kExitMath};
        }};
    });
    sp->add_option("map", a_)->required();
    sp->add_option("complex", b_, "complex on the source site")->required();

    // ic
    CLI::App* ic = app_.add_subcommand("ic", "intersection complexes")->require_subcommand(1);
    auto* ib = sub(ic, "build", "Deligne extension of a local system on the open stratum", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        const std::string open = open_stratum(s);
        const CellSite u = subsite(s, s.stratum_cells(open));
        CellSheaf l = constant_sheaf(u);
        if (!b_.empty()) {
            const SheafComplex lk = complex_from_json(load(b_, kComplexSchema), u);
            if (lk.terms.size() != 1 || lk.lo != 0)
                throw SchemaError("local system: expected a single sheaf in degree 0");
            l = lk.terms.front();
        }
        return Task{[s, l] {
            const SheafComplex icx = deligne_ic(s, l);
            const int top = top_cdim(s);
            const auto rep = check_perversity(icx, s, top, Bounds::intersection);
            Json r = {{"strata", stratum_table(icx, s)},
                      {"perversity", perversity_report_to_json(rep)},
                      {"complex", complex_to_json(icx, s)}};
            return Outcome{r, rep.support_ok && rep.cosupport_ok ? 0 : kExitMath};
        }};
    });
    ib->add_option("site", a_)->required();
    ib->add_option("--local-system", b_, "complex document with one sheaf on the open stratum");
    auto* icn = sub(ic, "cone", "IC of the affine cone over a genus-g curve", [this] {
        if (genus_ < 0)
            throw SchemaError("--genus must be non-negative");
        const int g = genus_;
        return Task{[g] {
            const LinkDatum v = curve_link_datum(g);
            const OpenModel m = cone_model_for(v);
            const SheafComplex icx = deligne_ic(m.site, constant_sheaf(subsite(m.site, m.site.stratum_cells("smooth"))));
            const auto sd = numerical_selfduality(icx, m.site, 2);
            return Outcome{{{"genus", g},
                            {"strata", stratum_table(icx, m.site)},
                            {"predicted_vertex_stalk", dims_to_json(cone_ic_vertex_stalk(v))},
                            {"punctured_cone", dims_to_json(punctured_cone_cohomology(v))},
                            {"self_dual", sd.self_dual}}};
        }};
    });
    icn->add_option("--genus", genus_)->required();

    // perverse
    CLI::App* pv = app_.add_subcommand("perverse", "perversity conditions")->require_subcommand(1);
    auto* pc = sub(pv, "check", "support and co-support conditions for K[shift]", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        const SheafComplex k = complex_from_json(load(b_, kComplexSchema), s);
        const Bounds bounds = bounds_ == "intersection" ? Bounds::intersection : Bounds::perverse;
        const int shift = shift_;
        return Task{[s, k, bounds, shift] {
            const auto rep = check_perversity(k, s, shift, bounds);
            Json r = perversity_report_to_json(rep);
            r["ok"] = rep.support_ok && rep.cosupport_ok;
            return Outcome{r};
        }};
    });
    pc->add_option("site", a_)->required();
    pc->add_option("complex", b_)->required();
    pc->add_option("--shift", shift_, "check K[shift]");
    pc->add_option("--bounds", bounds_)->check(CLI::IsMember({"perverse", "intersection"}));
    auto* pd = sub(pv, "selfdual", "compare dim H^k with dim H_c^{-k}", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        const SheafComplex k = complex_from_json(load(b_, kComplexSchema), s);
        const int shift = shift_;
        return Task{[s, k, shift] {
            const auto r = numerical_selfduality(k, s, shift);
            Json defects = Json::array();
            for (const auto& [deg, p] : r.defects)
                defects.push_back({{"degree", deg}, {"h", p.first}, {"hc_dual", p.second}});
            return Outcome{{{"self_dual", r.self_dual}, {"h", dims_to_json(r.h)}, {"hc", dims_to_json(r.hc)},
                            {"defects", defects}}};
        }};
    });
    pd->add_option("site", a_)->required();
    pd->add_option("complex", b_)->required();
    pd->add_option("--shift", shift_);
    auto* pa = sub(pv, "artin", "Artin vanishing ranges on an affine site", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        const SheafComplex k = complex_from_json(load(b_, kComplexSchema), s);
        const int shift = shift_, d = d_;
        return Task{[s, k, shift, d] {
            const auto r = artin_range_check(k, s, d, shift);
            return Outcome{{{"ok", r.ok}, {"h", dims_to_json(r.h)}, {"hc", dims_to_json(r.hc)}}};
        }};
    });
    pa->add_option("site", a_)->required();
    pa->add_option("complex", b_)->required();
    pa->add_option("--shift", shift_);
    pa->add_option("--dim", d_, "complex dimension of the site")->required();

    // localsys
    CLI::App* ls = app_.add_subcommand("localsys", "local systems")->require_subcommand(1);
    sub(ls, "circle", "cohomology of the circle with the first generator as monodromy", [this] {
        const MonodromyRep rep = rep_from_json(load(a_, kMonodromySchema));
        if (rep.generators.empty())
            throw SchemaError("monodromy: at least one generator needed");
        return Task{[rep] {
            const RationalMatrix& t = rep.generators.front();
            const auto cc = circle_cohomology(t);
            const CellSite c = circle_site(4);
            const GradedDims h = cohomology(sections_complex(single(circle_local_system(t, 4)), c));
            return Outcome{{{"h0", cc.h0}, {"h1", cc.h1}, {"cellular", dims_to_json(h)},
                            {"agree", h[0] == cc.h0 && h[1] == cc.h1}}};
        }};
    })->add_option("monodromy", a_)->required();
    sub(ls, "invariants", "common fixed vectors of the generators", [this] {
        const MonodromyRep rep = rep_from_json(load(a_, kMonodromySchema));
        return Task{[rep] {
            const RationalMatrix inv = invariants(rep);
            return Outcome{{{"dimension", inv.cols()}, {"basis", matrix_to_json(inv)}}};
        }};
    })->add_option("monodromy", a_)->required();
    sub(ls, "isotypic", "rational isotypic decomposition of a finite-image representation", [this] {
        const MonodromyRep rep = rep_from_json(load(a_, kMonodromySchema));
        return Task{[rep] {
            Json pieces = Json::array();
            for (const auto& p : isotypic_decomposition(rep))
                pieces.push_back({{"simple_rank", p.simple_rank},
                                  {"multiplicity", p.multiplicity},
                                  {"division_dim", p.division_dim},
                                  {"projector", matrix_to_json(p.projector)}});
            return Outcome{{{"pieces", pieces}}};
        }};
    })->add_option("monodromy", a_)->required();
    sub(ls, "wang", "Betti numbers of a fiber bundle over the circle", [this] {
        const WangInput w = wang_from_json(load(a_, kWangSchema));
        return Task{[w] { return Outcome{{{"betti", dims_to_json(wang(w.fiber_betti, w.monodromy))}}}; }};
    })->add_option("input", a_)->required();
    auto* lc = sub(ls, "cyclic", "pushforward along the n-fold cyclic cover of the circle", [this] {
        const MonodromyRep rep = rep_from_json(load(a_, kMonodromySchema));
        const int n = n_;
        return Task{[rep, n] { return Outcome{rep_to_json(cyclic_pushforward(n, rep))}; }};
    });
    lc->alias("push");
    lc->add_option("monodromy", a_)->required();
    lc->add_option("--n", n_)->required()->check(CLI::PositiveNumber);

    // dt
    CLI::App* dt = app_.add_subcommand("dt", "decomposition-theorem bookkeeping")->require_subcommand(1);
    sub(dt, "semismall", "semismallness, relevant strata and the DT shape", [this] {
        const MapStratification ms = stratification_from_json(load(a_, kStratificationSchema));
        return Task{[ms] {
            if (!is_semismall(ms))
                throw MathError("\"" + ms.name + "\" is not semismall (defect " + std::to_string(defect(ms).defect) + ")");
            const DTShape shape = dt_semismall(ms);
            return Outcome{{{"name", ms.name},
                            {"semismall", true},
                            {"small", is_small(ms)},
                            {"relevant", relevant_strata(ms)},
                            {"palindromic", palindromic_check(shape)},
                            {"shape", shape_to_json(shape)}}};
        }};
    })->add_option("stratification", a_)->required();
    sub(dt, "endo", "endomorphism algebra dimension against the component count", [this] {
        const MapStratification ms = stratification_from_json(load(a_, kStratificationSchema));
        return Task{[ms] {
            const DTShape shape = dt_semismall(ms);
            const auto e = endo_dimension(shape, ms);
            return Outcome{{{"sum_m2", e.sum_m2}, {"algebra_dim", e.algebra_dim}, {"component_count", e.component_count},
                            {"agree", e.sum_m2 == e.component_count}},
                           e.sum_m2 == e.component_count ? 0 : kExitMath};
        }};
    })->add_option("stratification", a_)->required();
    sub(dt, "defect", "defect of semismallness", [this] {
        const MapStratification ms = stratification_from_json(load(a_, kStratificationSchema));
        return Task{[ms] {
            const auto r = defect(ms);
            return Outcome{{{"defect", r.defect}, {"record_bound", r.record_bound},
                            {"from_fiber_product", r.from_fiber_product}}};
        }};
    })->add_option("stratification", a_)->required();
    sub(dt, "surface", "resolution of isolated surface singularities", [this] {
        const auto pts = surface_from_json(load(a_, kSurfaceSchema));
        return Task{[pts] {
            const auto r = surface_resolution_dt(pts);
            return Outcome{{{"orthogonal", r.orthogonal}, {"shape", shape_to_json(r.shape)}}};
        }};
    })->add_option("config", a_)->required();
    sub(dt, "hilb", "Hilbert-Chow stratification", [this] {
        const int n = n_;
        if (n < 1)
            throw SchemaError("--n must be at least 1");
        return Task{[n] {
            const auto ms = hilbert_chow_strat(n);
            return Outcome{{{"stratification", stratification_to_json(ms)},
                            {"semismall", is_semismall(ms)},
                            {"relevant", relevant_strata(ms)},
                            {"shape", shape_to_json(dt_semismall(ms))}}};
        }};
    })->add_option("--n", n_)->required();

    // polytope
    CLI::App* pt = app_.add_subcommand("polytope", "f- and h-vectors")->require_subcommand(1);
    auto* ph = sub(pt, "hvector", "h-vector from the f-vector", [this] {
        const auto f = parse_list(list_, "--f");
        const int d = d_;
        return Task{[f, d] {
            const auto h = f_to_h(f, d);
            return Outcome{{{"f", f}, {"h", h}, {"betti", dims_to_json(toric_betti(h))}}};
        }};
    });
    ph->add_option("--f", list_)->required();
    ph->add_option("--d", d_)->required();
    auto* mc = sub(pt, "mcmullen", "symmetry, unimodality and the Macaulay condition", [this] {
        const auto h = parse_list(list_, "--h");
        return Task{[h] {
            const auto r = mcmullen_check(h);
            const GradedOperator g = diagonal_lefschetz_model(toric_betti(h).to_vector(0, 2 * (static_cast<int>(h.size()) - 1)));
            return Outcome{{{"h", h},
                            {"symmetric", r.symmetric},
                            {"unimodal", r.unimodal},
                            {"m_sequence", r.m_sequence},
                            {"g", r.g},
                            {"ok", r.ok()},
                            {"diagonal_model_hard_lefschetz", hl_check(g).ok}}};
        }};
    });
    mc->set_help_flag("--help", "print this help message and exit");
    mc->add_option("--h", list_, "h-vector h_0,...,h_d")->required();

    // hilb
    CLI::App* hb = app_.add_subcommand("hilb", "Hilbert schemes of points on surfaces")->require_subcommand(1);
    auto* hg = sub(hb, "gottsche", "Betti numbers of X^[n]", [this] {
        const auto b = parse_list(list_, "--betti");
        if (b.size() != 5)
            throw SchemaError("--betti needs b_0..b_4");
        SurfaceBetti s;
        std::copy(b.begin(), b.end(), s.b.begin());
        validate_surface(s);
        const int n = n_;
        return Task{[s, n] {
            const GradedDims g = gottsche(s, n);
            return Outcome{{{"n", n}, {"betti", dims_to_json(g)}, {"total", g.total()}}};
        }};
    });
    hg->add_option("--betti", list_)->required();
    hg->add_option("--n", n_)->required();
    sub(hb, "euler", "coefficients of the Euler product", [this] {
        const int n = n_;
        return Task{[n] { return Outcome{{{"N", n}, {"coefficients", euler_product_coeffs(n)}}}; }};
    })->add_option("--N", n_)->required();
    sub(hb, "heisenberg", "commutator identities on the truncated Fock space", [this] {
        const int n = n_;
        return Task{[n] {
            const auto r = heisenberg_check(n);
            return Outcome{{{"ok", r.ok}, {"graded_dims", r.graded_dims}, {"identities_checked", r.identities_checked},
                            {"failures", r.failures}},
                           r.ok ? 0 : kExitMath};
        }};
    })->add_option("--N", n_)->required();

    // filtration
    CLI::App* fl = app_.add_subcommand("filtration", "perverse and Leray filtrations")->require_subcommand(1);
    auto* ff = sub(fl, "flags", "kernels of restrictions to a flag", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        const SheafComplex k = complex_from_json(load(b_, kComplexSchema), s);
        const Flag f = flag_from_json(load(c_, kFlagSchema), s);
        return Task{[s, k, f] { return Outcome{table_pair(flag_kernel_filtration(k, s, f))}; }};
    });
    ff->add_option("site", a_)->required();
    ff->add_option("complex", b_)->required();
    ff->add_option("flag", c_)->required();
    auto* fs = sub(fl, "split", "filtration of a split complex from its perverse summands", [this] {
        const CellSite s = site_from_json(load(a_, kSiteSchema));
        const auto summands = summands_from_json(load(b_, kSummandsSchema), s);
        std::optional<Flag> f;
        if (!c_.empty())
            f = flag_from_json(load(c_, kFlagSchema), s);
        return Task{[s, summands, f] {
            Json r = table_pair(split_filtration(summands, s));
            if (f) {
                const auto cert = certify_flag(summands, s, *f);
                r["flag_certified"] = cert.ok;
                r["certificate_failures"] = cert.failures;
                if (cert.ok)
                    r["flag_kernel_agrees"] =
                        same_filtration(flag_kernel_filtration(assemble(summands), s, *f), split_filtration(summands, s));
            }
            return Outcome{r};
        }};
    });
    fs->add_option("site", a_)->required();
    fs->add_option("summands", b_)->required();
    fs->add_option("--flag", c_, "certify this flag and compare with its kernel filtration");
    auto* fle = sub(fl, "leray", "Leray filtration through standard truncations", [this] {
        const CellMap f = map_from_json(load(a_, kMapSchema));
        const SheafComplex k = complex_from_json(load(b_, kComplexSchema), f.source);
        return Task{[f, k] {
            const auto t = leray_filtration(k, f);
            Json r = table_pair(t);
            r["skeletal_agrees"] = same_filtration(t, skeletal_leray_filtration(k, f));
            return Outcome{r};
        }};
    });
    fle->add_option("map", a_)->required();
    fle->add_option("complex", b_, "complex on the source site")->required();
    auto* fc = sub(fl, "compare", "cells where two filtration tables differ", [this] {
        const FiltrationTable x = table_from_json(load_table(a_));
        const FiltrationTable y = table_from_json(load_table(b_));
        return Task{[x, y] {
            Json cells = Json::array();
            for (const auto& [n, l] : table_differences(x, y))
                cells.push_back({{"degree", n}, {"level", l}, {"first", x.at(n, l)}, {"second", y.at(n, l)}});
            return Outcome{{{"equal", cells.empty()}, {"differences", cells}}};
        }};
    });
    fc->add_option("first", a_)->required();
    fc->add_option("second", b_)->required();

    CLI::App* bt = app_.add_subcommand("batch", "run a manifest of commands");
    bt->add_option("manifest", manifest)->required();
    bt->callback([this] { batch = true; });

    // global options may follow the subcommands
    std::function<void(CLI::App*)> fall = [&](CLI::App* a) {
        for (CLI::App* c : a->get_subcommands([](CLI::App*) { return true; })) {
            c->fallthrough();
            fall(c);
        }
    };
    fall(&app_);
}

Task Invocation::parse(std::vector<std::string> args)
{
    std::reverse(args.begin(), args.end());
    app_.parse(args);
    if (batch)
        return {};
    if (!selected_)
        throw SchemaError("no command given");
    return selected_();
}

void emit(const std::string& text, const std::string& out)
{
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f)
        throw SchemaError("cannot write \"" + out + "\"");
    f << text;
}

/// Runs a loaded task and converts exceptions into error objects.
Outcome execute(const Task& t)
{
    try {
        return t.run();
    } catch (const SchemaError& e) {
        return {error_object("schema", e.what()), kExitSchema};
    } catch (const MathError& e) {
        return {error_object("math", e.what()), kExitMath};
    } catch (const std::exception& e) {
        return {error_object("internal", e.what()), kExitInternal};
    }
}

struct ManifestRun {
    std::vector<std::string> args;
    std::string out;
    std::string format = "json";
};

std::vector<ManifestRun> read_manifest(const std::string& path)
{
    const Json j = read_json_file(path);
    expect_schema(j, "perverscope.manifest/1");
    for (const auto& [k, v] : j.items())
        if (k != "schema" && k != "comment" && k != "runs")
            throw SchemaError("manifest: unknown field \"" + k + "\"");
    if (!j.contains("runs") || !j["runs"].is_array())
        throw SchemaError("manifest: \"runs\" must be an array");
    std::vector<ManifestRun> runs;
    for (const auto& r : j["runs"]) {
        if (!r.is_object())
            throw SchemaError("manifest: a run is an object");
        for (const auto& [k, v] : r.items())
            if (k != "args" && k != "out" && k != "format" && k != "comment")
                throw SchemaError("manifest run: unknown field \"" + k + "\"");
        if (!r.contains("args") || !r["args"].is_array() || !r.contains("out") || !r["out"].is_string())
            throw SchemaError("manifest run: needs \"args\" (array of strings) and \"out\" (string)");
        ManifestRun m;
        for (const auto& a : r["args"]) {
            if (!a.is_string())
                throw SchemaError("manifest run: arguments must be strings");
            m.args.push_back(a.get<std::string>());
        }
        m.out = r["out"].get<std::string>();
        if (r.contains("format")) {
            if (!r["format"].is_string() || (r["format"] != "json" && r["format"] != "tsv"))
                throw SchemaError("manifest run: format is \"json\" or \"tsv\"");
            m.format = r["format"].get<std::string>();
        }
        runs.push_back(std::move(m));
    }
    return runs;
}

int run_batch(const Globals& g, const std::string& manifest)
{
    const auto runs = read_manifest(manifest);
    // every input is loaded and validated before anything is computed
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        Invocation inv;
        try {
            tasks.push_back(inv.parse(runs[i].args));
        } catch (const CLI::ParseError& e) {
            throw SchemaError("manifest run " + std::to_string(i) + ": " + e.what());
        } catch (const SchemaError& e) {
            throw SchemaError("manifest run " + std::to_string(i) + ": " + e.what());
        }
        if (inv.batch)
            throw SchemaError("manifest run " + std::to_string(i) + ": nested batch");
    }
    std::vector<Outcome> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++)
            results[i] = execute(tasks[i]);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < g.jobs; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    Json summary = Json::array();
    int status = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        emit(render(results[i].report, runs[i].format), runs[i].out);
        summary.push_back({{"out", runs[i].out}, {"status", results[i].status}});
        status = std::max(status, results[i].status);
    }
    emit(render({{"runs", summary}}, g.format), g.out);
    return status;
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    Invocation inv;
    Task task;
    try {
        task = inv.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0)
            return inv.print_help(e);
        emit(render(error_object("schema", std::string("command line: ") + e.what()), inv.globals.format), "");
        return kExitSchema;
    } catch (const SchemaError& e) {
        emit(render(error_object("schema", e.what()), inv.globals.format), inv.globals.out);
        return kExitSchema;
    } catch (const MathError& e) {
        emit(render(error_object("math", e.what()), inv.globals.format), inv.globals.out);
        return kExitMath;
    } catch (const std::exception& e) {
        emit(render(error_object("internal", e.what()), inv.globals.format), inv.globals.out);
        return kExitInternal;
    }
    try {
        if (inv.batch)
            return run_batch(inv.globals, inv.manifest);
        const Outcome o = execute(task);
        emit(render(o.report, inv.globals.format), inv.globals.out);
        return o.status;
    } catch (const SchemaError& e) {
        emit(render(error_object("schema", e.what()), inv.globals.format), inv.globals.out);
        return kExitSchema;
    } catch (const std::exception& e) {
        emit(render(error_object("internal", e.what()), inv.globals.format), inv.globals.out);
        return kExitInternal;
    }
}
