#include "perverscope/perversity.hpp"
#include "perverscope/injective.hpp"

#include <algorithm>
#include <set>

namespace perverscope {

namespace {

int top_cdim(const CellSite& site)
{
    if (site.stratum_names().empty())
        throw MathError("site has no stratification");
    int top = 0;
    for (const auto& s : site.stratum_names())
        top = std::max(top, site.stratum_cdim(s));
    return top;
}

bool strict_on(const CellSite& site, const std::string& stratum, Bounds bounds, int top)
{
    return bounds == Bounds::intersection && site.stratum_cdim(stratum) < top;
}

/// One value per stratum; throws when it jumps inside a stratum.
template <class F>
std::map<std::string, GradedDims> per_stratum(const CellSite& site, F value, const char* what)
{
    std::map<std::string, GradedDims> out;
    for (const auto& s : site.stratum_names()) {
        const CellSet& cells = site.stratum_cells(s);
        if (cells.empty())
            continue;
        const GradedDims first = value(cells.front());
        for (std::size_t i = 1; i < cells.size(); ++i)
            if (!(value(cells[i]) == first))
                throw MathError(std::string("not constructible: ") + what + " jump along stratum \"" + s +
                                "\" (cells \"" + site.name(cells.front()) + "\" and \"" + site.name(cells[i]) + "\")");
        out.emplace(s, first);
    }
    return out;
}

void fill_support(PerversityReport& r, const SheafComplex& k, const CellSite& site)
{
    const int top = top_cdim(site);
    const auto table = per_stratum(site, [&](int c) { return derived_stalk(k, c).shifted(r.shift); }, "derived stalks");
    for (const auto& [s, dims] : table) {
        const int cdim = site.stratum_cdim(s);
        const bool strict = strict_on(site, s, r.bounds, top);
        for (const auto& [i, d] : dims.map()) {
            r.stalks[i].push_back({s, cdim, d});
            if (strict ? !(cdim < -i) : !(cdim <= -i)) {
                r.support_ok = false;
                r.violations.push_back("support: H^" + std::to_string(i) + " is nonzero on stratum \"" + s +
                                       "\" of dimension " + std::to_string(cdim));
            }
        }
    }
}

void fill_cosupport(PerversityReport& r, const SheafComplex& k, const CellSite& site)
{
    const int top = top_cdim(site);
    const auto model = model_of(k, site);
    const auto table = per_stratum(
        site, [&](int c) { return local_block_cohomology(*model, c).shifted(-site.dim(c) + r.shift); }, "costalks");
    for (const auto& [s, dims] : table) {
        const int cdim = site.stratum_cdim(s);
        const bool strict = strict_on(site, s, r.bounds, top);
        for (const auto& [i, d] : dims.map()) {
            r.costalks[i].push_back({s, cdim, d});
            if (strict ? !(i > cdim) : !(i >= cdim)) {
                r.cosupport_ok = false;
                r.violations.push_back("co-support: costalk H^" + std::to_string(i) + " is nonzero on stratum \"" + s +
                                       "\" of dimension " + std::to_string(cdim));
            }
        }
    }
}

}  // namespace

PerversityReport check_support(const SheafComplex& k, const CellSite& site, int shift, Bounds bounds)
{
    PerversityReport r;
    r.shift = shift;
    r.bounds = bounds;
    fill_support(r, k, site);
    return r;
}

PerversityReport check_cosupport(const SheafComplex& k, const CellSite& site, int shift, Bounds bounds)
{
    PerversityReport r;
    r.shift = shift;
    r.bounds = bounds;
    fill_cosupport(r, k, site);
    return r;
}

PerversityReport check_perversity(const SheafComplex& k, const CellSite& site, int shift, Bounds bounds)
{
    PerversityReport r;
    r.shift = shift;
    r.bounds = bounds;
    fill_support(r, k, site);
    fill_cosupport(r, k, site);
    return r;
}

bool is_perverse(const SheafComplex& k, const CellSite& site, int shift)
{
    const auto r = check_perversity(k, site, shift, Bounds::perverse);
    return r.support_ok && r.cosupport_ok;
}

std::vector<int> support_dimension_vector(int dim, Bounds bounds)
{
    std::vector<int> v;
    for (int i = -dim; i <= 0; ++i)
        v.push_back(bounds == Bounds::perverse || i == -dim ? -i : -i - 1);
    return v;
}

// ------------------------------------------------------------- cones

LinkDatum make_link_datum(int d, const GradedDims& betti, const std::map<int, long>& eta_rank)
{
    if (d < 0)
        throw MathError("link datum: negative dimension");
    for (const auto& [q, b] : betti.map())
        if (q < 0 || q > 2 * d)
            throw MathError("link datum: Betti number outside degrees 0.." + std::to_string(2 * d));
    for (int q = 0; q <= 2 * d; ++q)
        if (betti[q] != betti[2 * d - q])
            throw MathError("link datum: Betti numbers are not palindromic");
    LinkDatum v;
    v.d = d;
    v.betti = betti;
    v.eta_rank = eta_rank;
    for (const auto& [q, r] : eta_rank)
        if (r < 0 || r > std::min(betti[q], betti[q + 2]))
            throw MathError("link datum: rank of η on H^" + std::to_string(q) + " exceeds the dimensions");
    auto eta = [&](int q) {
        auto it = eta_rank.find(q);
        return it == eta_rank.end() ? 0L : it->second;
    };
    for (int q = 0; q < d; ++q)
        if (eta(q) != betti[q])
            throw MathError("link datum: η is not injective on H^" + std::to_string(q) + " (hard Lefschetz fails)");
    for (int q = 0; q <= d; ++q) {
        const long p = betti[q] - eta(q - 2);
        if (p < 0)
            throw MathError("link datum: negative primitive dimension");
        v.prim.set(q, p);
    }
    return v;
}

LinkDatum curve_link_datum(int genus)
{
    if (genus < 0)
        throw MathError("curve link datum: negative genus");
    return make_link_datum(1, GradedDims{{0, 1}, {1, 2L * genus}, {2, 1}}, {{0, 1}});
}

LinkDatum projective_space_link_datum(int d)
{
    GradedDims b;
    std::map<int, long> eta;
    for (int i = 0; i <= d; ++i) {
        b.set(2 * i, 1);
        if (i < d)
            eta[2 * i] = 1;
    }
    return make_link_datum(d, b, eta);
}

GradedDims punctured_cone_cohomology(const LinkDatum& v)
{
    GradedDims h;
    for (int q = 0; q <= v.d; ++q) {
        h.add(q, v.prim[q]);
        h.add(1 + v.d + q, v.prim[v.d - q]);
    }
    return h;
}

GradedDims cone_ic_vertex_stalk(const LinkDatum& v) { return v.prim; }

OpenModel cone_model_for(const LinkDatum& v)
{
    if (v.d != 1)
        throw MathError("cone model: only cones over curves have a cell model");
    return cone_model(static_cast<int>(v.prim[1]));
}

// ----------------------------------------------------------- Deligne

namespace {

bool below(const CellSite& site, const CellSet& a, const CellSet& closure_of)
{
    const CellSet cl = down_closure(site, closure_of);
    return std::all_of(a.begin(), a.end(), [&](int c) { return std::binary_search(cl.begin(), cl.end(), c); });
}

InjModel deligne_along(const CellSite& site, const SheafComplex& k, const CellSet& open,
                       const std::vector<std::string>& order, int top)
{
    std::vector<DeligneStep> steps;
    CellSet done = open;
    for (const auto& s : order) {
        const int t = top - site.stratum_cdim(s) - 1;
        const CellSet& cells = site.stratum_cells(s);
        for (int c : site.top_down_order())
            if (std::binary_search(cells.begin(), cells.end(), c))
                steps.push_back({c, t});
        done.insert(done.end(), cells.begin(), cells.end());
        std::sort(done.begin(), done.end());
        if (!is_up_closed(site, done))
            throw MathError("Deligne construction: the union of strata down to \"" + s +
                            "\" is not open (frontier condition fails)");
    }
    return deligne_model(k, site, open, steps);
}

}  // namespace

SheafComplex deligne_ic(const CellSite& site, const CellSheaf& local_system)
{
    const int top = top_cdim(site);
    std::vector<std::string> rest;
    std::string open_name;
    for (const auto& s : site.stratum_names()) {
        if (site.stratum_cdim(s) == top) {
            if (!open_name.empty())
                throw MathError("Deligne construction: more than one stratum of top dimension");
            open_name = s;
        } else {
            rest.push_back(s);
        }
    }
    const CellSet& open = site.stratum_cells(open_name);
    if (!is_up_closed(site, open))
        throw MathError("Deligne construction: stratum \"" + open_name + "\" is not open");
    const CellSite osite = subsite(site, open);
    validate_sheaf(local_system, osite);
    for (const auto& cv : osite.covers()) {
        const RationalMatrix m = local_system.restriction(cv.face, cv.coface);
        if (m.rows() != m.cols() || (m.rows() > 0 && is_zero(determinant<Rational>(m))))
            throw MathError("Deligne construction: the input is not locally constant at (\"" +
                            osite.name(cv.face) + "\", \"" + osite.name(cv.coface) + "\")");
    }
    for (std::size_t c = 1; c < local_system.stalk.size(); ++c)
        if (local_system.stalk[c] != local_system.stalk[0])
            throw MathError("Deligne construction: the input has jumping rank");

    const SheafComplex k = extend_by_zero(single(local_system), site, open);
    std::sort(rest.begin(), rest.end(), [&](const std::string& a, const std::string& b) {
        const int ca = site.stratum_cdim(a), cb = site.stratum_cdim(b);
        return ca != cb ? ca > cb : a < b;
    });
    bool total = true;
    for (std::size_t i = 0; i < rest.size(); ++i)
        for (std::size_t j = i + 1; j < rest.size(); ++j)
            if (!below(site, site.stratum_cells(rest[j]), site.stratum_cells(rest[i])))
                total = false;

    auto model = std::make_shared<const InjModel>(deligne_along(site, k, open, rest, top));
    SheafComplex ic = explicit_complex(model, site);
    if (!total) {
        // compare against the refinement with ties broken the other way
        std::vector<std::string> other = rest;
        std::stable_sort(other.begin(), other.end(), [&](const std::string& a, const std::string& b) {
            const int ca = site.stratum_cdim(a), cb = site.stratum_cdim(b);
            return ca != cb ? ca > cb : a > b;
        });
        const SheafComplex alt = explicit_complex(
            std::make_shared<const InjModel>(deligne_along(site, k, open, other, top)), site);
        for (int c = 0; c < static_cast<int>(site.size()); ++c)
            if (!(derived_stalk(ic, c) == derived_stalk(alt, c)))
                throw MathError("Deligne construction: strata are not totally ordered by closure and two linear "
                                "refinements disagree at \"" + site.name(c) + "\"");
    }
    return ic;
}

CurveIcTable ic_curve(const std::vector<RationalMatrix>& monodromies, long rank)
{
    if (rank < 0)
        throw MathError("ic_curve: negative rank");
    CurveIcTable t;
    t.generic_rank = rank;
    for (const auto& m : monodromies) {
        if (m.rows() != m.cols() || m.rows() != rank)
            throw MathError("ic_curve: monodromy must be a square matrix of the given rank");
        t.puncture_stalks.push_back(rank - static_cast<long>(perverscope::rank<Rational>(m - identity(rank))));
    }
    return t;
}

// ----------------------------------------------------- global checks

SelfDualityReport numerical_selfduality(const SheafComplex& k, const CellSite& site, int shift)
{
    if (!site.has_compactification())
        throw MathError("numerical_selfduality: the site must be declared compact (or be an open part of one)");
    SelfDualityReport r;
    r.h = cohomology(sections_complex(k, site)).shifted(shift);
    r.hc = cohomology(compact_sections_complex(k, site, all_cells(site))).shifted(shift);
    std::set<int> degrees;
    for (const auto& [i, d] : r.h.map())
        degrees.insert(i);
    for (const auto& [i, d] : r.hc.map())
        degrees.insert(-i);
    for (int i : degrees)
        if (r.h[i] != r.hc[-i])
            r.defects[i] = {r.h[i], r.hc[-i]};
    r.self_dual = r.defects.empty();
    return r;
}

ArtinReport artin_range_check(const SheafComplex& k, const CellSite& site, int d, int shift)
{
    if (!site.affine)
        throw MathError("artin_range_check: the site is not declared affine");
    ArtinReport r;
    r.h = cohomology(sections_complex(k, site)).shifted(shift);
    r.ok = r.h.empty() || (r.h.lo() >= -d && r.h.hi() <= 0);
    if (site.has_compactification()) {
        r.hc_checked = true;
        r.hc = cohomology(compact_sections_complex(k, site, all_cells(site))).shifted(shift);
        r.ok = r.ok && (r.hc.empty() || (r.hc.lo() >= 0 && r.hc.hi() <= d));
    }
    return r;
}

}  // namespace perverscope
