#include "perverscope/decomp.hpp"
#include "perverscope/hilbpart.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <tuple>
#include <set>

namespace perverscope {

namespace {

/// Permutation j -> π(j) read off a permutation matrix; throws otherwise.
std::vector<int> as_permutation(const RationalMatrix& m)
{
    std::vector<int> pi(static_cast<std::size_t>(m.cols()), -1);
    std::vector<bool> hit(static_cast<std::size_t>(m.rows()), false);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (is_zero(m(i, j)))
                continue;
            if (m(i, j) != 1 || pi[static_cast<std::size_t>(j)] >= 0 || hit[static_cast<std::size_t>(i)])
                throw MathError("component monodromy must consist of permutation matrices");
            pi[static_cast<std::size_t>(j)] = static_cast<int>(i);
            hit[static_cast<std::size_t>(i)] = true;
        }
    if (std::find(pi.begin(), pi.end(), -1) != pi.end())
        throw MathError("component monodromy must consist of permutation matrices");
    return pi;
}

MonodromyRep component_rep(const StratumRecord& s)
{
    return MonodromyRep{s.components, s.comp_monodromy};
}

}  // namespace

void validate_stratification(const MapStratification& ms)
{
    if (ms.dim_x < 0 || ms.target_dim() < 0)
        throw MathError("stratification \"" + ms.name + "\": negative dimension");
    if (ms.strata.empty())
        throw MathError("stratification \"" + ms.name + "\": no strata");
    std::set<std::string> names;
    int finite = 0;
    for (const auto& s : ms.strata) {
        if (!names.insert(s.name).second)
            throw MathError("stratification \"" + ms.name + "\": duplicate stratum \"" + s.name + "\"");
        if (s.dim_s < 0 || s.fiber_dim < 0 || s.components < 1)
            throw MathError("stratum \"" + s.name + "\": dimensions must be non-negative and components positive");
        if (s.dim_s > ms.target_dim())
            throw MathError("stratum \"" + s.name + "\": larger than the target");
        for (const auto& m : s.comp_monodromy) {
            if (m.rows() != s.components || m.cols() != s.components)
                throw MathError("stratum \"" + s.name + "\": monodromy size differs from the component count");
            as_permutation(m);
        }
        if (s.fiber_dim == 0)
            ++finite;
    }
    if (ms.generically_finite && finite != 1)
        throw MathError("stratification \"" + ms.name +
                        "\": a generically finite map needs exactly one stratum with finite fibers");
}

bool is_semismall(const MapStratification& ms)
{
    validate_stratification(ms);
    return std::all_of(ms.strata.begin(), ms.strata.end(),
                       [&](const StratumRecord& s) { return s.dim_s + 2 * s.fiber_dim <= ms.dim_x; });
}

bool is_small(const MapStratification& ms)
{
    if (!is_semismall(ms))
        return false;
    return std::all_of(ms.strata.begin(), ms.strata.end(), [&](const StratumRecord& s) {
        return s.fiber_dim == 0 || s.dim_s + 2 * s.fiber_dim < ms.dim_x;
    });
}

std::vector<std::string> relevant_strata(const MapStratification& ms)
{
    if (!is_semismall(ms))
        throw MathError("\"" + ms.name + "\" is not semismall");
    std::vector<std::string> out;
    for (const auto& s : ms.strata)
        if (s.dim_s + 2 * s.fiber_dim == ms.dim_x)
            out.push_back(s.name);
    return out;
}

DTShape dt_semismall(const MapStratification& ms)
{
    const auto rel = relevant_strata(ms);
    DTShape shape;
    for (const auto& s : ms.strata) {
        if (std::find(rel.begin(), rel.end(), s.name) == rel.end())
            continue;
        const MonodromyRep rep = component_rep(s);
        const auto pieces = isotypic_decomposition(rep);
        int index = 0;
        for (const auto& p : pieces) {
            std::string label;
            const bool trivial = std::all_of(rep.generators.begin(), rep.generators.end(), [&](const RationalMatrix& g) {
                return RationalMatrix(g * p.simple_basis) == p.simple_basis;
            });
            if (trivial)
                label = "trivial";
            else if (p.simple_rank == 1 && std::all_of(rep.generators.begin(), rep.generators.end(),
                                                       [&](const RationalMatrix& g) {
                                                           const RationalMatrix v = g * p.simple_basis;
                                                           return v == p.simple_basis || v == RationalMatrix(-p.simple_basis);
                                                       }))
                label = "sign";
            else
                label = "isotypic-" + std::to_string(index);
            ++index;
            shape.summands.push_back({s.name, label, p.simple_rank, p.multiplicity, 0, p.division_dim});
        }
    }
    return shape;
}

bool palindromic_check(const DTShape& shape)
{
    std::multiset<std::tuple<std::string, std::string, long, long, int>> items;
    for (const auto& s : shape.summands)
        items.insert({s.stratum, s.local_system, s.rank, s.multiplicity, s.shift});
    for (const auto& s : shape.summands)
        if (items.count({s.stratum, s.local_system, s.rank, s.multiplicity, -s.shift}) !=
            items.count({s.stratum, s.local_system, s.rank, s.multiplicity, s.shift}))
            return false;
    return true;
}

bool gm_codim_bound(const DTShape& shape, const MapStratification& ms, int d)
{
    for (const auto& sm : shape.summands) {
        auto it = std::find_if(ms.strata.begin(), ms.strata.end(),
                               [&](const StratumRecord& s) { return s.name == sm.stratum; });
        if (it == ms.strata.end())
            throw MathError("gm_codim_bound: summand on unknown stratum \"" + sm.stratum + "\"");
        if (ms.target_dim() - it->dim_s > d)
            return false;
    }
    return true;
}

DefectReport defect(const MapStratification& ms)
{
    validate_stratification(ms);
    DefectReport r;
    int top = 0;
    for (const auto& s : ms.strata)
        top = std::max(top, s.dim_s + 2 * s.fiber_dim);
    r.record_bound = std::max(0, top - ms.dim_x);
    r.defect = r.record_bound;
    if (ms.fiber_product_dim) {
        if (*ms.fiber_product_dim < top)
            throw MathError("defect: supplied dim X×_Y X = " + std::to_string(*ms.fiber_product_dim) +
                            " is below the dimension " + std::to_string(top) + " forced by the strata");
        r.defect = std::max(0, *ms.fiber_product_dim - ms.dim_x);
        r.from_fiber_product = true;
    }
    return r;
}

EndoReport endo_dimension(const DTShape& shape, const MapStratification& ms)
{
    EndoReport r;
    std::set<std::string> strata;
    for (const auto& s : shape.summands) {
        r.sum_m2 += s.multiplicity * s.multiplicity;
        r.algebra_dim += s.multiplicity * s.multiplicity * s.division_dim;
        strata.insert(s.stratum);
    }
    for (const auto& st : ms.strata) {
        if (!strata.count(st.name))
            continue;
        // orbits of the monodromy group on ordered pairs of components, by union-find
        const long n = st.components;
        std::vector<long> parent(static_cast<std::size_t>(n * n));
        std::iota(parent.begin(), parent.end(), 0L);
        std::function<long(long)> find = [&](long x) {
            while (parent[static_cast<std::size_t>(x)] != x)
                x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            return x;
        };
        for (const auto& m : st.comp_monodromy) {
            const auto pi = as_permutation(m);
            for (long a = 0; a < n; ++a)
                for (long b = 0; b < n; ++b) {
                    const long u = find(a * n + b);
                    const long v = find(pi[static_cast<std::size_t>(a)] * n + pi[static_cast<std::size_t>(b)]);
                    if (u != v)
                        parent[static_cast<std::size_t>(u)] = v;
                }
        }
        for (long x = 0; x < n * n; ++x)
            if (find(x) == x)
                ++r.component_count;
    }
    return r;
}

bool refined_form_sign(const RationalMatrix& m, int d)
{
    if (m.rows() != m.cols())
        throw MathError("refined_form_sign: matrix must be square");
    if (m != RationalMatrix(m.transpose()))
        throw MathError("refined_form_sign: matrix must be symmetric");
    const RationalMatrix s = d % 2 == 0 ? m : RationalMatrix(-m);
    for (const auto& minor : leading_minors<Rational>(s))
        if (minor <= 0)
            return false;
    return true;
}

SurfaceDTReport surface_resolution_dt(const std::vector<ExceptionalConfig>& points)
{
    SurfaceDTReport r;
    r.shape.summands.push_back({"Y", "trivial", 1, 1, 0, 1});
    r.orthogonal = true;
    for (const auto& p : points) {
        if (p.intersection.rows() != p.components || p.intersection.cols() != p.components)
            throw MathError("surface_resolution_dt: intersection matrix at \"" + p.point +
                            "\" must be components x components");
        if (!refined_form_sign(p.intersection, 1))
            throw MathError("decomposition obstructed at \"" + p.point +
                            "\": the intersection form of the exceptional curves is not negative definite");
        r.orthogonal = r.orthogonal && !is_zero(determinant<Rational>(p.intersection));
        r.shape.summands.push_back({p.point, "trivial", 1, p.components, 0, 1});
    }
    return r;
}

MapStratification hilbert_chow_strat(int n)
{
    if (n < 1)
        throw MathError("hilbert_chow_strat: n must be at least 1");
    MapStratification ms;
    ms.name = "Hilbert-Chow n=" + std::to_string(n);
    ms.dim_x = 2 * n;
    for (const auto& nu : partitions(n))
        ms.strata.push_back({nu.str(), 2 * nu.length(), nu.colength(), 1, {}});
    return ms;
}

}  // namespace perverscope
