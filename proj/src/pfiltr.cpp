#include "perverscope/pfiltr.hpp"
#include "perverscope/perversity.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace perverscope {

long FiltrationTable::total(int degree) const
{
    auto it = totals.find(degree);
    return it == totals.end() ? 0 : it->second;
}

long FiltrationTable::at(int degree, int level) const
{
    if (level < level_lo)
        return 0;
    if (level > level_hi)
        return total(degree);
    auto it = dims.find(degree);
    if (it == dims.end())
        return 0;
    return it->second[static_cast<std::size_t>(level - level_lo)];
}

long FiltrationTable::graded(int degree, int level) const
{
    return at(degree, level) - at(degree, level - 1);
}

void FiltrationTable::validate() const
{
    for (const auto& [n, row] : dims) {
        if (row.size() != static_cast<std::size_t>(std::max(0, level_hi - level_lo + 1)))
            throw MathError("filtration table: degree " + std::to_string(n) + " has the wrong number of levels");
        long prev = 0;
        for (long x : row) {
            if (x < prev)
                throw MathError("filtration table: not monotone in degree " + std::to_string(n));
            prev = x;
        }
        if (prev > total(n))
            throw MathError("filtration table: exceeds the total dimension in degree " + std::to_string(n));
    }
    for (const auto& [n, h] : totals) {
        if (h < 0)
            throw MathError("filtration table: negative total");
        if (!dims.count(n) && level_hi >= level_lo)
            throw MathError("filtration table: degree " + std::to_string(n) + " missing");
        if (at(n, level_hi) != h)
            throw MathError("filtration table: not exhaustive in degree " + std::to_string(n));
    }
}

std::string FiltrationTable::str() const
{
    std::ostringstream os;
    for (const auto& [n, h] : totals) {
        os << "H^" << n << " (" << h << "):";
        for (int b = level_lo; b <= level_hi; ++b)
            os << " P_" << b << "=" << at(n, b);
        os << "\n";
    }
    return os.str();
}

bool same_filtration(const FiltrationTable& a, const FiltrationTable& b)
{
    return table_differences(a, b).empty();
}

std::vector<std::pair<int, int>> table_differences(const FiltrationTable& a, const FiltrationTable& b)
{
    std::vector<std::pair<int, int>> out;
    std::vector<int> degrees;
    for (const auto& [n, h] : a.totals)
        degrees.push_back(n);
    for (const auto& [n, h] : b.totals)
        degrees.push_back(n);
    std::sort(degrees.begin(), degrees.end());
    degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
    const int lo = std::min(a.level_lo, b.level_lo) - 1, hi = std::max(a.level_hi, b.level_hi) + 1;
    for (int n : degrees)
        for (int l = lo; l <= hi; ++l)
            if (a.at(n, l) != b.at(n, l))
                out.emplace_back(n, l);
    return out;
}

FiltrationTable shift_levels(const FiltrationTable& t, int m)
{
    FiltrationTable r = t;
    r.level_lo = t.level_lo - m;
    r.level_hi = t.level_hi - m;
    return r;
}

FiltrationTable shift_complex(const FiltrationTable& t, int a)
{
    FiltrationTable r;
    r.level_lo = t.level_lo - a;
    r.level_hi = t.level_hi - a;
    for (const auto& [n, h] : t.totals)
        r.totals[n - a] = h;
    for (const auto& [n, row] : t.dims)
        r.dims[n - a] = row;
    return r;
}

NormalizedTable normalize(const FiltrationTable& t)
{
    if (t.totals.empty())
        throw MathError("normalize: the table is zero");
    int m = t.level_hi + 1;
    for (const auto& [n, h] : t.totals)
        for (int b = t.level_lo; b <= t.level_hi + 1; ++b)
            if (t.at(n, b) > 0) {
                m = std::min(m, b);
                break;
            }
    return {shift_levels(t, m), m};
}

namespace {

std::map<int, long> nonzero(const GradedDims& g) { return g.map(); }

}  // namespace

FiltrationTable flag_kernel_filtration(const SheafComplex& k, const CellSite& site, const Flag& flag)
{
    if (!site.affine)
        throw MathError("flag_kernel_filtration: the site is not declared affine");
    validate_flag(site, flag);
    if (flag.steps.empty() || flag.steps.front().size() != site.size())
        throw MathError("flag_kernel_filtration: the flag must start with the whole site");
    const auto h = nonzero(cohomology(sections_complex(k, site)));
    std::vector<std::map<int, long>> ranks;
    for (const auto& step : flag.steps)
        ranks.push_back(restriction_ranks(k, site, step));
    const int len = static_cast<int>(flag.steps.size());
    if (h.empty())
        return tabulate(h, 0, -1, [](int, int) { return 0L; });
    const int lo = h.begin()->first - 1, hi = h.rbegin()->first - 1 + len;
    return tabulate(h, lo, hi, [&](int n, int b) -> long {
        const int step = b - n + 1;
        const long hn = h.at(n);
        if (step <= 0)
            return 0;
        if (step >= len)
            return hn;
        auto it = ranks[static_cast<std::size_t>(step)].find(n);
        return hn - (it == ranks[static_cast<std::size_t>(step)].end() ? 0 : it->second);
    });
}

SheafComplex assemble(const std::vector<SplitSummand>& summands)
{
    if (summands.empty())
        throw MathError("assemble: no summands");
    SheafComplex k = shift(summands.front().piece, -summands.front().level);
    for (std::size_t i = 1; i < summands.size(); ++i)
        k = direct_sum(k, shift(summands[i].piece, -summands[i].level));
    return k;
}

FiltrationTable split_filtration(const std::vector<SplitSummand>& summands, const CellSite& site)
{
    if (summands.empty())
        throw MathError("split_filtration: no summands");
    std::vector<std::map<int, long>> h;
    int lo = summands.front().level, hi = lo;
    std::map<int, long> totals;
    for (std::size_t i = 0; i < summands.size(); ++i) {
        const auto& s = summands[i];
        if (!is_perverse(s.piece, site, 0))
            throw MathError("split_filtration: summand " + std::to_string(i) + " at level " + std::to_string(s.level) +
                            " is not perverse");
        h.push_back(nonzero(cohomology(sections_complex(s.piece, site))));
        for (const auto& [n, d] : h.back())
            totals[n + s.level] += d;
        lo = std::min(lo, s.level);
        hi = std::max(hi, s.level);
    }
    return tabulate(totals, lo, hi, [&](int n, int b) {
        long sum = 0;
        for (std::size_t i = 0; i < summands.size(); ++i)
            if (summands[i].level <= b) {
                auto it = h[i].find(n - summands[i].level);
                if (it != h[i].end())
                    sum += it->second;
            }
        return sum;
    });
}

FlagCertificate certify_flag(const std::vector<SplitSummand>& summands, const CellSite& site, const Flag& flag)
{
    validate_flag(site, flag);
    FlagCertificate cert;
    for (std::size_t i = 0; i < summands.size(); ++i) {
        const auto h = nonzero(cohomology(sections_complex(summands[i].piece, site)));
        for (std::size_t step = 0; step < flag.steps.size(); ++step) {
            const int kk = static_cast<int>(step);
            const auto r = restriction_ranks(summands[i].piece, site, flag.steps[step]);
            for (const auto& [n, d] : h) {
                auto it = r.find(n);
                const long rk = it == r.end() ? 0 : it->second;
                const bool good = n <= -kk ? rk == d : rk == 0;
                if (!good) {
                    cert.ok = false;
                    cert.failures.push_back("summand " + std::to_string(i) + ", Y_" + std::to_string(kk) + ", H^" +
                                            std::to_string(n) + ": restriction has rank " + std::to_string(rk) +
                                            (n <= -kk ? ", expected injective" : ", expected zero"));
                }
            }
        }
    }
    return cert;
}

FiltrationTable leray_filtration(const SheafComplex& k, const CellMap& f)
{
    if (!f.target.compact)
        throw MathError("leray_filtration: the target site must be compact");
    const SheafComplex e = pushforward(k, f);
    const CellSet all = all_cells(f.target);
    const CochainComplex ce = cellular_complex(e, f.target, all);
    const auto h = nonzero(cohomology(ce));
    int lo_e = 0;
    const auto ecoords = cellular_coords(e, f.target, all, lo_e);
    std::vector<std::map<std::tuple<int, int, int>, int>> epos(ecoords.size());
    for (std::size_t n = 0; n < ecoords.size(); ++n)
        for (std::size_t r = 0; r < ecoords[n].size(); ++r)
            epos[n][{ecoords[n][r].cell, ecoords[n][r].q, ecoords[n][r].index}] = static_cast<int>(r);

    std::map<int, std::map<int, long>> image;  // level -> degree -> dim
    for (int i = e.lo; i < e.hi(); ++i) {
        const Truncation tr = truncate_leq_with_inclusion(e, i);
        const CochainComplex ct = cellular_complex(tr.complex, f.target, all);
        int lo_t = 0;
        const auto tcoords = cellular_coords(tr.complex, f.target, all, lo_t);
        ChainMap incl{ct, ce, {}};
        for (std::size_t n = 0; n < tcoords.size(); ++n) {
            const std::size_t tn = n + static_cast<std::size_t>(lo_t - lo_e);
            const long rows = tn < ecoords.size() ? static_cast<long>(ecoords[tn].size()) : 0;
            std::vector<Eigen::Triplet<Rational>> trip;
            for (std::size_t j = 0; j < tcoords[n].size(); ++j) {
                const auto& x = tcoords[n][j];
                const RationalMatrix& m =
                    tr.inclusion[static_cast<std::size_t>(x.q - tr.complex.lo)][static_cast<std::size_t>(x.cell)];
                for (Eigen::Index r = 0; r < m.rows(); ++r)
                    if (!is_zero(m(r, x.index)))
                        trip.emplace_back(epos[tn].at({x.cell, x.q, static_cast<int>(r)}), static_cast<int>(j),
                                          m(r, x.index));
            }
            SparseRationalMatrix s(rows, static_cast<Eigen::Index>(tcoords[n].size()));
            s.setFromTriplets(trip.begin(), trip.end());
            incl.comps.push_back(std::move(s));
        }
        if (!is_chain_map(incl))
            throw MathError("leray_filtration: truncation inclusion is not a chain map");
        for (const auto& [n, d] : h) {
            (void)d;
            image[i][n] = induced_rank(incl, n);
        }
    }
    return tabulate(h, e.lo, e.hi(), [&](int n, int b) -> long {
        if (b >= e.hi())
            return h.at(n);
        return image[b][n];
    });
}

FiltrationTable skeletal_leray_filtration(const SheafComplex& k, const CellMap& f)
{
    if (!f.target.compact)
        throw MathError("skeletal_leray_filtration: the target site must be compact");
    const SheafComplex e = pushforward(k, f);
    const CellSet all = all_cells(f.target);
    const CochainComplex ce = cellular_complex(e, f.target, all);
    int lo = 0;
    const auto coords = cellular_coords(e, f.target, all, lo);
    std::vector<std::vector<int>> levels;
    for (const auto& v : coords) {
        levels.emplace_back();
        for (const auto& x : v)
            levels.back().push_back(f.target.dim(x.cell));
    }
    const FilteredComplex fc = filtration_by_levels(ce, levels);
    const auto ind = induced_filtration(fc);
    const auto h = nonzero(cohomology(ce));
    auto fdim = [&](int p, int n) -> long {
        if (p <= fc.p0)
            return h.count(n) ? h.at(n) : 0;
        if (p >= fc.p_end())
            return 0;
        auto it = ind.find({p, n});
        return it == ind.end() ? 0 : it->second;
    };
    if (h.empty())
        return tabulate(h, 0, -1, [](int, int) { return 0L; });
    const int top = f.target.max_dim();
    const int level_lo = h.begin()->first - top - 1, level_hi = h.rbegin()->first - fc.p0;
    return tabulate(h, level_lo, level_hi, [&](int n, int b) { return fdim(n - b, n); });
}

}  // namespace perverscope
