#include "perverscope/homalg.hpp"

#include <sstream>

namespace perverscope {

// ---------------------------------------------------------------- GradedDims

GradedDims::GradedDims(std::initializer_list<std::pair<const int, long>> init)
{
    for (const auto& [k, v] : init)
        set(k, v);
}

GradedDims GradedDims::from_vector(int lo, const std::vector<long>& dims)
{
    GradedDims g;
    for (std::size_t i = 0; i < dims.size(); ++i)
        g.set(lo + static_cast<int>(i), dims[i]);
    return g;
}

long GradedDims::operator[](int degree) const
{
    auto it = dims_.find(degree);
    return it == dims_.end() ? 0 : it->second;
}

void GradedDims::set(int degree, long value)
{
    if (value < 0)
        throw MathError("GradedDims: negative dimension");
    if (value == 0)
        dims_.erase(degree);
    else
        dims_[degree] = value;
}

void GradedDims::add(int degree, long value) { set(degree, (*this)[degree] + value); }

int GradedDims::lo() const
{
    if (dims_.empty())
        throw MathError("GradedDims: empty");
    return dims_.begin()->first;
}

int GradedDims::hi() const
{
    if (dims_.empty())
        throw MathError("GradedDims: empty");
    return dims_.rbegin()->first;
}

long GradedDims::total() const
{
    long t = 0;
    for (const auto& [k, v] : dims_)
        t += v;
    return t;
}

long GradedDims::euler() const
{
    long t = 0;
    for (const auto& [k, v] : dims_)
        t += (k % 2 == 0) ? v : -v;
    return t;
}

GradedDims GradedDims::shifted(int a) const
{
    GradedDims g;
    for (const auto& [k, v] : dims_)
        g.set(k - a, v);
    return g;
}

std::vector<long> GradedDims::to_vector(int lo, int hi) const
{
    std::vector<long> out;
    for (int k = lo; k <= hi; ++k)
        out.push_back((*this)[k]);
    return out;
}

std::string GradedDims::str() const
{
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [k, v] : dims_) {
        os << (first ? "" : ", ") << k << ": " << v;
        first = false;
    }
    os << "}";
    return os.str();
}

GradedDims operator+(const GradedDims& a, const GradedDims& b)
{
    GradedDims g = a;
    for (const auto& [k, v] : b.map())
        g.add(k, v);
    return g;
}

// ------------------------------------------------------------ CochainComplex

long CochainComplex::dim(int degree) const
{
    if (degree < lo || degree > hi())
        return 0;
    return dims[static_cast<std::size_t>(degree - lo)];
}

SparseRationalMatrix CochainComplex::d(int degree) const
{
    if (degree >= lo && degree < hi())
        return diffs[static_cast<std::size_t>(degree - lo)];
    return SparseRationalMatrix(dim(degree + 1), dim(degree));
}

void CochainComplex::validate() const
{
    const std::size_t expected = dims.empty() ? 0 : dims.size() - 1;
    if (diffs.size() != expected)
        throw MathError("malformed complex: expected " + std::to_string(expected) +
                        " differentials, got " + std::to_string(diffs.size()));
    for (int n = lo; n < hi(); ++n) {
        const auto& m = diffs[static_cast<std::size_t>(n - lo)];
        if (m.rows() != dim(n + 1) || m.cols() != dim(n))
            throw MathError("malformed complex: differential out of degree " + std::to_string(n) +
                            " has shape " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    }
    for (int n = lo; n + 1 < hi(); ++n) {
        SparseRationalMatrix dd = d(n + 1) * d(n);
        for (int k = 0; k < dd.outerSize(); ++k)
            for (SparseRationalMatrix::InnerIterator it(dd, k); it; ++it)
                if (!is_zero(it.value()))
                    throw MathError("malformed complex: d∘d ≠ 0 at degree " + std::to_string(n));
    }
}

CochainComplex make_complex(int lo, std::vector<long> dims, std::vector<RationalMatrix> diffs)
{
    CochainComplex c;
    c.lo = lo;
    c.dims = std::move(dims);
    for (const auto& m : diffs)
        c.diffs.push_back(to_sparse(m));
    c.validate();
    return c;
}

CochainComplex zero_complex() { return CochainComplex{}; }

SparseRationalMatrix ChainMap::at(int degree) const
{
    if (degree >= source.lo && degree <= source.hi())
        return comps[static_cast<std::size_t>(degree - source.lo)];
    return SparseRationalMatrix(target.dim(degree), source.dim(degree));
}

bool is_chain_map(const ChainMap& f)
{
    if (f.comps.size() != f.source.dims.size())
        return false;
    for (int n = f.source.lo; n <= f.source.hi(); ++n) {
        const auto m = f.at(n);
        if (m.rows() != f.target.dim(n) || m.cols() != f.source.dim(n))
            return false;
    }
    const int lo = std::min(f.source.lo, f.target.lo) - 1;
    const int hi = std::max(f.source.hi(), f.target.hi()) + 1;
    for (int n = lo; n <= hi; ++n) {
        SparseRationalMatrix lhs = f.target.d(n) * f.at(n);
        SparseRationalMatrix rhs = f.at(n + 1) * f.source.d(n);
        SparseRationalMatrix diff = lhs - rhs;
        for (int k = 0; k < diff.outerSize(); ++k)
            for (SparseRationalMatrix::InnerIterator it(diff, k); it; ++it)
                if (!is_zero(it.value()))
                    return false;
    }
    return true;
}

// --------------------------------------------------------------- cohomology

GradedDims cohomology(const CochainComplex& c)
{
    GradedDims g;
    std::vector<long> ranks;
    for (int n = c.lo; n <= c.hi(); ++n)
        ranks.push_back(static_cast<long>(sparse_rank(c.d(n))));
    for (int n = c.lo; n <= c.hi(); ++n) {
        const long rout = ranks[static_cast<std::size_t>(n - c.lo)];
        const long rin = n > c.lo ? ranks[static_cast<std::size_t>(n - c.lo - 1)] : 0;
        g.set(n, c.dim(n) - rout - rin);
    }
    if (g.euler() != euler_characteristic(c))
        throw MathError("cohomology: Euler characteristic mismatch");
    return g;
}

long euler_characteristic(const CochainComplex& c)
{
    long e = 0;
    for (int n = c.lo; n <= c.hi(); ++n)
        e += (n % 2 == 0 ? 1 : -1) * c.dim(n);
    return e;
}

CohomologyBasis cohomology_basis(const CochainComplex& c, int degree)
{
    CohomologyBasis b;
    b.degree = degree;
    const RationalMatrix dout = to_dense(c.d(degree));
    const RationalMatrix din = to_dense(c.d(degree - 1));
    const RationalMatrix z = kernel<Rational>(dout);
    b.boundaries = column_space<Rational>(din);
    const auto e = rref<Rational>(hstack<Rational>(b.boundaries, z));
    std::vector<Eigen::Index> picks;
    for (auto p : e.pivots)
        if (p >= b.boundaries.cols())
            picks.push_back(p - b.boundaries.cols());
    b.cocycles = RationalMatrix(c.dim(degree), static_cast<Eigen::Index>(picks.size()));
    for (std::size_t j = 0; j < picks.size(); ++j)
        b.cocycles.col(static_cast<Eigen::Index>(j)) = z.col(picks[j]);
    return b;
}

// ----------------------------------------------------- shift and truncation

CochainComplex shift(const CochainComplex& c, int a)
{
    CochainComplex s = c;
    s.lo = c.lo - a;
    if (a % 2 != 0)
        for (auto& m : s.diffs)
            m = -m;
    return s;
}

CochainComplex truncate_leq(const CochainComplex& c, int k)
{
    if (c.dims.empty() || k >= c.hi())
        return c;
    if (k < c.lo)
        return zero_complex();
    CochainComplex t;
    t.lo = c.lo;
    for (int n = c.lo; n < k; ++n)
        t.dims.push_back(c.dim(n));
    const RationalMatrix ker = kernel<Rational>(to_dense(c.d(k)));
    t.dims.push_back(ker.cols());
    for (int n = c.lo; n + 1 < k; ++n)
        t.diffs.push_back(c.d(n));
    if (k > c.lo)
        t.diffs.push_back(to_sparse(solve<Rational>(ker, to_dense(c.d(k - 1)))));
    return t;
}

UpperTruncation truncate_gt(const CochainComplex& c, int k)
{
    UpperTruncation u;
    if (c.dims.empty() || k >= c.hi()) {
        u.complex = zero_complex();
        u.quotient = zeros(0, c.dim(k + 1));
        return u;
    }
    if (k + 1 < c.lo) {
        u.complex = c;
        u.quotient = zeros(0, 0);
        return u;
    }
    const long n1 = c.dim(k + 1);
    const RationalMatrix b = column_space<Rational>(to_dense(c.d(k)));
    const auto e = rref<Rational>(hstack<Rational>(b, identity(n1)));
    std::vector<Eigen::Index> comp;
    for (auto p : e.pivots)
        if (p >= b.cols())
            comp.push_back(p - b.cols());
    RationalMatrix s = zeros(n1, static_cast<Eigen::Index>(comp.size()));
    for (std::size_t j = 0; j < comp.size(); ++j)
        s(comp[j], static_cast<Eigen::Index>(j)) = 1;
    const RationalMatrix basis_inv = inverse<Rational>(hstack<Rational>(b, s));
    u.quotient = basis_inv.bottomRows(s.cols());
    CochainComplex& t = u.complex;
    t.lo = k + 1;
    t.dims.push_back(s.cols());
    for (int n = k + 2; n <= c.hi(); ++n)
        t.dims.push_back(c.dim(n));
    if (c.hi() > k + 1) {
        t.diffs.push_back(to_sparse(RationalMatrix(to_dense(c.d(k + 1)) * s)));
        for (int n = k + 2; n < c.hi(); ++n)
            t.diffs.push_back(c.d(n));
    }
    return u;
}

// ------------------------------------------------------------------- cones

CochainComplex mapping_cone(const ChainMap& f)
{
    if (!is_chain_map(f))
        throw MathError("mapping_cone: input is not a chain map");
    const auto& a = f.source;
    const auto& b = f.target;
    if (a.dims.empty() && b.dims.empty())
        return zero_complex();
    const int lo = std::min(b.dims.empty() ? a.lo - 1 : b.lo, a.dims.empty() ? b.lo : a.lo - 1);
    const int hi = std::max(b.dims.empty() ? a.hi() - 1 : b.hi(), a.dims.empty() ? b.hi() : a.hi() - 1);
    CochainComplex c;
    c.lo = lo;
    for (int n = lo; n <= hi; ++n)
        c.dims.push_back(b.dim(n) + a.dim(n + 1));
    for (int n = lo; n < hi; ++n) {
        std::vector<Eigen::Triplet<Rational>> t;
        const auto db = b.d(n);
        const auto fa = f.at(n + 1);
        const auto da = a.d(n + 1);
        const int bn = static_cast<int>(b.dim(n)), bn1 = static_cast<int>(b.dim(n + 1));
        for (int k = 0; k < db.outerSize(); ++k)
            for (SparseRationalMatrix::InnerIterator it(db, k); it; ++it)
                t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
        for (int k = 0; k < fa.outerSize(); ++k)
            for (SparseRationalMatrix::InnerIterator it(fa, k); it; ++it)
                t.emplace_back(static_cast<int>(it.row()), bn + static_cast<int>(it.col()), it.value());
        for (int k = 0; k < da.outerSize(); ++k)
            for (SparseRationalMatrix::InnerIterator it(da, k); it; ++it)
                t.emplace_back(bn1 + static_cast<int>(it.row()), bn + static_cast<int>(it.col()),
                               Rational(-it.value()));
        SparseRationalMatrix m(c.dims[static_cast<std::size_t>(n + 1 - lo)],
                               c.dims[static_cast<std::size_t>(n - lo)]);
        m.setFromTriplets(t.begin(), t.end());
        c.diffs.push_back(std::move(m));
    }
    return c;
}

long induced_rank(const ChainMap& f, int degree)
{
    const auto hs = cohomology_basis(f.source, degree);
    const auto ht = cohomology_basis(f.target, degree);
    const RationalMatrix img = to_dense(f.at(degree)) * hs.cocycles;
    return static_cast<long>(rank<Rational>(hstack<Rational>(ht.boundaries, img)) -
                             ht.boundaries.cols());
}

// ------------------------------------------------------ filtered complexes

RationalMatrix FilteredComplex::step(int p, int degree) const
{
    const long n = complex.dim(degree);
    if (p <= p0)
        return identity(n);
    if (p >= p_end() || degree < complex.lo || degree > complex.hi())
        return zeros(n, 0);
    return steps[static_cast<std::size_t>(p - p0)][static_cast<std::size_t>(degree - complex.lo)];
}

void FilteredComplex::validate() const
{
    complex.validate();
    for (int p = p0; p <= p_end(); ++p)
        for (int n = complex.lo; n <= complex.hi(); ++n) {
            const RationalMatrix f = step(p, n);
            if (f.rows() != complex.dim(n))
                throw MathError("filtration: step has wrong ambient dimension");
            const RationalMatrix df = to_dense(complex.d(n)) * f;
            const RationalMatrix target = step(p, n + 1);
            if (rank<Rational>(hstack<Rational>(target, df)) != rank<Rational>(target))
                throw MathError("filtration: step " + std::to_string(p) +
                                " is not a subcomplex in degree " + std::to_string(n));
            const RationalMatrix next = step(p + 1, n);
            if (rank<Rational>(hstack<Rational>(f, next)) != rank<Rational>(f))
                throw MathError("filtration: not decreasing at step " + std::to_string(p));
        }
    for (int n = complex.lo; n <= complex.hi(); ++n)
        if (rank<Rational>(step(p0, n)) != complex.dim(n))
            throw MathError("filtration: first step is not the whole complex");
}

FilteredComplex filtration_by_levels(const CochainComplex& c,
                                     const std::vector<std::vector<int>>& levels)
{
    if (levels.size() != c.dims.size())
        throw MathError("filtration_by_levels: one level list per degree expected");
    int lo = 0, hi = 0;
    bool any = false;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        if (static_cast<long>(levels[k].size()) != c.dims[k])
            throw MathError("filtration_by_levels: level list length mismatch");
        for (int l : levels[k]) {
            lo = any ? std::min(lo, l) : l;
            hi = any ? std::max(hi, l) : l;
            any = true;
        }
    }
    FilteredComplex fc;
    fc.complex = c;
    fc.p0 = lo;
    for (int p = lo; p <= hi; ++p) {
        std::vector<RationalMatrix> per_degree;
        for (std::size_t k = 0; k < levels.size(); ++k) {
            std::vector<int> pick;
            for (std::size_t i = 0; i < levels[k].size(); ++i)
                if (levels[k][i] >= p)
                    pick.push_back(static_cast<int>(i));
            RationalMatrix s = zeros(c.dims[k], static_cast<Eigen::Index>(pick.size()));
            for (std::size_t j = 0; j < pick.size(); ++j)
                s(pick[j], static_cast<Eigen::Index>(j)) = 1;
            per_degree.push_back(std::move(s));
        }
        fc.steps.push_back(std::move(per_degree));
    }
    fc.validate();
    return fc;
}

namespace {

struct PageCalculator {
    const FilteredComplex& fc;

    // Z_r^p in degree n: F^p ∩ d^{-1}(F^{p+r})
    RationalMatrix z(int r, int p, int n) const
    {
        const RationalMatrix f = fc.step(p, n);
        if (r <= 0)
            return f;
        const RationalMatrix pre = preimage<Rational>(to_dense(fc.complex.d(n)), fc.step(p + r, n + 1));
        return intersection<Rational>(f, pre);
    }

    // denominator: Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}
    RationalMatrix denom(int r, int p, int n) const
    {
        const RationalMatrix a = z(r - 1, p + 1, n);
        const RationalMatrix b = to_dense(fc.complex.d(n - 1)) * z(r - 1, p - r + 1, n - 1);
        return column_space<Rational>(hstack<Rational>(a, b));
    }

    SpectralPage page(int r) const
    {
        SpectralPage pg;
        pg.r = r;
        for (int n = fc.complex.lo; n <= fc.complex.hi(); ++n)
            for (int p = fc.p0; p < fc.p_end(); ++p) {
                const RationalMatrix zz = z(r, p, n);
                const RationalMatrix dd = denom(r, p, n);
                const long dim = static_cast<long>(rank<Rational>(zz) - dd.cols());
                if (dim != 0)
                    pg.dims[{p, n - p}] = dim;
                if (dim == 0)
                    continue;
                const RationalMatrix target_den = denom(r, p + r, n + 1);
                const RationalMatrix img = to_dense(fc.complex.d(n)) * zz;
                const long rk =
                    static_cast<long>(rank<Rational>(hstack<Rational>(target_den, img)) - target_den.cols());
                if (rk != 0)
                    pg.diff_rank[{p, n - p}] = rk;
            }
        return pg;
    }
};

}  // namespace

std::vector<SpectralPage> spectral_pages(const FilteredComplex& fc, int r_max)
{
    PageCalculator calc{fc};
    std::vector<SpectralPage> pages;
    for (int r = 1; r <= r_max; ++r)
        pages.push_back(calc.page(r));
    for (std::size_t i = 0; i + 1 < pages.size(); ++i) {
        // E_{r+1} = H(E_r, d_r), checked dimensionally
        for (const auto& [pq, dim] : pages[i + 1].dims) {
            const int r = pages[i].r;
            const auto [p, q] = pq;
            long expect = pages[i].dims.count(pq) ? pages[i].dims.at(pq) : 0;
            auto out = pages[i].diff_rank.find(pq);
            if (out != pages[i].diff_rank.end())
                expect -= out->second;
            auto in = pages[i].diff_rank.find({p - r, q + r - 1});
            if (in != pages[i].diff_rank.end())
                expect -= in->second;
            if (expect != dim)
                throw MathError("spectral_pages: page inconsistency");
        }
    }
    return pages;
}

SpectralPage limit_page(const FilteredComplex& fc)
{
    PageCalculator calc{fc};
    return calc.page(fc.p_end() - fc.p0 + 2);
}

std::map<std::pair<int, int>, long> induced_filtration(const FilteredComplex& fc)
{
    std::map<std::pair<int, int>, long> out;
    for (int n = fc.complex.lo; n <= fc.complex.hi(); ++n) {
        const RationalMatrix dn = to_dense(fc.complex.d(n));
        const RationalMatrix bnd = column_space<Rational>(to_dense(fc.complex.d(n - 1)));
        const RationalMatrix ker = kernel<Rational>(dn);
        for (int p = fc.p0; p <= fc.p_end(); ++p) {
            const RationalMatrix zp = intersection<Rational>(fc.step(p, n), ker);
            out[{p, n}] = static_cast<long>(rank<Rational>(hstack<Rational>(bnd, zp)) - bnd.cols());
        }
    }
    return out;
}

bool is_E2_degenerate(const FilteredComplex& fc)
{
    const auto pages = spectral_pages(fc, 2);
    return pages.back().dims == limit_page(fc).dims;
}

}  // namespace perverscope
