#include "perverscope/cellsheaf.hpp"
#include "perverscope/injective.hpp"

#include <algorithm>
#include <deque>

namespace perverscope {

// ------------------------------------------------------------------ sheaves

RationalMatrix CellSheaf::restriction(int face, int coface) const
{
    const long a = stalk.at(static_cast<std::size_t>(face)), b = stalk.at(static_cast<std::size_t>(coface));
    auto it = restr.find({face, coface});
    if (it != restr.end())
        return it->second;
    return zeros(b, a);
}

CellSheaf constant_sheaf(const CellSite& site, long rank) { return constant_on(site, all_cells(site), rank); }

CellSheaf constant_on(const CellSite& site, const CellSet& support, long rank)
{
    if (!is_locally_closed(site, support))
        throw MathError("constant_on: support is not locally closed");
    CellSheaf f;
    f.stalk.assign(site.size(), 0);
    for (int c : support)
        f.stalk[static_cast<std::size_t>(c)] = rank;
    for (const auto& cv : site.covers())
        if (f.stalk[static_cast<std::size_t>(cv.face)] > 0 && f.stalk[static_cast<std::size_t>(cv.coface)] > 0)
            f.restr[{cv.face, cv.coface}] = identity(rank);
    return f;
}

CellSheaf skyscraper(const CellSite& site, int cell, long rank) { return constant_on(site, {cell}, rank); }

CellSheaf twisted_sheaf(const CellSite& site, const CellSet& support, int face, int coface, const RationalMatrix& t)
{
    if (t.rows() != t.cols())
        throw MathError("twisted_sheaf: monodromy must be square");
    CellSheaf f = constant_on(site, support, t.rows());
    auto it = f.restr.find({face, coface});
    if (it == f.restr.end())
        throw MathError("twisted_sheaf: (\"" + site.name(face) + "\", \"" + site.name(coface) +
                        "\") is not a cover inside the support");
    it->second = t;
    validate_sheaf(f, site);
    return f;
}

void validate_sheaf(const CellSheaf& f, const CellSite& site)
{
    if (f.stalk.size() != site.size())
        throw MathError("sheaf: one stalk dimension per cell expected");
    for (long d : f.stalk)
        if (d < 0)
            throw MathError("sheaf: negative stalk dimension");
    std::set<std::pair<int, int>> covers;
    for (const auto& cv : site.covers())
        covers.insert({cv.face, cv.coface});
    for (const auto& [key, m] : f.restr) {
        if (!covers.count(key))
            throw MathError("sheaf: restriction given for a non-cover (\"" + site.name(key.first) + "\", \"" +
                            site.name(key.second) + "\")");
        if (m.rows() != f.stalk[static_cast<std::size_t>(key.second)] ||
            m.cols() != f.stalk[static_cast<std::size_t>(key.first)])
            throw MathError("sheaf: restriction (\"" + site.name(key.first) + "\", \"" + site.name(key.second) +
                            "\") has the wrong shape");
    }
    for (int t = 0; t < static_cast<int>(site.size()); ++t) {
        std::map<int, RationalMatrix> composite;
        for (const auto& [r, s1] : site.faces(t))
            for (const auto& [s, s2] : site.faces(r)) {
                RationalMatrix m = f.restriction(r, t) * f.restriction(s, r);
                auto it = composite.find(s);
                if (it == composite.end())
                    composite.emplace(s, m);
                else if (it->second != m)
                    throw MathError("sheaf: restrictions do not commute on the diamond from \"" + site.name(s) +
                                    "\" to \"" + site.name(t) + "\"");
            }
    }
}

// --------------------------------------------------------------- complexes

SheafComplex single(const CellSheaf& f, int degree)
{
    SheafComplex k;
    k.lo = degree;
    k.terms.push_back(f);
    return k;
}

SheafComplex shift(const SheafComplex& k, int a)
{
    SheafComplex r = k;
    r.lo = k.lo - a;
    if (a % 2 != 0)
        for (auto& per_cell : r.diffs)
            for (auto& m : per_cell)
                m = -m;
    if (k.model)
        r.model = std::make_shared<const InjModel>(shift_model(*k.model, a));
    return r;
}

namespace {

RationalMatrix block_diag(const RationalMatrix& a, const RationalMatrix& b)
{
    RationalMatrix m = zeros(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
}

CellSheaf zero_sheaf(std::size_t n) { return CellSheaf{std::vector<long>(n, 0), {}}; }

const CellSheaf& term_or(const SheafComplex& k, int q, const CellSheaf& zero)
{
    if (q < k.lo || q > k.hi())
        return zero;
    return k.terms[static_cast<std::size_t>(q - k.lo)];
}

RationalMatrix diff_at(const SheafComplex& k, int q, int cell)
{
    const CellSheaf z = zero_sheaf(k.cells());
    const long from = term_or(k, q, z).stalk.empty() ? 0 : term_or(k, q, z).stalk[static_cast<std::size_t>(cell)];
    const long to =
        term_or(k, q + 1, z).stalk.empty() ? 0 : term_or(k, q + 1, z).stalk[static_cast<std::size_t>(cell)];
    if (q < k.lo || q >= k.hi())
        return zeros(to, from);
    return k.diffs[static_cast<std::size_t>(q - k.lo)][static_cast<std::size_t>(cell)];
}

}  // namespace

SheafComplex direct_sum(const SheafComplex& a, const SheafComplex& b)
{
    if (a.cells() != b.cells())
        throw MathError("direct_sum: complexes live on different sites");
    const std::size_t n = a.cells();
    const int lo = std::min(a.lo, b.lo), hi = std::max(a.hi(), b.hi());
    const CellSheaf z = zero_sheaf(n);
    SheafComplex s;
    s.lo = lo;
    for (int q = lo; q <= hi; ++q) {
        const CellSheaf& fa = term_or(a, q, z);
        const CellSheaf& fb = term_or(b, q, z);
        CellSheaf f;
        for (std::size_t c = 0; c < n; ++c)
            f.stalk.push_back(fa.stalk[c] + fb.stalk[c]);
        std::set<std::pair<int, int>> keys;
        for (const auto& [k, m] : fa.restr)
            keys.insert(k);
        for (const auto& [k, m] : fb.restr)
            keys.insert(k);
        for (const auto& key : keys)
            f.restr[key] = block_diag(fa.restriction(key.first, key.second), fb.restriction(key.first, key.second));
        s.terms.push_back(std::move(f));
    }
    for (int q = lo; q < hi; ++q) {
        std::vector<RationalMatrix> per_cell;
        for (std::size_t c = 0; c < n; ++c)
            per_cell.push_back(block_diag(diff_at(a, q, static_cast<int>(c)), diff_at(b, q, static_cast<int>(c))));
        s.diffs.push_back(std::move(per_cell));
    }
    if (a.model && b.model) {
        InjModel m = *a.model;
        const int off = static_cast<int>(m.size());
        for (std::size_t i = 0; i < b.model->size(); ++i) {
            m.label.push_back(b.model->label[i]);
            m.degree.push_back(b.model->degree[i]);
            std::map<int, Rational> c;
            for (const auto& [r, v] : b.model->col[i])
                c[r + off] = v;
            m.col.push_back(std::move(c));
        }
        s.model = std::make_shared<const InjModel>(std::move(m));
    }
    return s;
}

void validate_complex(const SheafComplex& k, const CellSite& site)
{
    if (k.terms.empty())
        throw MathError("sheaf complex: no terms");
    if (k.diffs.size() != k.terms.size() - 1)
        throw MathError("sheaf complex: expected one differential between consecutive terms");
    for (const auto& t : k.terms)
        validate_sheaf(t, site);
    const int n = static_cast<int>(site.size());
    for (int q = k.lo; q < k.hi(); ++q) {
        const auto& per_cell = k.diffs[static_cast<std::size_t>(q - k.lo)];
        if (per_cell.size() != site.size())
            throw MathError("sheaf complex: one differential matrix per cell expected");
        const CellSheaf& f0 = k.terms[static_cast<std::size_t>(q - k.lo)];
        const CellSheaf& f1 = k.terms[static_cast<std::size_t>(q + 1 - k.lo)];
        for (int c = 0; c < n; ++c) {
            const auto& d = per_cell[static_cast<std::size_t>(c)];
            if (d.rows() != f1.stalk[static_cast<std::size_t>(c)] || d.cols() != f0.stalk[static_cast<std::size_t>(c)])
                throw MathError("sheaf complex: differential at \"" + site.name(c) + "\" has the wrong shape");
        }
        for (const auto& cv : site.covers()) {
            const RationalMatrix lhs = per_cell[static_cast<std::size_t>(cv.coface)] * f0.restriction(cv.face, cv.coface);
            const RationalMatrix rhs = f1.restriction(cv.face, cv.coface) * per_cell[static_cast<std::size_t>(cv.face)];
            if (lhs != rhs)
                throw MathError("sheaf complex: differential does not commute with restriction (\"" +
                                site.name(cv.face) + "\", \"" + site.name(cv.coface) + "\")");
        }
        if (q + 1 < k.hi())
            for (int c = 0; c < n; ++c) {
                const RationalMatrix dd = k.diffs[static_cast<std::size_t>(q + 1 - k.lo)][static_cast<std::size_t>(c)] *
                                          per_cell[static_cast<std::size_t>(c)];
                for (Eigen::Index i = 0; i < dd.size(); ++i)
                    if (!is_zero(dd.data()[i]))
                        throw MathError("sheaf complex: d∘d ≠ 0 at \"" + site.name(c) + "\"");
            }
    }
}

CochainComplex value_complex(const SheafComplex& k, int cell)
{
    CochainComplex c;
    c.lo = k.lo;
    for (const auto& t : k.terms)
        c.dims.push_back(t.stalk.at(static_cast<std::size_t>(cell)));
    for (const auto& per_cell : k.diffs)
        c.diffs.push_back(to_sparse(per_cell.at(static_cast<std::size_t>(cell))));
    return c;
}

std::vector<std::vector<CellularCoord>> cellular_coords(const SheafComplex& k, const CellSite& site,
                                                        const CellSet& cells, int& lo)
{
    int top = -1;
    for (int c : cells)
        top = std::max(top, site.dim(c));
    lo = k.lo;
    std::vector<std::vector<CellularCoord>> coords(static_cast<std::size_t>(std::max(0, top + 1 + k.hi() - k.lo + 1)));
    for (int c : cells)
        for (int q = k.lo; q <= k.hi(); ++q) {
            const long s = k.terms[static_cast<std::size_t>(q - k.lo)].stalk[static_cast<std::size_t>(c)];
            for (long i = 0; i < s; ++i)
                coords[static_cast<std::size_t>(site.dim(c) + q - k.lo)].push_back({c, q, static_cast<int>(i)});
        }
    return coords;
}

CochainComplex cellular_complex(const SheafComplex& k, const CellSite& site, const CellSet& cells)
{
    if (k.cells() != site.size())
        throw MathError("sheaf complex does not live on this site");
    int lo = 0;
    const auto coords = cellular_coords(k, site, cells, lo);
    std::vector<bool> in(site.size(), false);
    for (int c : cells)
        in[static_cast<std::size_t>(c)] = true;
    CochainComplex out;
    out.lo = lo;
    for (const auto& v : coords)
        out.dims.push_back(static_cast<long>(v.size()));
    for (std::size_t n = 0; n + 1 < coords.size(); ++n) {
        std::map<std::tuple<int, int, int>, int> pos;
        for (std::size_t r = 0; r < coords[n + 1].size(); ++r) {
            const auto& x = coords[n + 1][r];
            pos[{x.cell, x.q, x.index}] = static_cast<int>(r);
        }
        std::vector<Eigen::Triplet<Rational>> trip;
        std::map<std::pair<int, int>, RationalMatrix> rcache;
        for (std::size_t j = 0; j < coords[n].size(); ++j) {
            const auto& x = coords[n][j];
            const CellSheaf& f = k.terms[static_cast<std::size_t>(x.q - k.lo)];
            for (const auto& [t, sign] : site.cofaces(x.cell)) {
                if (!in[static_cast<std::size_t>(t)] || f.stalk[static_cast<std::size_t>(t)] == 0)
                    continue;
                auto it = rcache.find({x.cell, t});
                if (it == rcache.end())
                    it = rcache.emplace(std::make_pair(x.cell, t), f.restriction(x.cell, t)).first;
                const RationalMatrix& r = it->second;
                for (Eigen::Index i = 0; i < r.rows(); ++i)
                    if (!is_zero(r(i, x.index)))
                        trip.emplace_back(pos.at({t, x.q, static_cast<int>(i)}), static_cast<int>(j),
                                          Rational(sign) * r(i, x.index));
            }
            if (x.q < k.hi()) {
                const RationalMatrix& d =
                    k.diffs[static_cast<std::size_t>(x.q - k.lo)][static_cast<std::size_t>(x.cell)];
                const Rational sg = site.dim(x.cell) % 2 == 0 ? 1 : -1;
                for (Eigen::Index i = 0; i < d.rows(); ++i)
                    if (!is_zero(d(i, x.index)))
                        trip.emplace_back(pos.at({x.cell, x.q + 1, static_cast<int>(i)}), static_cast<int>(j),
                                          sg * d(i, x.index));
            }
        }
        SparseRationalMatrix m(static_cast<Eigen::Index>(coords[n + 1].size()),
                               static_cast<Eigen::Index>(coords[n].size()));
        m.setFromTriplets(trip.begin(), trip.end());
        out.diffs.push_back(m);
    }
    return out;
}

CochainComplex sections_complex(const SheafComplex& k, const CellSite& site)
{
    if (k.cells() != site.size())
        throw MathError("sheaf complex does not live on this site");
    if (site.compact)
        return cellular_complex(k, site, all_cells(site));
    return global_sections(*model_of(k, site));
}

CochainComplex compact_sections_complex(const SheafComplex& k, const CellSite& site, const CellSet& open)
{
    if (!site.has_compactification())
        throw MathError("compactly supported cohomology needs a site declared compact (or an open part of one); "
                        "supply the compactification explicitly");
    if (!is_up_closed(site, open))
        throw MathError("compact_sections_complex: the given set is not open");
    CellSet sorted = open;
    std::sort(sorted.begin(), sorted.end());
    return cellular_complex(k, site, sorted);
}

GradedDims derived_stalk(const SheafComplex& k, int cell) { return cohomology(value_complex(k, cell)); }

GradedDims costalk(const SheafComplex& k, const CellSite& site, int cell)
{
    return local_block_cohomology(*model_of(k, site), cell).shifted(-site.dim(cell));
}

// ------------------------------------------------------------- functors

namespace {

/// Composite restriction along any chain of covers from a up to b.
RationalMatrix restriction_along(const CellSheaf& f, const CellSite& site, int a, int b)
{
    if (a == b)
        return identity(f.stalk[static_cast<std::size_t>(a)]);
    for (const auto& [t, sign] : site.cofaces(a)) {
        (void)sign;
        if (site.leq(t, b))
            return RationalMatrix(restriction_along(f, site, t, b) * f.restriction(a, t));
    }
    throw MathError("restriction_along: cells are not comparable");
}

/// Value at source cell c is K(image[c]).
SheafComplex pull(const SheafComplex& k, const CellSite& target, const CellSite& source, const std::vector<int>& image)
{
    SheafComplex r;
    r.lo = k.lo;
    for (const auto& t : k.terms) {
        CellSheaf f;
        for (std::size_t c = 0; c < source.size(); ++c)
            f.stalk.push_back(t.stalk[static_cast<std::size_t>(image[c])]);
        for (const auto& cv : source.covers()) {
            const int a = image[static_cast<std::size_t>(cv.face)], b = image[static_cast<std::size_t>(cv.coface)];
            if (f.stalk[static_cast<std::size_t>(cv.face)] == 0 || f.stalk[static_cast<std::size_t>(cv.coface)] == 0)
                continue;
            f.restr[{cv.face, cv.coface}] = restriction_along(t, target, a, b);
        }
        r.terms.push_back(std::move(f));
    }
    for (const auto& per_cell : k.diffs) {
        std::vector<RationalMatrix> d;
        for (std::size_t c = 0; c < source.size(); ++c)
            d.push_back(per_cell[static_cast<std::size_t>(image[c])]);
        r.diffs.push_back(std::move(d));
    }
    return r;
}

}  // namespace

SheafComplex pushforward(const SheafComplex& k, const CellMap& f)
{
    validate_map(f);
    auto m = model_of(k, f.source);
    return explicit_complex(std::make_shared<const InjModel>(relabel(*m, f.image)), f.target);
}

SheafComplex pullback(const SheafComplex& k, const CellMap& f)
{
    validate_map(f);
    if (k.cells() != f.target.size())
        throw MathError("pullback: complex does not live on the target");
    return pull(k, f.target, f.source, f.image);
}

SheafComplex restrict_to(const SheafComplex& k, const CellSite& site, const CellSet& cells)
{
    CellSet sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    const CellSite sub = subsite(site, sorted);
    SheafComplex r = pull(k, site, sub, sorted);
    if (k.model && is_up_closed(site, sorted))
        r.model = std::make_shared<const InjModel>(restrict_open(*k.model, site, sorted));
    return r;
}

SheafComplex extend_by_zero(const SheafComplex& k, const CellSite& ambient, const CellSet& open)
{
    if (!is_up_closed(ambient, open))
        throw MathError("extend_by_zero: the given set is not open");
    CellSet sorted = open;
    std::sort(sorted.begin(), sorted.end());
    if (k.cells() != sorted.size())
        throw MathError("extend_by_zero: complex does not live on the open part");
    std::vector<int> local(ambient.size(), -1);
    for (std::size_t i = 0; i < sorted.size(); ++i)
        local[static_cast<std::size_t>(sorted[i])] = static_cast<int>(i);
    SheafComplex r;
    r.lo = k.lo;
    for (const auto& t : k.terms) {
        CellSheaf f;
        for (std::size_t c = 0; c < ambient.size(); ++c)
            f.stalk.push_back(local[c] >= 0 ? t.stalk[static_cast<std::size_t>(local[c])] : 0);
        for (const auto& cv : ambient.covers()) {
            const int a = local[static_cast<std::size_t>(cv.face)], b = local[static_cast<std::size_t>(cv.coface)];
            if (a >= 0 && b >= 0 && f.stalk[static_cast<std::size_t>(cv.face)] > 0 &&
                f.stalk[static_cast<std::size_t>(cv.coface)] > 0)
                f.restr[{cv.face, cv.coface}] = t.restriction(a, b);
        }
        r.terms.push_back(std::move(f));
    }
    for (std::size_t q = 0; q < k.diffs.size(); ++q) {
        std::vector<RationalMatrix> d;
        for (std::size_t c = 0; c < ambient.size(); ++c)
            d.push_back(local[c] >= 0 ? k.diffs[q][static_cast<std::size_t>(local[c])]
                                      : RationalMatrix(zeros(r.terms[q + 1].stalk[c], r.terms[q].stalk[c])));
        r.diffs.push_back(std::move(d));
    }
    return r;
}

Truncation truncate_leq_with_inclusion(const SheafComplex& k, int t)
{
    const std::size_t n = k.cells();
    auto identity_on = [&](int q) {
        std::vector<RationalMatrix> id;
        for (std::size_t c = 0; c < n; ++c) {
            const long s = k.terms[static_cast<std::size_t>(q - k.lo)].stalk[c];
            id.push_back(RationalMatrix::Identity(s, s));
        }
        return id;
    };
    Truncation out;
    if (t >= k.hi()) {
        out.complex = k;
        for (int q = k.lo; q <= k.hi(); ++q)
            out.inclusion.push_back(identity_on(q));
        return out;
    }
    SheafComplex& r = out.complex;
    r.lo = k.lo;
    if (t < k.lo) {
        r.terms.push_back(zero_sheaf(n));
        std::vector<RationalMatrix> z;
        for (std::size_t c = 0; c < n; ++c)
            z.push_back(zeros(k.terms.front().stalk[c], 0));
        out.inclusion.push_back(std::move(z));
        return out;
    }
    for (int q = k.lo; q < t; ++q) {
        r.terms.push_back(k.terms[static_cast<std::size_t>(q - k.lo)]);
        if (q + 1 < t)
            r.diffs.push_back(k.diffs[static_cast<std::size_t>(q - k.lo)]);
        out.inclusion.push_back(identity_on(q));
    }
    // degree t: kernels of d^t with induced restrictions
    const CellSheaf& ft = k.terms[static_cast<std::size_t>(t - k.lo)];
    std::vector<RationalMatrix> ker(n);
    for (std::size_t c = 0; c < n; ++c)
        ker[c] = kernel<Rational>(k.diffs[static_cast<std::size_t>(t - k.lo)][c]);
    CellSheaf f;
    for (std::size_t c = 0; c < n; ++c)
        f.stalk.push_back(static_cast<long>(ker[c].cols()));
    for (const auto& [key, m] : ft.restr) {
        const auto a = static_cast<std::size_t>(key.first), b = static_cast<std::size_t>(key.second);
        if (f.stalk[a] == 0 || f.stalk[b] == 0)
            continue;
        f.restr[key] = solve<Rational>(ker[b], RationalMatrix(m * ker[a]));
    }
    if (t > k.lo) {
        std::vector<RationalMatrix> d;
        for (std::size_t c = 0; c < n; ++c) {
            const RationalMatrix& prev = k.diffs[static_cast<std::size_t>(t - 1 - k.lo)][c];
            d.push_back(f.stalk[c] == 0 ? zeros(0, prev.cols()) : solve<Rational>(ker[c], prev));
        }
        r.diffs.push_back(std::move(d));
    }
    r.terms.push_back(std::move(f));
    out.inclusion.push_back(std::move(ker));
    return out;
}

SheafComplex truncate_leq(const SheafComplex& k, int t)
{
    return truncate_leq_with_inclusion(k, t).complex;
}

// ------------------------------------------------------ exact sequences

namespace {

SparseRationalMatrix select_block(const SparseRationalMatrix& m, const std::vector<int>& rows, const std::vector<int>& cols)
{
    std::vector<int> rpos(static_cast<std::size_t>(m.rows()), -1), cpos(static_cast<std::size_t>(m.cols()), -1);
    for (std::size_t i = 0; i < rows.size(); ++i)
        rpos[static_cast<std::size_t>(rows[i])] = static_cast<int>(i);
    for (std::size_t j = 0; j < cols.size(); ++j)
        cpos[static_cast<std::size_t>(cols[j])] = static_cast<int>(j);
    std::vector<Eigen::Triplet<Rational>> trip;
    for (int j = 0; j < m.outerSize(); ++j)
        for (SparseRationalMatrix::InnerIterator it(m, j); it; ++it)
            if (rpos[static_cast<std::size_t>(it.row())] >= 0 && cpos[static_cast<std::size_t>(j)] >= 0)
                trip.emplace_back(rpos[static_cast<std::size_t>(it.row())], cpos[static_cast<std::size_t>(j)], it.value());
    SparseRationalMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SparseRationalMatrix selector(long n, const std::vector<int>& idx, bool inject)
{
    std::vector<Eigen::Triplet<Rational>> trip;
    for (std::size_t i = 0; i < idx.size(); ++i)
        inject ? trip.emplace_back(idx[i], static_cast<int>(i), Rational(1))
               : trip.emplace_back(static_cast<int>(i), idx[i], Rational(1));
    SparseRationalMatrix m = inject ? SparseRationalMatrix(n, static_cast<Eigen::Index>(idx.size()))
                                    : SparseRationalMatrix(static_cast<Eigen::Index>(idx.size()), n);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
}

/// LES of a complex with a subcomplex spanned by coordinates (sub[n][i] true).
LongExactSequence split_sequence(const CochainComplex& c, const std::vector<std::vector<bool>>& sub)
{
    const int lo = c.lo, hi = c.hi();
    std::vector<std::vector<int>> si, qi;
    for (int n = lo; n <= hi; ++n) {
        si.emplace_back();
        qi.emplace_back();
        for (long i = 0; i < c.dim(n); ++i)
            (sub[static_cast<std::size_t>(n - lo)][static_cast<std::size_t>(i)] ? si : qi).back().push_back(static_cast<int>(i));
    }
    CochainComplex a, q;
    a.lo = q.lo = lo;
    for (int n = lo; n <= hi; ++n) {
        a.dims.push_back(static_cast<long>(si[static_cast<std::size_t>(n - lo)].size()));
        q.dims.push_back(static_cast<long>(qi[static_cast<std::size_t>(n - lo)].size()));
    }
    std::vector<SparseRationalMatrix> inc, proj, conn;
    for (int n = lo; n <= hi; ++n) {
        const auto& s0 = si[static_cast<std::size_t>(n - lo)];
        const auto& q0 = qi[static_cast<std::size_t>(n - lo)];
        inc.push_back(selector(c.dim(n), s0, true));
        proj.push_back(selector(c.dim(n), q0, false));
        if (n < hi) {
            const auto& s1 = si[static_cast<std::size_t>(n + 1 - lo)];
            const auto& q1 = qi[static_cast<std::size_t>(n + 1 - lo)];
            a.diffs.push_back(select_block(c.d(n), s1, s0));
            q.diffs.push_back(select_block(c.d(n), q1, q0));
            conn.push_back(select_block(c.d(n), s1, q0));
        } else {
            conn.push_back(SparseRationalMatrix(0, static_cast<Eigen::Index>(q0.size())));
        }
    }
    const CochainComplex a1 = shift(a, 1);
    // shift(a,1) starts at lo-1; the connecting map lands in degree n of a1 = degree n+1 of a
    std::vector<SparseRationalMatrix> conn_comps;
    for (int n = lo; n <= hi; ++n)
        conn_comps.push_back(n < hi ? conn[static_cast<std::size_t>(n - lo)]
                                    : SparseRationalMatrix(a1.dim(n), q.dim(n)));
    ChainMap fi{a, c, inc}, fp{c, q, proj}, fc{q, a1, conn_comps};
    if (!is_chain_map(fi) || !is_chain_map(fp) || !is_chain_map(fc))
        throw MathError("attaching sequence: the chosen subset does not span a subcomplex");
    LongExactSequence les;
    les.terms = {cohomology(a), cohomology(c), cohomology(q)};
    les.ranks.resize(3);
    for (int n = lo; n <= hi; ++n) {
        les.ranks[0][n] = induced_rank(fi, n);
        les.ranks[1][n] = induced_rank(fp, n);
        les.ranks[2][n] = induced_rank(fc, n);
    }
    auto rk = [&](int i, int n) {
        auto it = les.ranks[static_cast<std::size_t>(i)].find(n);
        return it == les.ranks[static_cast<std::size_t>(i)].end() ? 0L : it->second;
    };
    les.exact = true;
    for (int n = lo - 1; n <= hi + 1; ++n) {
        if (les.terms[1][n] != rk(0, n) + rk(1, n))
            les.exact = false;
        if (les.terms[2][n] != rk(1, n) + rk(2, n))
            les.exact = false;
        if (les.terms[0][n + 1] != rk(2, n) + rk(0, n + 1))
            les.exact = false;
    }
    return les;
}

}  // namespace

LongExactSequence compact_attaching_sequence(const SheafComplex& k, const CellSite& site, const CellSet& open)
{
    if (!site.compact)
        throw MathError("compact attaching sequence needs a site declared compact");
    if (!is_up_closed(site, open))
        throw MathError("attaching sequence: the given set is not open");
    int lo = 0;
    const CellSet all = all_cells(site);
    const auto coords = cellular_coords(k, site, all, lo);
    const CochainComplex c = cellular_complex(k, site, all);
    std::vector<bool> in(site.size(), false);
    for (int x : open)
        in[static_cast<std::size_t>(x)] = true;
    std::vector<std::vector<bool>> sub;
    for (const auto& v : coords) {
        sub.emplace_back();
        for (const auto& x : v)
            sub.back().push_back(in[static_cast<std::size_t>(x.cell)]);
    }
    return split_sequence(c, sub);
}

LongExactSequence local_attaching_sequence(const SheafComplex& k, const CellSite& site, const CellSet& open)
{
    if (!is_up_closed(site, open))
        throw MathError("attaching sequence: the given set is not open");
    const auto m = model_of(k, site);
    std::vector<bool> all(site.size(), true), in(site.size(), false);
    for (int x : open)
        in[static_cast<std::size_t>(x)] = true;
    std::vector<std::vector<int>> basis;
    const CochainComplex c = m->restricted(all, &basis);
    std::vector<std::vector<bool>> sub;
    for (const auto& b : basis) {
        sub.emplace_back();
        for (int i : b)
            sub.back().push_back(!in[static_cast<std::size_t>(m->label[static_cast<std::size_t>(i)])]);
    }
    return split_sequence(c, sub);
}

std::map<int, long> restriction_ranks(const SheafComplex& k, const CellSite& site, const CellSet& closed)
{
    std::map<int, long> out;
    if (closed.empty())
        return out;
    if (!is_down_closed(site, closed))
        throw MathError("restriction_ranks: the given set is not closed");
    CellSet z = closed;
    std::sort(z.begin(), z.end());
    const auto m = model_of(k, site);
    std::vector<std::vector<int>> ybasis;
    int ylo = 0;
    const CochainComplex gy = m->restricted(std::vector<bool>(site.size(), true), &ybasis, &ylo);
    if (gy.dims.empty())
        return out;

    const CellSite zsite = subsite(site, z);
    SheafComplex ez = restrict_to(explicit_complex(m, site), site, z);
    ez.model.reset();
    const Resolution r = resolve_with_maps(ez, zsite);
    std::vector<std::vector<int>> zbasis;
    int zlo = 0;
    const CochainComplex gz = r.model.restricted(std::vector<bool>(zsite.size(), true), &zbasis, &zlo);
    if (gz.dims.empty())
        return out;

    // position of model index i inside the value basis at cell σ (indices of the same
    // degree with label >= σ, increasing)
    auto value_pos = [&](int i, int sigma) {
        int p = 0;
        for (std::size_t j = 0; j < static_cast<std::size_t>(i); ++j)
            if (m->degree[j] == m->degree[static_cast<std::size_t>(i)] && site.leq(sigma, m->label[j]))
                ++p;
        return p;
    };
    ChainMap f{gy, gz, {}};
    for (int n = gy.lo; n <= gy.hi(); ++n) {
        RationalMatrix a = zeros(gz.dim(n), gy.dim(n));
        if (n >= gz.lo && n <= gz.hi()) {
            const auto& rows = zbasis[static_cast<std::size_t>(n - zlo)];
            const auto& cols = ybasis[static_cast<std::size_t>(n - ylo)];
            for (std::size_t j = 0; j < cols.size(); ++j)
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const int mu = r.model.label[static_cast<std::size_t>(rows[i])];
                    const int sigma = z[static_cast<std::size_t>(mu)];
                    if (!site.leq(sigma, m->label[static_cast<std::size_t>(cols[j])]))
                        continue;
                    const auto& eps = r.eps[static_cast<std::size_t>(mu)][static_cast<std::size_t>(n - r.lo)]
                                           [static_cast<std::size_t>(value_pos(cols[j], sigma))];
                    auto it = eps.find(rows[i]);
                    if (it != eps.end())
                        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second;
                }
        }
        f.comps.push_back(to_sparse(a));
    }
    if (!is_chain_map(f))
        throw MathError("restriction_ranks: comparison map is not a chain map");
    for (int n = gy.lo; n <= gy.hi(); ++n) {
        const long rk = induced_rank(f, n);
        if (rk)
            out[n] = rk;
    }
    return out;
}

}  // namespace perverscope
