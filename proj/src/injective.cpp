#include "perverscope/injective.hpp"

#include <algorithm>
#include <set>

namespace perverscope {

namespace {

using SparseVec = std::map<int, Rational>;

CochainComplex assemble(const std::vector<std::map<int, Rational>>& col, const std::vector<int>& degree,
                        const std::vector<int>& members, std::vector<std::vector<int>>* basis, int* lo_out)
{
    if (members.empty()) {
        if (basis)
            basis->clear();
        if (lo_out)
            *lo_out = 0;
        return zero_complex();
    }
    int lo = degree[static_cast<std::size_t>(members.front())], hi = lo;
    for (int i : members) {
        lo = std::min(lo, degree[static_cast<std::size_t>(i)]);
        hi = std::max(hi, degree[static_cast<std::size_t>(i)]);
    }
    std::vector<std::vector<int>> by_degree(static_cast<std::size_t>(hi - lo + 1));
    std::map<int, int> pos;
    for (int i : members) {
        auto& b = by_degree[static_cast<std::size_t>(degree[static_cast<std::size_t>(i)] - lo)];
        pos[i] = static_cast<int>(b.size());
        b.push_back(i);
    }
    CochainComplex c;
    c.lo = lo;
    for (const auto& b : by_degree)
        c.dims.push_back(static_cast<long>(b.size()));
    for (int n = lo; n < hi; ++n) {
        const auto& src = by_degree[static_cast<std::size_t>(n - lo)];
        std::vector<Eigen::Triplet<Rational>> trip;
        for (std::size_t j = 0; j < src.size(); ++j)
            for (const auto& [i, v] : col[static_cast<std::size_t>(src[j])]) {
                auto it = pos.find(i);
                if (it != pos.end())
                    trip.emplace_back(it->second, static_cast<int>(j), v);
            }
        SparseRationalMatrix m(static_cast<Eigen::Index>(by_degree[static_cast<std::size_t>(n - lo + 1)].size()),
                               static_cast<Eigen::Index>(src.size()));
        m.setFromTriplets(trip.begin(), trip.end());
        c.diffs.push_back(m);
    }
    if (basis)
        *basis = by_degree;
    if (lo_out)
        *lo_out = lo;
    return c;
}

/// Incrementally built injective model over an up-closed set of processed cells.
class Builder {
public:
    explicit Builder(const CellSite& site) : site_(site), processed_(site.size(), false) {}

    void add_with_values(int s, const SheafComplex& k)
    {
        const std::vector<bool> mask = star_minus(s);
        const std::vector<int> a = members(mask);
        std::map<int, int> y;
        for (int i : a)
            y[i] = add(s, degree_[static_cast<std::size_t>(i)] + 1);
        for (int i : a) {
            set(y[i], i, Rational(1));
            SparseVec c = col_[static_cast<std::size_t>(i)];
            for (const auto& [r, v] : c)
                if (mask[static_cast<std::size_t>(label_[static_cast<std::size_t>(r)])] &&
                    alive_[static_cast<std::size_t>(r)])
                    set(y[r], y[i], -v);
        }
        const int nq = static_cast<int>(k.terms.size());
        std::vector<std::vector<int>> kidx(static_cast<std::size_t>(nq));
        for (int q = 0; q < nq; ++q)
            for (long i = 0; i < k.terms[static_cast<std::size_t>(q)].stalk[static_cast<std::size_t>(s)]; ++i)
                kidx[static_cast<std::size_t>(q)].push_back(add(s, k.lo + q));
        auto& eps = eps_[s];
        eps.assign(static_cast<std::size_t>(nq), {});
        for (int q = 0; q < nq; ++q) {
            const auto& kq = kidx[static_cast<std::size_t>(q)];
            eps[static_cast<std::size_t>(q)].resize(kq.size());
            for (std::size_t i = 0; i < kq.size(); ++i) {
                if (q + 1 < nq) {
                    const RationalMatrix& d = k.diffs[static_cast<std::size_t>(q)][static_cast<std::size_t>(s)];
                    for (Eigen::Index r = 0; r < d.rows(); ++r)
                        if (!is_zero(d(r, static_cast<Eigen::Index>(i))))
                            set(kidx[static_cast<std::size_t>(q + 1)][static_cast<std::size_t>(r)], kq[i],
                                d(r, static_cast<Eigen::Index>(i)));
                }
                SparseVec rho = glue(s, k, q, static_cast<Eigen::Index>(i));
                for (const auto& [idx, v] : rho)
                    set(y.at(idx), kq[i], -v);
                rho[kq[i]] = Rational(1);
                eps[static_cast<std::size_t>(q)][i] = std::move(rho);
            }
        }
        lo_ = k.lo;
        processed_[static_cast<std::size_t>(s)] = true;
        minimize(s, true);
    }

    void add_truncated(int s, int t)
    {
        const std::vector<bool> mask = star_minus(s);
        std::vector<std::vector<int>> basis;
        int alo = 0;
        const CochainComplex a = assemble(col_, degree_, members(mask), &basis, &alo);
        processed_[static_cast<std::size_t>(s)] = true;
        if (a.dims.empty())
            return;
        const UpperTruncation up = truncate_gt(a, t);
        const CochainComplex& q = up.complex;
        if (q.dims.empty())
            return;
        const bool quotient_used = t + 1 >= a.lo;
        std::vector<std::vector<int>> qidx(q.dims.size());
        for (int m = q.lo; m <= q.hi(); ++m)
            for (long j = 0; j < q.dim(m); ++j)
                qidx[static_cast<std::size_t>(m - q.lo)].push_back(add(s, m + 1));
        for (int m = q.lo; m <= q.hi(); ++m) {
            if (m < a.lo || m > a.hi())
                continue;
            const auto& src = basis[static_cast<std::size_t>(m - a.lo)];
            const auto& dst = qidx[static_cast<std::size_t>(m - q.lo)];
            for (std::size_t p = 0; p < src.size(); ++p) {
                if (m == q.lo && quotient_used) {
                    for (Eigen::Index r = 0; r < up.quotient.rows(); ++r)
                        if (!is_zero(up.quotient(r, static_cast<Eigen::Index>(p))))
                            set(dst[static_cast<std::size_t>(r)], src[p], up.quotient(r, static_cast<Eigen::Index>(p)));
                } else {
                    set(dst[p], src[p], Rational(1));
                }
            }
            if (m < q.hi()) {
                const SparseRationalMatrix d = q.d(m);
                for (int j = 0; j < d.outerSize(); ++j)
                    for (SparseRationalMatrix::InnerIterator it(d, j); it; ++it)
                        set(qidx[static_cast<std::size_t>(m + 1 - q.lo)][static_cast<std::size_t>(it.row())],
                            dst[static_cast<std::size_t>(j)], -it.value());
            }
        }
        minimize(s, false);
    }

    bool processed(int c) const { return processed_[static_cast<std::size_t>(c)]; }

    Resolution finish() const
    {
        Resolution r;
        std::vector<int> renum(label_.size(), -1);
        for (std::size_t i = 0; i < label_.size(); ++i)
            if (alive_[i]) {
                renum[i] = static_cast<int>(r.model.label.size());
                r.model.label.push_back(label_[i]);
                r.model.degree.push_back(degree_[i]);
            }
        r.model.col.resize(r.model.label.size());
        for (std::size_t j = 0; j < label_.size(); ++j)
            if (alive_[j])
                for (const auto& [i, v] : col_[j])
                    r.model.col[static_cast<std::size_t>(renum[j])][renum[static_cast<std::size_t>(i)]] = v;
        r.lo = lo_;
        r.eps.resize(site_.size());
        for (const auto& [cell, per_q] : eps_) {
            auto& out = r.eps[static_cast<std::size_t>(cell)];
            for (const auto& vecs : per_q) {
                out.emplace_back();
                for (const auto& v : vecs) {
                    SparseVec w;
                    for (const auto& [i, x] : v)
                        w[renum[static_cast<std::size_t>(i)]] = x;
                    out.back().push_back(std::move(w));
                }
            }
        }
        return r;
    }

private:
    int add(int lab, int deg)
    {
        label_.push_back(lab);
        degree_.push_back(deg);
        alive_.push_back(true);
        col_.emplace_back();
        row_.emplace_back();
        return static_cast<int>(label_.size()) - 1;
    }

    void set(int i, int j, const Rational& v)
    {
        auto& c = col_[static_cast<std::size_t>(j)];
        if (is_zero(v)) {
            c.erase(i);
            row_[static_cast<std::size_t>(i)].erase(j);
        } else {
            c[i] = v;
            row_[static_cast<std::size_t>(i)].insert(j);
        }
    }

    Rational get(int i, int j) const
    {
        const auto& c = col_[static_cast<std::size_t>(j)];
        auto it = c.find(i);
        return it == c.end() ? Rational(0) : it->second;
    }

    std::vector<bool> star_minus(int s) const
    {
        std::vector<bool> mask(site_.size(), false);
        for (int c = 0; c < static_cast<int>(site_.size()); ++c)
            if (c != s && site_.leq(s, c)) {
                if (!processed_[static_cast<std::size_t>(c)])
                    throw MathError("injective model: cells must be added in an up-closed order");
                mask[static_cast<std::size_t>(c)] = true;
            }
        return mask;
    }

    std::vector<int> members(const std::vector<bool>& mask) const
    {
        std::vector<int> out;
        for (std::size_t i = 0; i < label_.size(); ++i)
            if (alive_[i] && mask[static_cast<std::size_t>(label_[i])])
                out.push_back(static_cast<int>(i));
        return out;
    }

    // ρ(k) for the basis vector i of K^q(s): glued from ε_τ(r_{sτ} e_i) over covers τ.
    SparseVec glue(int s, const SheafComplex& k, int q, Eigen::Index i) const
    {
        SparseVec out;
        const CellSheaf& f = k.terms[static_cast<std::size_t>(q)];
        for (const auto& [t, sign] : site_.cofaces(s)) {
            (void)sign;
            if (f.stalk[static_cast<std::size_t>(t)] == 0)
                continue;
            const RationalMatrix r = f.restriction(s, t);
            auto it = eps_.find(t);
            if (it == eps_.end())
                throw MathError("injective model: missing comparison map on a coface");
            const auto& et = it->second[static_cast<std::size_t>(q)];
            SparseVec v;
            for (Eigen::Index j = 0; j < r.rows(); ++j) {
                const Rational& c = r(j, i);
                if (is_zero(c))
                    continue;
                for (const auto& [idx, x] : et[static_cast<std::size_t>(j)])
                    v[idx] += c * x;
            }
            for (const auto& [idx, x] : v)
                if (!is_zero(x))
                    out[idx] = x;
        }
        return out;
    }

    void minimize(int s, bool track)
    {
        std::vector<int> block;
        for (std::size_t i = 0; i < label_.size(); ++i)
            if (alive_[i] && label_[i] == s)
                block.push_back(static_cast<int>(i));
        while (true) {
            int bx = -1, by = -1;
            long best = -1;
            for (int x : block) {
                if (!alive_[static_cast<std::size_t>(x)])
                    continue;
                for (const auto& [y, v] : col_[static_cast<std::size_t>(x)]) {
                    if (label_[static_cast<std::size_t>(y)] != s)
                        continue;
                    const bool unit = v == 1 || v == -1;
                    const long fill = static_cast<long>(col_[static_cast<std::size_t>(x)].size() - 1) *
                                      static_cast<long>(row_[static_cast<std::size_t>(y)].size() - 1);
                    const long score = (unit ? 0 : 1000000000L) + fill;
                    if (best < 0 || score < best) {
                        best = score;
                        bx = x;
                        by = y;
                    }
                }
            }
            if (bx < 0)
                break;
            eliminate(bx, by, s, track);
        }
    }

    void eliminate(int x, int y, int s, bool track)
    {
        const Rational inv = Rational(1) / get(y, x);
        SparseVec colx = col_[static_cast<std::size_t>(x)];
        colx.erase(y);
        std::vector<std::pair<int, Rational>> rowy;
        for (int b : row_[static_cast<std::size_t>(y)])
            if (b != x)
                rowy.emplace_back(b, get(y, b));
        for (const auto& [a, va] : colx)
            for (const auto& [b, vb] : rowy)
                set(a, b, get(a, b) - va * inv * vb);
        if (track) {
            for (auto& per_q : eps_[s])
                for (auto& v : per_q) {
                    v.erase(x);
                    auto it = v.find(y);
                    if (it == v.end())
                        continue;
                    const Rational c = it->second * inv;
                    v.erase(it);
                    for (const auto& [a, va] : colx) {
                        Rational& slot = v[a];
                        slot -= va * c;
                        if (is_zero(slot))
                            v.erase(a);
                    }
                }
        }
        for (int z : {x, y}) {
            for (const auto& [i, v] : col_[static_cast<std::size_t>(z)])
                row_[static_cast<std::size_t>(i)].erase(z);
            col_[static_cast<std::size_t>(z)].clear();
            for (int b : row_[static_cast<std::size_t>(z)])
                col_[static_cast<std::size_t>(b)].erase(z);
            row_[static_cast<std::size_t>(z)].clear();
            alive_[static_cast<std::size_t>(z)] = false;
        }
    }

    const CellSite& site_;
    std::vector<int> label_, degree_;
    std::vector<bool> alive_;
    std::vector<SparseVec> col_;
    std::vector<std::set<int>> row_;
    std::vector<bool> processed_;
    std::map<int, std::vector<std::vector<SparseVec>>> eps_;
    int lo_ = 0;
};

void check_on_site(const SheafComplex& k, const CellSite& site)
{
    if (k.cells() != site.size())
        throw MathError("sheaf complex does not live on this site");
}

}  // namespace

CochainComplex InjModel::restricted(const std::vector<bool>& mask, std::vector<std::vector<int>>* basis,
                                    int* lo) const
{
    std::vector<int> members;
    for (std::size_t i = 0; i < label.size(); ++i)
        if (mask[static_cast<std::size_t>(label[i])])
            members.push_back(static_cast<int>(i));
    return assemble(col, degree, members, basis, lo);
}

Resolution resolve_with_maps(const SheafComplex& k, const CellSite& site)
{
    check_on_site(k, site);
    Builder b(site);
    for (int s : site.top_down_order())
        b.add_with_values(s, k);
    return b.finish();
}

std::shared_ptr<const InjModel> model_of(const SheafComplex& k, const CellSite& site)
{
    if (k.model)
        return k.model;
    return std::make_shared<const InjModel>(resolve_with_maps(k, site).model);
}

SheafComplex explicit_complex(std::shared_ptr<const InjModel> model, const CellSite& site)
{
    const InjModel& m = *model;
    const std::size_t n = site.size();
    SheafComplex k;
    k.model = model;
    if (m.size() == 0) {
        k.terms.push_back(CellSheaf{std::vector<long>(n, 0), {}});
        k.diffs.clear();
        return k;
    }
    const int lo = *std::min_element(m.degree.begin(), m.degree.end());
    const int hi = *std::max_element(m.degree.begin(), m.degree.end());
    k.lo = lo;
    // basis[q][cell]: model indices of degree q with label >= cell
    std::vector<std::vector<std::vector<int>>> basis(static_cast<std::size_t>(hi - lo + 1),
                                                     std::vector<std::vector<int>>(n));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t c = 0; c < n; ++c)
            if (site.leq(static_cast<int>(c), m.label[i]))
                basis[static_cast<std::size_t>(m.degree[i] - lo)][c].push_back(static_cast<int>(i));
    for (int q = lo; q <= hi; ++q) {
        const auto& bq = basis[static_cast<std::size_t>(q - lo)];
        CellSheaf f;
        for (std::size_t c = 0; c < n; ++c)
            f.stalk.push_back(static_cast<long>(bq[c].size()));
        for (const auto& cv : site.covers()) {
            const auto& from = bq[static_cast<std::size_t>(cv.face)];
            const auto& to = bq[static_cast<std::size_t>(cv.coface)];
            RationalMatrix r = zeros(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
            for (std::size_t a = 0, b = 0; a < to.size(); ++a) {
                while (from[b] != to[a])
                    ++b;
                r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 1;
            }
            f.restr[{cv.face, cv.coface}] = r;
        }
        k.terms.push_back(std::move(f));
    }
    for (int q = lo; q < hi; ++q) {
        std::vector<RationalMatrix> per_cell;
        for (std::size_t c = 0; c < n; ++c) {
            const auto& from = basis[static_cast<std::size_t>(q - lo)][c];
            const auto& to = basis[static_cast<std::size_t>(q + 1 - lo)][c];
            std::map<int, int> pos;
            for (std::size_t a = 0; a < to.size(); ++a)
                pos[to[a]] = static_cast<int>(a);
            RationalMatrix d = zeros(static_cast<Eigen::Index>(to.size()), static_cast<Eigen::Index>(from.size()));
            for (std::size_t j = 0; j < from.size(); ++j)
                for (const auto& [i, v] : m.col[static_cast<std::size_t>(from[j])]) {
                    auto it = pos.find(i);
                    if (it != pos.end())
                        d(it->second, static_cast<Eigen::Index>(j)) = v;
                }
            per_cell.push_back(std::move(d));
        }
        k.diffs.push_back(std::move(per_cell));
    }
    return k;
}

InjModel relabel(const InjModel& m, const std::vector<int>& image)
{
    InjModel r = m;
    for (auto& l : r.label)
        l = image.at(static_cast<std::size_t>(l));
    return r;
}

InjModel restrict_open(const InjModel& m, const CellSite& site, const CellSet& open)
{
    if (!is_up_closed(site, open))
        throw MathError("restriction of an injective model needs an open subset");
    std::vector<int> local(site.size(), -1);
    for (std::size_t i = 0; i < open.size(); ++i)
        local[static_cast<std::size_t>(open[i])] = static_cast<int>(i);
    std::vector<int> renum(m.size(), -1);
    InjModel r;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (local[static_cast<std::size_t>(m.label[i])] >= 0) {
            renum[i] = static_cast<int>(r.label.size());
            r.label.push_back(local[static_cast<std::size_t>(m.label[i])]);
            r.degree.push_back(m.degree[i]);
        }
    r.col.resize(r.label.size());
    for (std::size_t j = 0; j < m.size(); ++j)
        if (renum[j] >= 0)
            for (const auto& [i, v] : m.col[j])
                if (renum[static_cast<std::size_t>(i)] >= 0)
                    r.col[static_cast<std::size_t>(renum[j])][renum[static_cast<std::size_t>(i)]] = v;
    return r;
}

InjModel shift_model(const InjModel& m, int a)
{
    InjModel r = m;
    for (auto& d : r.degree)
        d -= a;
    if (a % 2 != 0)
        for (auto& c : r.col)
            for (auto& [i, v] : c)
                v = -v;
    return r;
}

CochainComplex global_sections(const InjModel& m)
{
    std::vector<int> members(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        members[i] = static_cast<int>(i);
    return assemble(m.col, m.degree, members, nullptr, nullptr);
}

GradedDims local_block_cohomology(const InjModel& m, int cell)
{
    std::vector<int> members;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.label[i] == cell)
            members.push_back(static_cast<int>(i));
    return cohomology(assemble(m.col, m.degree, members, nullptr, nullptr));
}

InjModel deligne_model(const SheafComplex& k, const CellSite& site, const CellSet& open,
                       const std::vector<DeligneStep>& steps)
{
    check_on_site(k, site);
    if (!is_up_closed(site, open))
        throw MathError("Deligne construction: the open stratum is not open");
    Builder b(site);
    std::vector<bool> in(site.size(), false);
    for (int c : open)
        in[static_cast<std::size_t>(c)] = true;
    for (int s : site.top_down_order())
        if (in[static_cast<std::size_t>(s)])
            b.add_with_values(s, k);
    for (const auto& st : steps) {
        if (in[static_cast<std::size_t>(st.cell)])
            throw MathError("Deligne construction: cell listed twice");
        b.add_truncated(st.cell, st.truncation);
        in[static_cast<std::size_t>(st.cell)] = true;
    }
    return b.finish().model;
}

}  // namespace perverscope
