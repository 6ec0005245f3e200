#include "perverscope/lefcomb.hpp"

#include <algorithm>
#include <limits>

namespace perverscope {

long GradedOperator::dim(int q) const
{
    if (q < 0 || q > 2 * d || static_cast<std::size_t>(q) >= dims.size())
        return 0;
    return dims[static_cast<std::size_t>(q)];
}

RationalMatrix GradedOperator::eta_at(int q) const
{
    auto it = eta.find(q);
    if (it != eta.end())
        return it->second;
    return RationalMatrix::Zero(dim(q + 2), dim(q));
}

void validate_operator(const GradedOperator& g)
{
    if (g.d < 0)
        throw MathError("graded operator: d must be non-negative");
    if (g.dims.size() != static_cast<std::size_t>(2 * g.d + 1))
        throw MathError("graded operator: expected " + std::to_string(2 * g.d + 1) + " dimensions, got " +
                        std::to_string(g.dims.size()));
    for (long x : g.dims)
        if (x < 0)
            throw MathError("graded operator: negative dimension");
    for (const auto& [q, m] : g.eta) {
        if (q < 0 || q + 2 > 2 * g.d)
            throw MathError("graded operator: η given out of range at degree " + std::to_string(q));
        if (m.rows() != g.dim(q + 2) || m.cols() != g.dim(q))
            throw MathError("graded operator: η at degree " + std::to_string(q) + " has the wrong shape");
    }
}

namespace {

/// η^r starting in degree q.
RationalMatrix eta_power(const GradedOperator& g, int q, int r)
{
    RationalMatrix m = RationalMatrix::Identity(g.dim(q), g.dim(q));
    for (int s = 0; s < r; ++s)
        m = g.eta_at(q + 2 * s) * m;
    return m;
}

}  // namespace

HLReport hl_check(const GradedOperator& g)
{
    validate_operator(g);
    HLReport rep;
    for (int r = 0; r <= g.d; ++r) {
        const int q = g.d - r;
        const long n = g.dim(q);
        const bool iso = n == g.dim(g.d + r) && rank<Rational>(eta_power(g, q, r)) == n;
        if (!iso) {
            rep.ok = false;
            rep.failing.push_back(q);
        }
    }
    std::sort(rep.failing.begin(), rep.failing.end());
    return rep;
}

std::vector<long> primitive_decomposition(const GradedOperator& g)
{
    const auto hl = hl_check(g);
    if (!hl.ok)
        throw MathError("primitive decomposition needs hard Lefschetz; fails in degree " +
                        std::to_string(hl.failing.front()));
    std::vector<long> prim;
    for (int q = 0; q <= g.d; ++q)
        prim.push_back(g.dim(q) - static_cast<long>(rank<Rational>(eta_power(g, q, g.d - q + 1))));
    return prim;
}

GradedOperator kunneth_product(const GradedOperator& a, const GradedOperator& b)
{
    validate_operator(a);
    validate_operator(b);
    GradedOperator out;
    out.d = a.d + b.d;
    out.dims.assign(static_cast<std::size_t>(2 * out.d + 1), 0);
    // offset[n][i] = position of the block H^i(a) ⊗ H^{n-i}(b) inside degree n
    std::vector<std::vector<long>> offset(out.dims.size(), std::vector<long>(static_cast<std::size_t>(2 * a.d + 1), 0));
    for (int n = 0; n <= 2 * out.d; ++n)
        for (int i = 0; i <= 2 * a.d; ++i) {
            offset[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)] = out.dims[static_cast<std::size_t>(n)];
            out.dims[static_cast<std::size_t>(n)] += a.dim(i) * b.dim(n - i);
        }
    for (int n = 0; n + 2 <= 2 * out.d; ++n) {
        RationalMatrix m = RationalMatrix::Zero(out.dims[static_cast<std::size_t>(n + 2)], out.dims[static_cast<std::size_t>(n)]);
        for (int i = 0; i <= 2 * a.d; ++i) {
            const int j = n - i;
            if (a.dim(i) == 0 || b.dim(j) == 0)
                continue;
            const long col = offset[static_cast<std::size_t>(n)][static_cast<std::size_t>(i)];
            const long nb = b.dim(j);
            // η ⊗ 1 into H^{i+2} ⊗ H^j
            if (a.dim(i + 2) > 0) {
                const RationalMatrix e = a.eta_at(i);
                const long row = offset[static_cast<std::size_t>(n + 2)][static_cast<std::size_t>(i + 2)];
                for (Eigen::Index r = 0; r < e.rows(); ++r)
                    for (Eigen::Index c = 0; c < e.cols(); ++c)
                        for (long k = 0; k < nb; ++k)
                            m(row + r * nb + k, col + c * nb + k) += e(r, c);
            }
            // 1 ⊗ η into H^i ⊗ H^{j+2}
            if (b.dim(j + 2) > 0) {
                const RationalMatrix e = b.eta_at(j);
                const long row = offset[static_cast<std::size_t>(n + 2)][static_cast<std::size_t>(i)];
                const long nb2 = b.dim(j + 2);
                for (long s = 0; s < a.dim(i); ++s)
                    for (Eigen::Index r = 0; r < e.rows(); ++r)
                        for (Eigen::Index c = 0; c < e.cols(); ++c)
                            m(row + s * nb2 + r, col + s * nb + c) += e(r, c);
            }
        }
        out.eta[n] = m;
    }
    return out;
}

GradedOperator diagonal_lefschetz_model(const std::vector<long>& dims)
{
    if (dims.empty() || dims.size() % 2 == 0)
        throw MathError("diagonal_lefschetz_model: need an odd number of dimensions (degrees 0..2d)");
    GradedOperator g;
    g.d = static_cast<int>(dims.size() / 2);
    g.dims = dims;
    for (int q = 0; q + 2 <= 2 * g.d; ++q) {
        RationalMatrix m = RationalMatrix::Zero(g.dim(q + 2), g.dim(q));
        for (long k = 0; k < std::min(g.dim(q), g.dim(q + 2)); ++k)
            m(k, k) = 1;
        g.eta[q] = m;
    }
    validate_operator(g);
    return g;
}

bool symmetric_unimodal(const std::vector<long>& dims)
{
    if (dims.empty() || dims.size() % 2 == 0)
        return false;
    const int d = static_cast<int>(dims.size() / 2);
    for (int r = 0; r <= d; ++r)
        if (dims[static_cast<std::size_t>(d - r)] != dims[static_cast<std::size_t>(d + r)])
            return false;
    for (int q = 0; q + 2 <= d; ++q)
        if (dims[static_cast<std::size_t>(q)] > dims[static_cast<std::size_t>(q + 2)])
            return false;
    return true;
}

namespace {

Integer binom(long n, long k)
{
    if (k < 0 || n < 0 || k > n)
        return 0;
    Integer r = 1;
    for (long i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

long to_long(const Integer& x, const char* what)
{
    if (x > Integer(std::numeric_limits<long>::max()) || x < Integer(std::numeric_limits<long>::min()))
        throw MathError(std::string(what) + ": entry overflows 64 bits");
    return x.convert_to<long>();
}

}  // namespace

HVector f_to_h(const FVector& f, int d)
{
    if (d < 0 || f.size() != static_cast<std::size_t>(d))
        throw MathError("f_to_h: f-vector must have d = " + std::to_string(d) + " entries, got " +
                        std::to_string(f.size()));
    HVector h;
    for (int i = 0; i <= d; ++i) {
        Integer s = 0;
        for (int j = 0; j <= i; ++j) {
            const Integer fj = j == 0 ? Integer(1) : Integer(f[static_cast<std::size_t>(j - 1)]);
            const Integer term = binom(d - j, d - i) * fj;
            s += (i - j) % 2 == 0 ? term : Integer(-term);
        }
        h.push_back(to_long(s, "f_to_h"));
    }
    return h;
}

FVector h_to_f(const HVector& h, int d)
{
    if (d < 0 || h.size() != static_cast<std::size_t>(d + 1))
        throw MathError("h_to_f: h-vector must have d + 1 = " + std::to_string(d + 1) + " entries, got " +
                        std::to_string(h.size()));
    if (h[0] != 1)
        throw MathError("h_to_f: h_0 must be 1");
    FVector f;
    for (int j = 1; j <= d; ++j) {
        Integer s = 0;
        for (int i = 0; i <= j; ++i)
            s += binom(d - i, j - i) * h[static_cast<std::size_t>(i)];
        f.push_back(to_long(s, "h_to_f"));
    }
    return f;
}

long macaulay_bound(long n, int i)
{
    if (i < 1)
        throw MathError("macaulay_bound: i must be positive");
    if (n <= 0)
        return 0;
    // greedy i-binomial representation n = C(a_i, i) + C(a_{i-1}, i-1) + ...
    Integer rest = n, bound = 0;
    for (int k = i; k >= 1 && rest > 0; --k) {
        long a = k;
        while (binom(a + 1, k) <= rest)
            ++a;
        rest -= binom(a, k);
        bound += binom(a + 1, k + 1);
    }
    return to_long(bound, "macaulay_bound");
}

McMullenReport mcmullen_check(const HVector& h)
{
    McMullenReport r;
    if (h.empty())
        throw MathError("mcmullen_check: empty h-vector");
    const std::size_t d = h.size() - 1;
    r.symmetric = true;
    for (std::size_t i = 0; i <= d; ++i)
        r.symmetric = r.symmetric && h[i] == h[d - i];
    r.unimodal = true;
    for (std::size_t i = 1; i <= d / 2; ++i)
        r.unimodal = r.unimodal && h[i - 1] <= h[i];
    r.g.push_back(h[0]);
    for (std::size_t i = 1; i <= d / 2; ++i)
        r.g.push_back(h[i] - h[i - 1]);
    r.m_sequence = r.g[0] == 1;
    for (long x : r.g)
        r.m_sequence = r.m_sequence && x >= 0;
    for (std::size_t i = 1; r.m_sequence && i + 1 < r.g.size(); ++i)
        r.m_sequence = r.g[i + 1] <= macaulay_bound(r.g[i], static_cast<int>(i));
    return r;
}

GradedDims toric_betti(const HVector& h)
{
    GradedDims b;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (h[i] < 0)
            throw MathError("toric_betti: negative h-entry");
        b.set(static_cast<int>(2 * i), h[i]);
    }
    return b;
}

std::vector<Polytope> shipped_polytopes()
{
    return {{"simplex", 3, {4, 6, 4}}, {"octahedron", 3, {6, 12, 8}}, {"icosahedron", 3, {12, 30, 20}}};
}

}  // namespace perverscope
