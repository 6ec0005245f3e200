#include "perverscope/localsys.hpp"
#include "perverscope/models.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>

namespace perverscope {

void validate_rep(const MonodromyRep& rep)
{
    if (rep.rank < 0)
        throw MathError("monodromy: negative rank");
    for (std::size_t i = 0; i < rep.generators.size(); ++i) {
        const auto& g = rep.generators[i];
        if (g.rows() != rep.rank || g.cols() != rep.rank)
            throw MathError("monodromy: generator " + std::to_string(i) + " is not " + std::to_string(rep.rank) +
                            "x" + std::to_string(rep.rank));
        if (rank<Rational>(g) != rep.rank)
            throw MathError("monodromy: generator " + std::to_string(i) + " is not invertible");
    }
}

MonodromyRep trivial_rep(long rank, int generators)
{
    MonodromyRep r;
    r.rank = rank;
    r.generators.assign(static_cast<std::size_t>(generators), identity(rank));
    return r;
}

CircleCohomology circle_cohomology(const RationalMatrix& t)
{
    if (t.rows() != t.cols())
        throw MathError("circle_cohomology: monodromy must be square");
    if (rank<Rational>(t) != t.rows())
        throw MathError("circle_cohomology: monodromy must be invertible");
    const long n = t.rows();
    const long r = rank<Rational>(RationalMatrix(t - identity(n)));
    return {n - r, n - r};
}

CellSheaf circle_local_system(const RationalMatrix& t, int cells)
{
    const CellSite c = circle_site(cells);
    return twisted_sheaf(c, all_cells(c), c.index("v0"), c.index("e" + std::to_string(cells - 1)), t);
}

RationalMatrix invariants(const MonodromyRep& rep)
{
    validate_rep(rep);
    RationalMatrix stacked = zeros(0, rep.rank);
    for (const auto& g : rep.generators)
        stacked = vstack<Rational>(stacked, RationalMatrix(g - identity(rep.rank)));
    return kernel<Rational>(stacked);
}

GradedDims wang(const GradedDims& fiber_betti, const std::map<int, RationalMatrix>& t)
{
    for (const auto& [q, m] : t)
        if (m.rows() != fiber_betti[q] || m.cols() != fiber_betti[q])
            throw MathError("wang: monodromy on H^" + std::to_string(q) + " must be " +
                            std::to_string(fiber_betti[q]) + "x" + std::to_string(fiber_betti[q]));
    GradedDims out;
    if (fiber_betti.empty())
        return out;
    auto fixed = [&](int q) {
        const long b = fiber_betti[q];
        auto it = t.find(q);
        if (b == 0 || it == t.end())
            return b;
        return b - static_cast<long>(rank<Rational>(RationalMatrix(it->second - identity(b))));
    };
    for (int q = fiber_betti.lo(); q <= fiber_betti.hi() + 1; ++q)
        out.add(q, fixed(q) + fixed(q - 1));  // coker and ker of T - 1 have equal dimension
    return out;
}

MonodromyRep cyclic_pushforward(int n, const MonodromyRep& rep)
{
    if (n < 1)
        throw MathError("cyclic_pushforward: n must be at least 1");
    if (rep.generators.size() != 1)
        throw MathError("cyclic_pushforward: a circle local system has exactly one generator");
    validate_rep(rep);
    const long r = rep.rank;
    MonodromyRep out;
    out.rank = r * n;
    RationalMatrix m = zeros(out.rank, out.rank);
    for (int i = 0; i + 1 < n; ++i)
        m.block((i + 1) * r, i * r, r, r) = identity(r);
    m.block(0, (n - 1) * r, r, r) = rep.generators[0];
    out.generators.push_back(m);
    return out;
}

MonodromyRep tensor_rank_one(const MonodromyRep& a, const MonodromyRep& b)
{
    if (a.rank != 1 || b.rank != 1 || a.generators.size() != b.generators.size())
        throw MathError("tensor_rank_one: rank-one representations of the same group expected");
    MonodromyRep out = a;
    for (std::size_t i = 0; i < a.generators.size(); ++i)
        out.generators[i] = a.generators[i] * b.generators[i];
    return out;
}

// ------------------------------------------------------------ groups

namespace {

using Key = std::vector<Rational>;

Key key_of(const RationalMatrix& m) { return Key(m.data(), m.data() + m.size()); }

struct Group {
    std::vector<RationalMatrix> elems;
    std::map<Key, int> index;

    int find(const RationalMatrix& m) const { return index.at(key_of(m)); }
};

Group build_group(const MonodromyRep& rep, std::size_t cap)
{
    validate_rep(rep);
    Group g;
    std::deque<int> todo;
    auto add = [&](const RationalMatrix& m) {
        if (g.index.emplace(key_of(m), static_cast<int>(g.elems.size())).second) {
            g.elems.push_back(m);
            todo.push_back(static_cast<int>(g.elems.size()) - 1);
            if (g.elems.size() > cap)
                throw MathError("monodromy image is not verifiably finite: more than " + std::to_string(cap) +
                                " elements (cap)");
        }
    };
    add(identity(rep.rank));
    while (!todo.empty()) {
        const int i = todo.front();
        todo.pop_front();
        for (const auto& s : rep.generators)
            add(RationalMatrix(s * g.elems[static_cast<std::size_t>(i)]));
    }
    return g;
}

/// Unions of conjugacy classes of g^k, k prime to the order of g.
std::vector<std::vector<int>> rational_classes(const Group& g, const MonodromyRep& rep)
{
    std::vector<RationalMatrix> inv;
    for (const auto& s : rep.generators)
        inv.push_back(inverse<Rational>(s));
    std::vector<int> cls(g.elems.size(), -1);
    std::vector<std::vector<int>> out;
    for (std::size_t e = 0; e < g.elems.size(); ++e) {
        if (cls[e] >= 0)
            continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        // powers of e prime to its order
        std::vector<int> powers;
        RationalMatrix p = g.elems[e];
        const RationalMatrix one = identity(rep.rank);
        int order = 1;
        while (p != one) {
            p = p * g.elems[e];
            ++order;
        }
        p = g.elems[e];
        for (int k = 1; k <= order; ++k) {
            if (std::gcd(k, order) == 1)
                powers.push_back(g.find(p));
            p = p * g.elems[e];
        }
        std::deque<int> todo;
        for (int x : powers)
            if (cls[static_cast<std::size_t>(x)] < 0) {
                cls[static_cast<std::size_t>(x)] = id;
                todo.push_back(x);
            }
        while (!todo.empty()) {
            const int x = todo.front();
            todo.pop_front();
            out.back().push_back(x);
            for (std::size_t s = 0; s < inv.size(); ++s) {
                const int y = g.find(RationalMatrix(rep.generators[s] * g.elems[static_cast<std::size_t>(x)] * inv[s]));
                if (cls[static_cast<std::size_t>(y)] < 0) {
                    cls[static_cast<std::size_t>(y)] = id;
                    todo.push_back(y);
                }
            }
        }
    }
    return out;
}

RationalMatrix restrict_to_basis(const RationalMatrix& basis, const RationalMatrix& m)
{
    return solve<Rational>(basis, RationalMatrix(m * basis));
}

std::vector<RationalMatrix> commutant_of(const std::vector<RationalMatrix>& gens, long n)
{
    // vec(XG - GX) = (G^T ⊗ I - I ⊗ G) vec(X), column-major vec
    RationalMatrix sys = zeros(0, n * n);
    for (const auto& g : gens) {
        RationalMatrix block = zeros(n * n, n * n);
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j) {
                // (G^T ⊗ I): block (j, i) = G(i, j) I ;  (I ⊗ G): block (i, i) = G
                if (!is_zero(g(i, j)))
                    for (long k = 0; k < n; ++k)
                        block(j * n + k, i * n + k) += g(i, j);
                for (long k = 0; k < n; ++k)
                    block(j * n + i, j * n + k) -= g(i, k);
            }
        sys = vstack<Rational>(sys, block);
    }
    const RationalMatrix ker = kernel<Rational>(sys);
    std::vector<RationalMatrix> out;
    for (Eigen::Index c = 0; c < ker.cols(); ++c) {
        RationalMatrix x(n, n);
        for (long j = 0; j < n; ++j)
            for (long i = 0; i < n; ++i)
                x(i, j) = ker(j * n + i, c);
        out.push_back(x);
    }
    return out;
}

RationalMatrix spin(const std::vector<RationalMatrix>& gens, const RationalVector& v)
{
    RationalMatrix span = v;
    span = column_space<Rational>(span);
    for (Eigen::Index done = 0; done < span.cols(); ++done) {
        for (const auto& g : gens) {
            RationalMatrix w = g * span.col(done);
            RationalMatrix next = hstack<Rational>(span, w);
            if (rank<Rational>(next) > span.cols())
                span = next;
        }
    }
    return span;
}

/// Characteristic polynomial coefficients c_0..c_n (monic), Faddeev–LeVerrier.
std::vector<Rational> char_poly(const RationalMatrix& a)
{
    const long n = a.rows();
    std::vector<Rational> c(static_cast<std::size_t>(n + 1), Rational(0));
    c[static_cast<std::size_t>(n)] = 1;
    RationalMatrix m = zeros(n, n);
    for (long k = 1; k <= n; ++k) {
        m = a * m + c[static_cast<std::size_t>(n - k + 1)] * identity(n);
        c[static_cast<std::size_t>(n - k)] = -RationalMatrix(a * m).trace() / Rational(k);
    }
    return c;
}

std::vector<long> divisors(long x)
{
    std::vector<long> d;
    x = std::abs(x);
    for (long i = 1; i * i <= x; ++i)
        if (x % i == 0) {
            d.push_back(i);
            if (i * i != x)
                d.push_back(x / i);
        }
    return d;
}

/// Rational roots of a polynomial whose cleared coefficients fit in a small range.
std::vector<Rational> rational_roots(std::vector<Rational> c)
{
    std::vector<Rational> roots;
    while (c.size() > 1 && is_zero(c.front())) {
        roots.push_back(0);
        c.erase(c.begin());
    }
    if (c.size() <= 1)
        return roots;
    Integer l = 1;
    for (const auto& x : c)
        l = boost::multiprecision::lcm(l, Integer(boost::multiprecision::denominator(x)));
    const Integer a0 = Integer(boost::multiprecision::numerator(c.front() * Rational(l)));
    const Integer an = Integer(boost::multiprecision::numerator(c.back() * Rational(l)));
    const Integer limit = 1000000;
    if (abs(a0) > limit || abs(an) > limit)
        return roots;
    auto value = [&](const Rational& x) {
        Rational v = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it)
            v = v * x + *it;
        return v;
    };
    for (long p : divisors(a0.convert_to<long>()))
        for (long q : divisors(an.convert_to<long>()))
            for (int s : {1, -1}) {
                const Rational x = Rational(s * p) / Rational(q);
                if (is_zero(value(x)) && std::find(roots.begin(), roots.end(), x) == roots.end())
                    roots.push_back(x);
            }
    return roots;
}

/// Proper nonzero submodule of the module given by `gens` (acting on Q^n), or an empty
/// matrix when the search finds none.
RationalMatrix proper_submodule(const std::vector<RationalMatrix>& gens, long n)
{
    for (long j = 0; j < n; ++j) {
        RationalVector e = RationalVector::Constant(n, Rational(0));
        e(j) = 1;
        const RationalMatrix s = spin(gens, e);
        if (s.cols() < n)
            return s;
    }
    const auto endo = commutant_of(gens, n);
    std::vector<RationalMatrix> candidates = endo;
    for (std::size_t a = 0; a < endo.size(); ++a)
        for (std::size_t b = a + 1; b < endo.size(); ++b) {
            candidates.push_back(endo[a] + endo[b]);
            candidates.push_back(endo[a] - endo[b]);
        }
    for (const auto& x : candidates) {
        for (const Rational& lambda : rational_roots(char_poly(x))) {
            const RationalMatrix k = kernel<Rational>(RationalMatrix(x - lambda * identity(n)));
            if (k.cols() > 0 && k.cols() < n)
                return k;
        }
    }
    return RationalMatrix(n, 0);
}

}  // namespace

std::vector<RationalMatrix> enumerate_group(const MonodromyRep& rep, std::size_t cap)
{
    return build_group(rep, cap).elems;
}

RationalMatrix averaging_projector(const MonodromyRep& rep, std::size_t cap)
{
    const auto elems = enumerate_group(rep, cap);
    RationalMatrix p = zeros(rep.rank, rep.rank);
    for (const auto& g : elems)
        p += g;
    return p / Rational(static_cast<long>(elems.size()));
}

std::vector<RationalMatrix> commutant(const MonodromyRep& rep)
{
    validate_rep(rep);
    return commutant_of(rep.generators, rep.rank);
}

std::vector<IsotypicPiece> isotypic_decomposition(const MonodromyRep& rep, std::size_t cap)
{
    const Group g = build_group(rep, cap);
    const long n = rep.rank;
    if (n == 0)
        return {};
    // joint eigenspaces of the rational class sums; their eigenvalues are integers
    std::vector<RationalMatrix> pieces = {identity(n)};
    for (const auto& cls : rational_classes(g, rep)) {
        RationalMatrix s = zeros(n, n);
        for (int x : cls)
            s += g.elems[static_cast<std::size_t>(x)];
        const long bound = static_cast<long>(cls.size());
        std::vector<RationalMatrix> next;
        for (const auto& b : pieces) {
            const RationalMatrix sw = restrict_to_basis(b, s);
            long found = 0;
            for (long lambda = -bound; lambda <= bound && found < b.cols(); ++lambda) {
                const RationalMatrix k = kernel<Rational>(RationalMatrix(sw - Rational(lambda) * identity(b.cols())));
                if (k.cols() > 0) {
                    next.push_back(b * k);
                    found += k.cols();
                }
            }
            if (found != b.cols())
                throw MathError("isotypic decomposition: class sum is not diagonalizable over Q");
        }
        pieces = std::move(next);
    }
    auto is_trivial = [&](const RationalMatrix& b) {
        return std::all_of(rep.generators.begin(), rep.generators.end(),
                           [&](const RationalMatrix& x) { return RationalMatrix(x * b) == b; });
    };
    std::stable_sort(pieces.begin(), pieces.end(), [&](const RationalMatrix& a, const RationalMatrix& b) {
        const bool ta = is_trivial(a), tb = is_trivial(b);
        if (ta != tb)
            return ta;
        return a.cols() < b.cols();
    });

    RationalMatrix all = zeros(n, 0);
    for (const auto& b : pieces)
        all = hstack<Rational>(all, b);
    const RationalMatrix all_inv = inverse<Rational>(all);

    std::vector<IsotypicPiece> out;
    Eigen::Index offset = 0;
    for (const auto& b : pieces) {
        IsotypicPiece piece;
        piece.projector = b * all_inv.middleRows(offset, b.cols());
        offset += b.cols();
        // shrink to a simple submodule
        RationalMatrix cur = b;
        for (;;) {
            std::vector<RationalMatrix> local;
            for (const auto& x : rep.generators)
                local.push_back(restrict_to_basis(cur, x));
            const RationalMatrix sub = proper_submodule(local, cur.cols());
            if (sub.cols() == 0)
                break;
            cur = cur * sub;
        }
        piece.simple_basis = cur;
        piece.simple_rank = cur.cols();
        if (b.cols() % cur.cols() != 0)
            throw MathError("isotypic decomposition: simple rank does not divide the piece");
        piece.multiplicity = b.cols() / cur.cols();
        std::vector<RationalMatrix> local;
        for (const auto& x : rep.generators)
            local.push_back(restrict_to_basis(cur, x));
        piece.division_dim = static_cast<long>(commutant_of(local, cur.cols()).size());
        out.push_back(std::move(piece));
    }
    return out;
}

}  // namespace perverscope
