#include "perverscope/hilbpart.hpp"

#include <functional>
#include <map>

namespace perverscope {

int Partition::n() const
{
    int s = 0;
    for (int p : parts)
        s += p;
    return s;
}

std::vector<int> Partition::multiplicities() const
{
    std::vector<int> m(static_cast<std::size_t>(n() + 1), 0);
    for (int p : parts)
        ++m[static_cast<std::size_t>(p)];
    return m;
}

std::string Partition::str() const
{
    std::string s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i)
        s += (i ? "," : "") + std::to_string(parts[i]);
    return s + ")";
}

std::vector<Partition> partitions(int n)
{
    if (n < 0)
        throw MathError("partitions: n must be non-negative");
    std::vector<Partition> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int max_part) {
        if (left == 0) {
            out.push_back({cur});
            return;
        }
        for (int p = std::min(left, max_part); p >= 1; --p) {
            cur.push_back(p);
            rec(left - p, p);
            cur.pop_back();
        }
    };
    rec(n, n);
    return out;
}

std::vector<long> euler_product_coeffs(int n_max)
{
    if (n_max < 0)
        throw MathError("euler_product_coeffs: N must be non-negative");
    if (n_max > 400)
        throw MathError("euler_product_coeffs: N above 400 overflows 64-bit coefficients");
    std::vector<long> c(static_cast<std::size_t>(n_max + 1), 0);
    c[0] = 1;
    // multiply by 1/(1 - q^j) = running prefix sums with stride j
    for (int j = 1; j <= n_max; ++j)
        for (int k = j; k <= n_max; ++k)
            c[static_cast<std::size_t>(k)] += c[static_cast<std::size_t>(k - j)];
    return c;
}

GradedDims SurfaceBetti::dims() const
{
    GradedDims g;
    for (int q = 0; q < 5; ++q)
        g.set(q, b[static_cast<std::size_t>(q)]);
    return g;
}

void validate_surface(const SurfaceBetti& s)
{
    for (long x : s.b)
        if (x < 0)
            throw MathError("surface Betti numbers must be non-negative");
}

GradedDims sym_power_betti(const GradedDims& betti, int a)
{
    if (a < 0)
        throw MathError("sym_power_betti: a must be non-negative");
    // poly[k] = graded dims of the z^k coefficient
    std::vector<GradedDims> poly(static_cast<std::size_t>(a + 1));
    poly[0].set(0, 1);
    for (const auto& [q, b] : betti.map()) {
        if (q < 0)
            throw MathError("sym_power_betti: negative degree");
        for (long copy = 0; copy < b; ++copy) {
            std::vector<GradedDims> next(static_cast<std::size_t>(a + 1));
            for (int k = 0; k <= a; ++k)
                for (int e = 0; k + e <= a; ++e) {
                    if (q % 2 == 1 && e > 1)
                        break;  // exterior factor 1 + t^q z
                    for (const auto& [deg, d] : poly[static_cast<std::size_t>(k)].map())
                        next[static_cast<std::size_t>(k + e)].add(deg + q * e, d);
                }
            poly = std::move(next);
        }
    }
    return poly[static_cast<std::size_t>(a)];
}

GradedDims sym_power_betti(const SurfaceBetti& s, int a)
{
    validate_surface(s);
    return sym_power_betti(s.dims(), a);
}

namespace {

GradedDims tensor(const GradedDims& x, const GradedDims& y)
{
    GradedDims out;
    for (const auto& [i, a] : x.map())
        for (const auto& [j, b] : y.map())
            out.add(i + j, a * b);
    return out;
}

}  // namespace

GradedDims gottsche(const SurfaceBetti& s, int n)
{
    validate_surface(s);
    if (n < 0)
        throw MathError("gottsche: n must be non-negative");
    GradedDims total;
    for (const auto& nu : partitions(n)) {
        GradedDims piece;
        piece.set(0, 1);
        const auto mult = nu.multiplicities();
        for (std::size_t i = 1; i < mult.size(); ++i)
            if (mult[i] > 0)
                piece = tensor(piece, sym_power_betti(s.dims(), mult[i]));
        total = total + piece.shifted(-2 * nu.colength());
    }
    return total;
}

// ----------------------------------------------------------- Heisenberg

namespace {

using Monomial = std::vector<int>;  // exponents of x_1..x_N
using Vec = std::map<Monomial, long>;

int weight(const Monomial& m)
{
    int w = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
        w += static_cast<int>(i + 1) * m[i];
    return w;
}

Vec mult(const Vec& v, int j)
{
    Vec out;
    for (const auto& [m, c] : v) {
        Monomial x = m;
        ++x[static_cast<std::size_t>(j - 1)];
        out[x] += c;
    }
    return out;
}

Vec deriv(const Vec& v, int i)
{
    Vec out;
    for (const auto& [m, c] : v) {
        const int e = m[static_cast<std::size_t>(i - 1)];
        if (e == 0)
            continue;
        Monomial x = m;
        --x[static_cast<std::size_t>(i - 1)];
        out[x] += c * e;
    }
    return out;
}

Vec minus(Vec a, const Vec& b)
{
    for (const auto& [m, c] : b)
        a[m] -= c;
    for (auto it = a.begin(); it != a.end();)
        it = it->second == 0 ? a.erase(it) : std::next(it);
    return a;
}

}  // namespace

HeisenbergReport heisenberg_check(int n_max)
{
    if (n_max < 1)
        throw MathError("heisenberg_check: N must be at least 1");
    HeisenbergReport r;
    std::vector<std::vector<Monomial>> basis(static_cast<std::size_t>(n_max + 1));
    for (int n = 0; n <= n_max; ++n)
        for (const auto& p : partitions(n)) {
            Monomial m(static_cast<std::size_t>(n_max), 0);
            for (int part : p.parts)
                ++m[static_cast<std::size_t>(part - 1)];
            basis[static_cast<std::size_t>(n)].push_back(m);
        }
    for (const auto& b : basis)
        r.graded_dims.push_back(static_cast<long>(b.size()));

    auto check = [&](bool good, const std::string& what) {
        ++r.identities_checked;
        if (!good) {
            r.ok = false;
            r.failures.push_back(what);
        }
    };
    for (int n = 0; n <= n_max; ++n)
        for (const auto& m : basis[static_cast<std::size_t>(n)]) {
            if (weight(m) != n)
                throw MathError("heisenberg_check: internal degree mismatch");
            const Vec v = {{m, 1}};
            for (int i = 1; i <= n_max; ++i)
                for (int j = 1; j <= n_max; ++j) {
                    const std::string tag = " on a degree-" + std::to_string(n) + " monomial";
                    if (n + j <= n_max) {
                        const Vec c = minus(deriv(mult(v, j), i), mult(deriv(v, i), j));
                        check(c == (i == j ? v : Vec{}),
                              "[d_-" + std::to_string(i) + ", m_" + std::to_string(j) + "]" + tag);
                    }
                    if (n + i + j <= n_max)
                        check(minus(mult(mult(v, j), i), mult(mult(v, i), j)).empty(),
                              "[m_" + std::to_string(i) + ", m_" + std::to_string(j) + "]" + tag);
                    check(minus(deriv(deriv(v, j), i), deriv(deriv(v, i), j)).empty(),
                          "[d_-" + std::to_string(i) + ", d_-" + std::to_string(j) + "]" + tag);
                }
        }
    const auto euler = euler_product_coeffs(n_max);
    for (int n = 0; n <= n_max; ++n)
        check(r.graded_dims[static_cast<std::size_t>(n)] == euler[static_cast<std::size_t>(n)],
              "graded dimension in degree " + std::to_string(n));
    return r;
}

}  // namespace perverscope
