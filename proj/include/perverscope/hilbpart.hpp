#ifndef PERVERSCOPE_HILBPART_HPP
#define PERVERSCOPE_HILBPART_HPP

#include "perverscope/homalg.hpp"

#include <array>
#include <string>
#include <vector>

namespace perverscope {

struct Partition {
    std::vector<int> parts;  // weakly decreasing, positive

    int n() const;
    int length() const { return static_cast<int>(parts.size()); }
    int colength() const { return n() - length(); }
    /// m[i] = number of parts equal to i, for i = 1..n; m[0] is unused.
    std::vector<int> multiplicities() const;
    std::string str() const;
};

/// All partitions of n, largest first part first.
std::vector<Partition> partitions(int n);

/// Coefficients of Π_{j>=1} (1 - q^j)^{-1} up to q^N.
std::vector<long> euler_product_coeffs(int n_max);

/// Betti numbers b_0..b_4 of a surface.
struct SurfaceBetti {
    std::array<long, 5> b{};

    GradedDims dims() const;
};
void validate_surface(const SurfaceBetti& s);

/// Graded dimensions of the a-th graded-symmetric power of a graded space.
GradedDims sym_power_betti(const GradedDims& betti, int a);
GradedDims sym_power_betti(const SurfaceBetti& s, int a);

/// H^*(X^[n]) = ⊕_ν H^{*-2 cl(ν)}(X^(ν)).
GradedDims gottsche(const SurfaceBetti& s, int n);

struct HeisenbergReport {
    bool ok = true;
    std::vector<long> graded_dims;  // degrees 0..N
    long identities_checked = 0;
    std::vector<std::string> failures;
};
/// Checks [d_i, m_j] = δ_{-i,j}, [m_i, m_j] = 0 and [d_i, d_j] = 0 on the polynomial
/// module Q[x_1, x_2, ...] (deg x_i = i) truncated at degree N; m_j multiplies by x_j and
/// d_{-i} is ∂/∂x_i.
HeisenbergReport heisenberg_check(int n_max);

}  // namespace perverscope

#endif
