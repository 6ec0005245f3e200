#ifndef PERVERSCOPE_LEFCOMB_HPP
#define PERVERSCOPE_LEFCOMB_HPP

#include "perverscope/homalg.hpp"

#include <map>
#include <string>
#include <vector>

namespace perverscope {

/// Graded space in degrees 0..2d with a degree +2 operator η.
struct GradedOperator {
    int d = 0;
    std::vector<long> dims;               // degrees 0..2d
    std::map<int, RationalMatrix> eta;    // eta[q]: degree q -> q + 2; missing entries are zero

    long dim(int q) const;
    RationalMatrix eta_at(int q) const;
};

void validate_operator(const GradedOperator& g);

struct HLReport {
    bool ok = true;
    std::vector<int> failing;  // degrees q = d - r where η^r fails to be an isomorphism
};
/// η^r : H^{d-r} -> H^{d+r} an isomorphism for every r >= 0.
HLReport hl_check(const GradedOperator& g);

/// prim^q = dim ker(η^{d-q+1} on H^q) for q = 0..d; requires hard Lefschetz.
std::vector<long> primitive_decomposition(const GradedOperator& g);

/// Tensor product with η ⊗ 1 + 1 ⊗ η.
GradedOperator kunneth_product(const GradedOperator& a, const GradedOperator& b);

/// dims with η of maximal rank along each parity chain (ones on the diagonal).
GradedOperator diagonal_lefschetz_model(const std::vector<long>& dims);

/// Symmetric about degree d and unimodal along the even and the odd chains.
bool symmetric_unimodal(const std::vector<long>& dims);

using FVector = std::vector<long>;  // f_0 .. f_{d-1}
using HVector = std::vector<long>;  // h_0 .. h_d

/// h_i = Σ_{j<=i} C(d-j, d-i) (-1)^{i-j} f_{j-1}, with f_{-1} = 1.
HVector f_to_h(const FVector& f, int d);
/// Inverse: f_{j-1} = Σ_{i<=j} C(d-i, j-i) h_i; needs h_0 = 1.
FVector h_to_f(const HVector& h, int d);

struct McMullenReport {
    bool symmetric = false;
    bool unimodal = false;
    bool m_sequence = false;
    std::vector<long> g;  // g_0 = h_0, g_i = h_i - h_{i-1} for i <= d/2

    bool ok() const { return symmetric && unimodal && m_sequence; }
};
McMullenReport mcmullen_check(const HVector& h);

/// i-th Macaulay pseudo-power n^<i>.
long macaulay_bound(long n, int i);

/// b_{2i} = h_i, odd Betti numbers zero.
GradedDims toric_betti(const HVector& h);

struct Polytope {
    std::string name;
    int d = 0;
    FVector f;
};
/// Boundaries of the 3-simplex, the octahedron and the icosahedron.
std::vector<Polytope> shipped_polytopes();

}  // namespace perverscope

#endif
