#ifndef PERVERSCOPE_HOMALG_HPP
#define PERVERSCOPE_HOMALG_HPP

#include "perverscope/linalg.hpp"

#include <map>
#include <string>
#include <vector>

namespace perverscope {

/// Finitely supported map degree -> dimension.  Zero entries are never stored.
class GradedDims {
public:
    GradedDims() = default;
    GradedDims(std::initializer_list<std::pair<const int, long>> init);
    /// Dimensions listed from degree lo upwards.
    static GradedDims from_vector(int lo, const std::vector<long>& dims);

    long operator[](int degree) const;
    void set(int degree, long value);
    void add(int degree, long value);

    bool empty() const { return dims_.empty(); }
    int lo() const;   // lowest nonzero degree; throws when empty
    int hi() const;   // highest nonzero degree; throws when empty
    long total() const;
    long euler() const;
    GradedDims shifted(int a) const;  // H^i(C[a]) = H^{i+a}(C)
    const std::map<int, long>& map() const { return dims_; }
    std::vector<long> to_vector(int lo, int hi) const;
    std::string str() const;

    friend bool operator==(const GradedDims& a, const GradedDims& b) { return a.dims_ == b.dims_; }
    friend GradedDims operator+(const GradedDims& a, const GradedDims& b);

private:
    std::map<int, long> dims_;
};

/// Bounded cochain complex; diffs[k] maps degree lo+k to lo+k+1.
struct CochainComplex {
    int lo = 0;
    std::vector<long> dims;
    std::vector<SparseRationalMatrix> diffs;

    int hi() const { return lo + static_cast<int>(dims.size()) - 1; }
    long dim(int degree) const;
    /// Differential out of `degree` (an empty matrix of the right shape outside the range).
    SparseRationalMatrix d(int degree) const;
    /// Throws MathError on shape mismatch or d∘d ≠ 0.
    void validate() const;
};

CochainComplex make_complex(int lo, std::vector<long> dims, std::vector<RationalMatrix> diffs);
CochainComplex zero_complex();

/// Degree-0 chain map; comps[k] acts on degree source.lo + k.
struct ChainMap {
    CochainComplex source;
    CochainComplex target;
    std::vector<SparseRationalMatrix> comps;

    SparseRationalMatrix at(int degree) const;
};

bool is_chain_map(const ChainMap& f);

struct CohomologyBasis {
    int degree = 0;
    RationalMatrix cocycles;    // columns project to a basis of H^degree
    RationalMatrix boundaries;  // columns span im d^{degree-1}
};

GradedDims cohomology(const CochainComplex& c);
CohomologyBasis cohomology_basis(const CochainComplex& c, int degree);
long euler_characteristic(const CochainComplex& c);

CochainComplex shift(const CochainComplex& c, int a);
CochainComplex truncate_leq(const CochainComplex& c, int k);

/// τ≥(k+1): degree k+1 becomes C^{k+1}/im d^k.  `quotient` is the projection
/// C^{k+1} -> (C^{k+1}/im d^k) in the chosen complement coordinates.
struct UpperTruncation {
    CochainComplex complex;
    RationalMatrix quotient;
};
UpperTruncation truncate_gt(const CochainComplex& c, int k);

/// cone(f)^i = B^i ⊕ A^{i+1}, d(b, a) = (d b + f a, -d a).  Throws on non-chain maps.
CochainComplex mapping_cone(const ChainMap& f);

/// Rank of the induced map H^degree(source) -> H^degree(target).
long induced_rank(const ChainMap& f, int degree);

/// Decreasing filtration F^{p0} = C ⊇ F^{p0+1} ⊇ ... ⊇ 0 by subcomplexes.
/// steps[j][k] spans F^{p0+j} in degree complex.lo + k.
struct FilteredComplex {
    CochainComplex complex;
    int p0 = 0;
    std::vector<std::vector<RationalMatrix>> steps;

    int p_end() const { return p0 + static_cast<int>(steps.size()); }
    /// Spanning columns of F^p in `degree`; whole space below p0, zero from p_end().
    RationalMatrix step(int p, int degree) const;
    void validate() const;
};

/// Builds the filtration given by coordinate subsets: coordinate i of degree n lies
/// in F^p iff level[n][i] >= p.
FilteredComplex filtration_by_levels(const CochainComplex& c,
                                     const std::vector<std::vector<int>>& levels);

struct SpectralPage {
    int r = 0;
    std::map<std::pair<int, int>, long> dims;        // (p, q) -> dim E_r^{p,q}
    std::map<std::pair<int, int>, long> diff_rank;   // (p, q) -> rank of d_r out of E_r^{p,q}
};

/// Pages E_1 .. E_{r_max}.
std::vector<SpectralPage> spectral_pages(const FilteredComplex& fc, int r_max);
/// The limit page, computed directly.
SpectralPage limit_page(const FilteredComplex& fc);
/// dim F^p H^n for all p in [p0, p_end], keyed by (p, n).
std::map<std::pair<int, int>, long> induced_filtration(const FilteredComplex& fc);
bool is_E2_degenerate(const FilteredComplex& fc);

}  // namespace perverscope

#endif
