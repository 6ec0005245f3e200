#ifndef PERVERSCOPE_PFILTR_HPP
#define PERVERSCOPE_PFILTR_HPP

#include "perverscope/cellsheaf.hpp"

#include <map>
#include <string>
#include <vector>

namespace perverscope {

/// Increasing filtration P_b on each H^n, stored on the level range [level_lo, level_hi].
/// Below the range P_b = 0, above it P_b = H^n.
struct FiltrationTable {
    int level_lo = 0;
    int level_hi = -1;
    std::map<int, long> totals;                 // degree -> dim H^n (nonzero degrees only)
    std::map<int, std::vector<long>> dims;      // degree -> dim P_b, b = level_lo..level_hi

    long at(int degree, int level) const;
    long total(int degree) const;
    /// dim P_b / P_{b-1}.
    long graded(int degree, int level) const;
    /// Throws MathError unless monotone and exhaustive.
    void validate() const;
    std::string str() const;
};

/// Equality as filtrations (independent of the stored level range).
bool same_filtration(const FiltrationTable& a, const FiltrationTable& b);

/// Builds a table from a function (degree, level) -> dim on the given range.
template <class F>
FiltrationTable tabulate(const std::map<int, long>& totals, int level_lo, int level_hi, F&& f)
{
    FiltrationTable t;
    t.level_lo = level_lo;
    t.level_hi = level_hi;
    t.totals = totals;
    for (const auto& [n, h] : totals) {
        (void)h;
        auto& row = t.dims[n];
        for (int b = level_lo; b <= level_hi; ++b)
            row.push_back(f(n, b));
    }
    t.validate();
    return t;
}

/// New P_b = old P_{b+m}.
FiltrationTable shift_levels(const FiltrationTable& t, int m);
/// Table of C[a] from the table of C: P_b H^n(C[a]) = P_{b+a} H^{n+a}(C).
FiltrationTable shift_complex(const FiltrationTable& t, int a);

struct NormalizedTable {
    FiltrationTable table;
    int m = 0;  // P_b of the result is P_{b+m} of the input
};
/// Shifts levels so that Gr_b = 0 for b < 0 and Gr_0 ≠ 0 in some degree.
NormalizedTable normalize(const FiltrationTable& t);

/// P_b H^j = Ker(H^j(Y, K) -> H^j(Y_{b-j+1}, K)), with Y_k = Y for k <= 0 and Y_k = ∅
/// past the end of the flag.  Needs an affine site.
FiltrationTable flag_kernel_filtration(const SheafComplex& k, const CellSite& site, const Flag& flag);

struct SplitSummand {
    SheafComplex piece;  // perverse
    int level = 0;       // contributes piece[-level]
};
/// ⊕ piece[-level].
SheafComplex assemble(const std::vector<SplitSummand>& summands);
/// P_b H^n = ⊕_{b' <= b} H^{n-b'}(Y, P_{b'}); errors on non-perverse pieces.
FiltrationTable split_filtration(const std::vector<SplitSummand>& summands, const CellSite& site);

struct FlagCertificate {
    bool ok = true;
    std::vector<std::string> failures;
};
/// For every piece P and step Y_k: H^n(Y, P) -> H^n(Y_k, P) injective for n <= -k and zero
/// for n > -k.
FlagCertificate certify_flag(const std::vector<SplitSummand>& summands, const CellSite& site, const Flag& flag);

/// P_i H^n = Im(H^n(Y, τ≤i Rf_*K) -> H^n(Y, Rf_*K)); needs a compact target.
FiltrationTable leray_filtration(const SheafComplex& k, const CellMap& f);
/// The same filtration read off the skeletal filtration of the cellular complex of Rf_*K:
/// P_i H^n = F^{n-i} H^n.
FiltrationTable skeletal_leray_filtration(const SheafComplex& k, const CellMap& f);

/// Cells (degree, level) where two tables differ.
std::vector<std::pair<int, int>> table_differences(const FiltrationTable& a, const FiltrationTable& b);

}  // namespace perverscope

#endif
