#ifndef PERVERSCOPE_CELLSHEAF_HPP
#define PERVERSCOPE_CELLSHEAF_HPP

#include "perverscope/cellsite.hpp"
#include "perverscope/homalg.hpp"

#include <map>
#include <memory>
#include <vector>

namespace perverscope {

struct InjModel;

/// Functor on the face poset: a stalk per cell and a restriction per cover.
struct CellSheaf {
    std::vector<long> stalk;
    std::map<std::pair<int, int>, RationalMatrix> restr;  // (face, coface) -> stalk(coface) x stalk(face)

    /// Restriction along a cover; covers without an entry restrict by zero.
    RationalMatrix restriction(int face, int coface) const;
};

/// Rank-r constant sheaf on the cells of `support` (a locally closed set), zero elsewhere.
CellSheaf constant_sheaf(const CellSite& site, long rank = 1);
CellSheaf constant_on(const CellSite& site, const CellSet& support, long rank = 1);
CellSheaf skyscraper(const CellSite& site, int cell, long rank = 1);
/// Rank-n constant sheaf on `support` whose restriction along the cover (face, coface) is
/// T instead of the identity: a local system with monodromy T around any loop crossing it once.
CellSheaf twisted_sheaf(const CellSite& site, const CellSet& support, int face, int coface, const RationalMatrix& t);
/// Shapes, covers and functoriality on every diamond.
void validate_sheaf(const CellSheaf& f, const CellSite& site);

/// Bounded complex of cellular sheaves.  Producers of derived objects attach the
/// injective model they were computed from; it is reused by costalks and pushforwards.
struct SheafComplex {
    int lo = 0;
    std::vector<CellSheaf> terms;
    std::vector<std::vector<RationalMatrix>> diffs;  // diffs[k][cell]: degree lo+k -> lo+k+1
    std::shared_ptr<const InjModel> model;

    int hi() const { return lo + static_cast<int>(terms.size()) - 1; }
    std::size_t cells() const { return terms.empty() ? 0 : terms.front().stalk.size(); }
};

SheafComplex single(const CellSheaf& f, int degree = 0);
/// K[a]: degree n of the result is degree n + a of K.
SheafComplex shift(const SheafComplex& k, int a);
SheafComplex direct_sum(const SheafComplex& a, const SheafComplex& b);
void validate_complex(const SheafComplex& k, const CellSite& site);

/// The complex K^•(σ) of values on the open star of σ.
CochainComplex value_complex(const SheafComplex& k, int cell);
/// Total complex ⊕_{dim σ = p} K^q(σ) over a locally closed set of cells.
CochainComplex cellular_complex(const SheafComplex& k, const CellSite& site, const CellSet& cells);
/// Coordinates of cellular_complex: for each total degree, (cell, q, index in K^q(cell)).
struct CellularCoord {
    int cell;
    int q;
    int index;
};
std::vector<std::vector<CellularCoord>> cellular_coords(const SheafComplex& k, const CellSite& site,
                                                        const CellSet& cells, int& lo);

/// RΓ(site, K): cellular on compact sites, through an injective model otherwise.
CochainComplex sections_complex(const SheafComplex& k, const CellSite& site);
/// RΓ_c(U, K|_U); needs a compact ambient.
CochainComplex compact_sections_complex(const SheafComplex& k, const CellSite& site, const CellSet& open);
GradedDims derived_stalk(const SheafComplex& k, int cell);
GradedDims costalk(const SheafComplex& k, const CellSite& site, int cell);

/// Rf_*K, represented by its star model; the result carries its injective model.
SheafComplex pushforward(const SheafComplex& k, const CellMap& f);
/// f^*K: value at σ is K(f σ).
SheafComplex pullback(const SheafComplex& k, const CellMap& f);
/// K restricted to a subset of cells, living on subsite(site, cells).
SheafComplex restrict_to(const SheafComplex& k, const CellSite& site, const CellSet& cells);
/// j_!K for K on subsite(ambient, open).
SheafComplex extend_by_zero(const SheafComplex& k, const CellSite& ambient, const CellSet& open);
/// Cellwise standard truncation τ≤t.
SheafComplex truncate_leq(const SheafComplex& k, int t);
/// τ≤t K with its inclusion into K: inclusion[q - lo][cell] maps the degree-q stalk of τ≤t K
/// into the degree-q stalk of K.
struct Truncation {
    SheafComplex complex;
    std::vector<std::vector<RationalMatrix>> inclusion;
};
Truncation truncate_leq_with_inclusion(const SheafComplex& k, int t);

struct LongExactSequence {
    std::vector<GradedDims> terms;                  // A, B, C
    std::vector<std::map<int, long>> ranks;         // A->B, B->C, C->A[1]
    bool exact = false;
};
/// H_c(U) -> H(Y) -> H(Z) -> H_c(U)[1] for a compact site Y = U ⊔ Z.
LongExactSequence compact_attaching_sequence(const SheafComplex& k, const CellSite& site, const CellSet& open);
/// H_Z(Y) -> H(Y) -> H(U) -> H_Z(Y)[1] on any site.
LongExactSequence local_attaching_sequence(const SheafComplex& k, const CellSite& site, const CellSet& open);

/// Rank of H^n(Y, K) -> H^n(Z, K|_Z) for every degree, Z closed.
std::map<int, long> restriction_ranks(const SheafComplex& k, const CellSite& site, const CellSet& closed);

}  // namespace perverscope

#endif
