#ifndef PERVERSCOPE_INJECTIVE_HPP
#define PERVERSCOPE_INJECTIVE_HPP

#include "perverscope/cellsheaf.hpp"

#include <map>
#include <memory>
#include <vector>

namespace perverscope {

/// Bounded complex of injective sheaves ⊕ I_ℓ, where I_ℓ is Q on the down-set of ℓ.
/// Basis vector i carries a label (a cell) and a degree; the differential only maps a
/// vector labelled ℓ to vectors labelled ℓ' ≤ ℓ.  Sections over an up-closed W are the
/// vectors labelled in W.
struct InjModel {
    std::vector<int> label;
    std::vector<int> degree;
    std::vector<std::map<int, Rational>> col;  // col[j][i] = D(i, j)

    std::size_t size() const { return label.size(); }
    /// The subcomplex (or quotient) spanned by vectors whose label is in `mask`.
    /// `basis[k]` receives the model indices of degree lo + k.
    CochainComplex restricted(const std::vector<bool>& mask, std::vector<std::vector<int>>* basis = nullptr,
                              int* lo = nullptr) const;
};

/// Chain maps K(σ) -> Γ(star σ, J) for every cell: eps[cell][q - lo] columns as sparse
/// vectors over model indices.
struct Resolution {
    InjModel model;
    int lo = 0;
    std::vector<std::vector<std::vector<std::map<int, Rational>>>> eps;
};

/// Minimal-ish injective model of an explicit complex, with the comparison maps.
Resolution resolve_with_maps(const SheafComplex& k, const CellSite& site);
/// Cached model when present, otherwise a fresh resolution.
std::shared_ptr<const InjModel> model_of(const SheafComplex& k, const CellSite& site);

/// Star model: value at σ is Γ(star σ, J), restrictions are projections.
SheafComplex explicit_complex(std::shared_ptr<const InjModel> model, const CellSite& site);
/// Pushforward along a cellular map: relabel ℓ -> f(ℓ).
InjModel relabel(const InjModel& m, const std::vector<int>& image);
/// Restriction to an open subset: keep the labels in `open`, renumbered into subsite order.
InjModel restrict_open(const InjModel& m, const CellSite& site, const CellSet& open);
InjModel shift_model(const InjModel& m, int a);

/// Global sections complex.
CochainComplex global_sections(const InjModel& m);
/// H(Γ_σ): cohomology of the block of vectors labelled σ.
GradedDims local_block_cohomology(const InjModel& m, int cell);

/// One step of the cellwise Deligne construction: extend over `cell` by τ≤t of the
/// sections over star(cell) minus cell.
struct DeligneStep {
    int cell;
    int truncation;
};
/// Resolves `k` on the up-closed set `open` and then extends over the listed cells in
/// order; each prefix must stay up-closed.
InjModel deligne_model(const SheafComplex& k, const CellSite& site, const CellSet& open,
                       const std::vector<DeligneStep>& steps);

}  // namespace perverscope

#endif
