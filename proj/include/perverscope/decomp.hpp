#ifndef PERVERSCOPE_DECOMP_HPP
#define PERVERSCOPE_DECOMP_HPP

#include "perverscope/localsys.hpp"

#include <optional>
#include <string>
#include <vector>

namespace perverscope {

/// One stratum S of the target with fibers of dimension k over it.  Dimensions are complex.
struct StratumRecord {
    std::string name;
    int dim_s = 0;
    int fiber_dim = 0;
    long components = 1;  // top-dimensional irreducible components of a fiber
    std::vector<RationalMatrix> comp_monodromy;  // permutation matrices on the components
};

struct MapStratification {
    std::string name;
    int dim_x = 0;
    std::optional<int> dim_y;  // defaults to dim_x
    bool generically_finite = true;
    std::optional<int> fiber_product_dim;  // dim X ×_Y X when known independently
    std::vector<StratumRecord> strata;

    int target_dim() const { return dim_y.value_or(dim_x); }
};

void validate_stratification(const MapStratification& ms);
bool is_semismall(const MapStratification& ms);
/// Semismall with strict inequality on every stratum with positive fiber dimension.
bool is_small(const MapStratification& ms);
/// Names of the strata with dim S + 2k = dim X.
std::vector<std::string> relevant_strata(const MapStratification& ms);

struct DTSummand {
    std::string stratum;
    std::string local_system;
    long rank = 1;
    long multiplicity = 1;
    int shift = 0;
    long division_dim = 1;
};
struct DTShape {
    std::vector<DTSummand> summands;
};

/// One IC summand per isotypic piece of the component monodromy over each relevant stratum.
DTShape dt_semismall(const MapStratification& ms);
bool palindromic_check(const DTShape& shape);
/// Every stratum in the shape has codimension at most d in the target.
bool gm_codim_bound(const DTShape& shape, const MapStratification& ms, int d);

struct DefectReport {
    int defect = 0;
    int record_bound = 0;       // max(dim S + 2k) - dim X, floored at 0
    bool from_fiber_product = false;
};
DefectReport defect(const MapStratification& ms);

struct EndoReport {
    long sum_m2 = 0;          // Σ m²
    long algebra_dim = 0;     // Σ m² · dim D
    long component_count = 0; // Σ over relevant strata of orbits on component pairs
};
EndoReport endo_dimension(const DTShape& shape, const MapStratification& ms);

/// (-1)^d M positive definite, by leading principal minors.
bool refined_form_sign(const RationalMatrix& m, int d);

struct ExceptionalConfig {
    std::string point;
    RationalMatrix intersection;
    long components = 0;
};
struct SurfaceDTReport {
    DTShape shape;
    bool orthogonal = false;  // component classes span a nondegenerate block
};
/// Rf_*Q[2] = IC_Y ⊕ skyscrapers spanned by component classes; errors when a form is not
/// negative definite.
SurfaceDTReport surface_resolution_dt(const std::vector<ExceptionalConfig>& points);

/// Hilbert–Chow map X^[n] -> X^(n) over a surface: one stratum per partition.
MapStratification hilbert_chow_strat(int n);

}  // namespace perverscope

#endif
