#ifndef PERVERSCOPE_MODELS_HPP
#define PERVERSCOPE_MODELS_HPP

#include "perverscope/cellsite.hpp"

#include <map>
#include <string>

namespace perverscope {

/// Regular cell structures on standard spaces.  All builders return compact sites
/// without strata unless stated otherwise.

/// v0 -(e)- v1.
CellSite interval_site();
/// m >= 2 vertices v0..v{m-1}, edge e_i from v_i to v_{i+1 mod m}.
CellSite circle_site(int m);
/// Two cells s{k}.0, s{k}.1 in each dimension k = 0..n.
CellSite sphere_site(int n);
/// Product cells named "a|b"; strata are products with added complex dimensions.
CellSite product_site(const CellSite& a, const CellSite& b);
/// Copy with every cell name prefixed.
CellSite prefixed(const CellSite& site, const std::string& prefix);
CellSite disjoint_union(const CellSite& a, const CellSite& b);
/// Removes the top cells `top_a`, `top_b` and glues their boundaries along `iso`
/// (boundary cell of b -> boundary cell of a), which must preserve order and signs.
CellSite connected_sum(const CellSite& a, const std::string& top_a, const CellSite& b,
                       const std::string& top_b, const std::map<std::string, std::string>& iso);
/// Closed 3-manifold with Betti numbers (1, b, b, 1): S^3 for b = 0, else #_b (S^1 × S^2).
CellSite link_site(int b);
/// Cone point "o", base cells "b:τ", cone cells "c:τ".
CellSite closed_cone_site(const CellSite& link);

/// A stratified open subsite of a compact ambient.
struct OpenModel {
    CellSite ambient;
    CellSet open;
    CellSite site;  // induced site on `open`, stratified
};

/// Open cone over link_site(b) inside the closed cone; strata "o" (cdim 0) and
/// "smooth" (cdim 2).  Declared affine.
OpenModel cone_model(int b);
/// Open disk with interior vertices p, q; strata "p" (cdim 0) and "generic" (cdim 1).
/// Declared affine: the affine line with a marked point.
OpenModel disk_model();
/// Product of two open disks; strata "origin" = p|p (cdim 0) and "generic" (cdim 2).
OpenModel plane_model();
/// Two open disks glued at their centres "node"; strata "node" (cdim 0), "generic" (cdim 1).
OpenModel nodal_model();
/// Two disjoint open disks and the map onto the nodal model.
CellMap normalization_map();
/// 2-sphere with marked vertex "s0.0"; strata "a" (cdim 0) and "generic" (cdim 1).
CellSite projective_line_site();

/// circle_site(2n) -> circle_site(2), wrapping n times.
CellMap cyclic_cover_map(int n);
/// circle × interval -> circle.
CellMap circle_projection_map();

}  // namespace perverscope

#endif
