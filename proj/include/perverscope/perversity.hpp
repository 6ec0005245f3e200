#ifndef PERVERSCOPE_PERVERSITY_HPP
#define PERVERSCOPE_PERVERSITY_HPP

#include "perverscope/cellsheaf.hpp"
#include "perverscope/models.hpp"

#include <map>
#include <string>
#include <vector>

namespace perverscope {

/// Which bounds a checker enforces.  `intersection` is the strict version on every
/// stratum except the open one(s) of top complex dimension.
enum class Bounds { perverse, intersection };

struct StratumEntry {
    std::string stratum;
    int cdim = 0;
    long dim = 0;
};

/// Degrees are those of the shifted object K[shift].
struct PerversityReport {
    int shift = 0;
    Bounds bounds = Bounds::perverse;
    std::map<int, std::vector<StratumEntry>> stalks;
    std::map<int, std::vector<StratumEntry>> costalks;
    bool support_ok = true;
    bool cosupport_ok = true;
    std::vector<std::string> violations;
};

PerversityReport check_support(const SheafComplex& k, const CellSite& site, int shift,
                               Bounds bounds = Bounds::perverse);
PerversityReport check_cosupport(const SheafComplex& k, const CellSite& site, int shift,
                                 Bounds bounds = Bounds::perverse);
/// Both halves in one report.
PerversityReport check_perversity(const SheafComplex& k, const CellSite& site, int shift,
                                  Bounds bounds = Bounds::perverse);
bool is_perverse(const SheafComplex& k, const CellSite& site, int shift);

/// Largest allowed dim supp H^i for i = -dim..0; -1 stands for "must vanish".
std::vector<int> support_dimension_vector(int dim, Bounds bounds);

/// Cohomology of a projective manifold V of dimension d with its hyperplane class.
struct LinkDatum {
    int d = 0;
    GradedDims betti;
    GradedDims prim;
    std::map<int, long> eta_rank;  // rank of η: H^q -> H^{q+2}
};
/// Fills in primitive dimensions prim^q = betti^q - rank(η on H^{q-2}) for q <= d and
/// checks ranks against hard Lefschetz.
LinkDatum make_link_datum(int d, const GradedDims& betti, const std::map<int, long>& eta_rank);
LinkDatum curve_link_datum(int genus);
LinkDatum projective_space_link_datum(int d);
/// H^*(U) for the punctured affine cone over V.
GradedDims punctured_cone_cohomology(const LinkDatum& v);
/// Stalk at the vertex of the cone's intersection complex: prim^0..prim^d.
GradedDims cone_ic_vertex_stalk(const LinkDatum& v);
/// Cell model of the open cone; only curves (d = 1) have a model here.
OpenModel cone_model_for(const LinkDatum& v);

/// Deligne's iterated pushforward and truncation of a local system given on the open
/// dense stratum (as a sheaf on subsite(site, that stratum)).  Unshifted normalization.
SheafComplex deligne_ic(const CellSite& site, const CellSheaf& local_system);

/// Stalks of j_*L on a curve: monodromy invariants at each puncture.
struct CurveIcTable {
    long generic_rank = 0;
    std::vector<long> puncture_stalks;
};
CurveIcTable ic_curve(const std::vector<RationalMatrix>& monodromies, long rank);

struct SelfDualityReport {
    bool self_dual = false;
    GradedDims h;   // H^k(K[shift])
    GradedDims hc;  // H^k_c(K[shift])
    std::map<int, std::pair<long, long>> defects;  // k -> (dim H^k, dim H^{-k}_c)
};
/// dim H^k(K[shift]) = dim H^{-k}_c(K[shift]) for all k.  Needs a compact site or an open
/// part of one.
SelfDualityReport numerical_selfduality(const SheafComplex& k, const CellSite& site, int shift);

struct ArtinReport {
    bool ok = false;
    GradedDims h;
    GradedDims hc;  // empty when no compactification is available
    bool hc_checked = false;
};
/// H^*(K[shift]) in [-d, 0] and H^*_c(K[shift]) in [0, d] on a site declared affine.
ArtinReport artin_range_check(const SheafComplex& k, const CellSite& site, int d, int shift);

}  // namespace perverscope

#endif
