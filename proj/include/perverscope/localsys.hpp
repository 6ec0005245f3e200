#ifndef PERVERSCOPE_LOCALSYS_HPP
#define PERVERSCOPE_LOCALSYS_HPP

#include "perverscope/cellsheaf.hpp"

#include <map>
#include <vector>

namespace perverscope {

/// Representation of a free group (a bouquet of circles) by invertible matrices.
struct MonodromyRep {
    long rank = 0;
    std::vector<RationalMatrix> generators;
};

/// Every generator square of size `rank` and invertible.
void validate_rep(const MonodromyRep& rep);
MonodromyRep trivial_rep(long rank, int generators = 1);

struct CircleCohomology {
    long h0 = 0;
    long h1 = 0;
};
/// H^0 = ker(T - 1), H^1 = coker(T - 1).
CircleCohomology circle_cohomology(const RationalMatrix& t);
/// The same local system as a sheaf on circle_site(cells): identity restrictions except
/// T on the cover (v0, e{cells-1}).
CellSheaf circle_local_system(const RationalMatrix& t, int cells = 4);

/// Basis (columns) of the common fixed space of all generators.
RationalMatrix invariants(const MonodromyRep& rep);

/// Betti numbers of a fiber bundle over the circle from the fiber Betti numbers and the
/// monodromy on each H^q of the fiber.
GradedDims wang(const GradedDims& fiber_betti, const std::map<int, RationalMatrix>& t);

/// Pushforward of a circle local system along the n-fold cyclic cover z -> z^n.
MonodromyRep cyclic_pushforward(int n, const MonodromyRep& rep);

/// Tensor product of rank-one representations: generatorwise products of scalars.
MonodromyRep tensor_rank_one(const MonodromyRep& a, const MonodromyRep& b);

constexpr std::size_t default_group_cap = 10000;
/// All elements of the generated group; throws when more than `cap` are found.
std::vector<RationalMatrix> enumerate_group(const MonodromyRep& rep, std::size_t cap = default_group_cap);
/// (1/|G|) Σ ρ(g): projector onto the invariants.
RationalMatrix averaging_projector(const MonodromyRep& rep, std::size_t cap = default_group_cap);

struct IsotypicPiece {
    long simple_rank = 0;
    long multiplicity = 0;
    long division_dim = 0;   // dim_Q End_G(simple)
    RationalMatrix projector;  // onto the piece along the others
    RationalMatrix simple_basis;  // columns spanning one simple submodule
};
/// Rational isotypic decomposition of a finite-image representation; the trivial
/// piece (when present) comes first.
std::vector<IsotypicPiece> isotypic_decomposition(const MonodromyRep& rep, std::size_t cap = default_group_cap);

/// Basis of End_G(V) as matrices commuting with every generator.
std::vector<RationalMatrix> commutant(const MonodromyRep& rep);

}  // namespace perverscope

#endif
