#ifndef PERVERSCOPE_CELLSITE_HPP
#define PERVERSCOPE_CELLSITE_HPP

#include <map>
#include <string>
#include <vector>

namespace perverscope {

/// Sorted list of cell indices.
using CellSet = std::vector<int>;

struct Cover {
    int face = 0;
    int coface = 0;
    int sign = 1;
};

/// Finite stratified face poset.  Open means up-closed, closed means down-closed.
class CellSite {
public:
    int add_cell(const std::string& name, int dim);
    void add_cover(int face, int coface, int sign);
    void add_cover(const std::string& face, const std::string& coface, int sign);
    /// Adds or replaces a stratum.  Cells must not already belong to another stratum.
    void set_stratum(const std::string& name, const CellSet& cells, int cdim);
    void clear_strata();

    bool compact = false;
    bool affine = false;
    /// Set by subsite() for up-closed subsets of a compact site; enables H_c.
    bool open_in_compact = false;
    bool has_compactification() const { return compact || open_in_compact; }

    std::size_t size() const { return names_.size(); }
    const std::string& name(int c) const { return names_.at(static_cast<std::size_t>(c)); }
    int dim(int c) const { return dims_.at(static_cast<std::size_t>(c)); }
    int max_dim() const;
    /// Throws MathError for unknown names.
    int index(const std::string& name) const;
    bool contains(const std::string& name) const { return index_.count(name) != 0; }
    const std::vector<Cover>& covers() const { return covers_; }

    /// Codimension-one faces (face, sign) and cofaces (coface, sign) of a cell.
    const std::vector<std::pair<int, int>>& faces(int c) const;
    const std::vector<std::pair<int, int>>& cofaces(int c) const;
    /// Order relation generated by the covers (reflexive).
    bool leq(int a, int b) const;
    /// Cells ordered by decreasing dimension, ties by index: every prefix is up-closed.
    std::vector<int> top_down_order() const;

    const std::vector<std::string>& stratum_names() const { return stratum_names_; }
    const CellSet& stratum_cells(const std::string& s) const;
    int stratum_cdim(const std::string& s) const;
    /// Stratum name of a cell; empty when unassigned.
    const std::string& stratum_of(int c) const;

private:
    void ensure_order() const;

    std::vector<std::string> names_;
    std::vector<int> dims_;
    std::map<std::string, int> index_;
    std::vector<Cover> covers_;
    std::vector<std::vector<std::pair<int, int>>> faces_, cofaces_;
    std::vector<std::string> stratum_names_;
    std::map<std::string, CellSet> strata_;
    std::map<std::string, int> strat_cdim_;
    std::vector<std::string> cell_stratum_;
    mutable std::vector<std::vector<bool>> up_;
    mutable bool order_ready_ = false;
};

struct Flag {
    std::vector<CellSet> steps;  // Y_0 = whole site, Y_1, ...; each down-closed in the previous
};

struct Violation {
    std::string kind;
    std::string message;
    std::vector<std::string> cells;
};

/// Every broken invariant with the offending cells; empty iff the site is valid.
std::vector<Violation> verify_site(const CellSite& site);

CellSet all_cells(const CellSite& site);
CellSet open_star(const CellSite& site, int cell);
CellSet open_star(const CellSite& site, const std::string& cell);
CellSet up_closure(const CellSite& site, const CellSet& cells);
CellSet down_closure(const CellSite& site, const CellSet& cells);
bool is_up_closed(const CellSite& site, const CellSet& cells);
bool is_down_closed(const CellSite& site, const CellSet& cells);
bool is_locally_closed(const CellSite& site, const CellSet& cells);
/// Z with cells(site) = U ⊔ Z; throws when U is not up-closed.
CellSet closed_complement(const CellSite& site, const CellSet& open);
CellSet set_difference(const CellSet& a, const CellSet& b);
CellSet set_intersection(const CellSet& a, const CellSet& b);
CellSet cells_by_name(const CellSite& site, const std::vector<std::string>& names);

/// The induced site on a subset, with names, signs and strata carried over.
/// `parent` receives the ambient index of each new cell when non-null.
CellSite subsite(const CellSite& site, const CellSet& cells, std::vector<int>* parent = nullptr);

/// Cellular map: monotone on the face posets.
struct CellMap {
    CellSite source;
    CellSite target;
    std::vector<int> image;  // source cell -> target cell
};

/// Throws MathError unless the map is total and monotone.
void validate_map(const CellMap& f);
CellSet preimage(const CellMap& f, const CellSet& cells);
CellMap identity_map(const CellSite& site);
/// Builds a map from a name table source cell -> target cell.
CellMap map_by_names(const CellSite& source, const CellSite& target,
                     const std::map<std::string, std::string>& table);
/// Pre-image of a flag on the target.
Flag pull_flag(const CellMap& f, const Flag& flag);

/// Filtration of a site by skeleta Y_k = cells of dimension <= max_dim - k.
Flag skeleton_flag(const CellSite& site);
/// Throws MathError when the steps are not nested and down-closed.
void validate_flag(const CellSite& site, const Flag& flag);

}  // namespace perverscope

#endif
