#ifndef PERVERSCOPE_IO_HPP
#define PERVERSCOPE_IO_HPP

#include "perverscope/decomp.hpp"
#include "perverscope/hilbpart.hpp"
#include "perverscope/lefcomb.hpp"
#include "perverscope/localsys.hpp"
#include "perverscope/models.hpp"
#include "perverscope/perversity.hpp"
#include "perverscope/pfiltr.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <vector>

namespace perverscope {

using Json = nlohmann::ordered_json;

// Schema identifiers written into and required from top-level documents.
inline constexpr const char* kSiteSchema = "perverscope.site/1";
inline constexpr const char* kComplexSchema = "perverscope.complex/1";
inline constexpr const char* kFlagSchema = "perverscope.flag/1";
inline constexpr const char* kMapSchema = "perverscope.map/1";
inline constexpr const char* kSummandsSchema = "perverscope.summands/1";
inline constexpr const char* kMonodromySchema = "perverscope.monodromy/1";
inline constexpr const char* kStratificationSchema = "perverscope.stratification/1";
inline constexpr const char* kSurfaceSchema = "perverscope.surface/1";
inline constexpr const char* kShapeSchema = "perverscope.dtshape/1";
inline constexpr const char* kFiltrationSchema = "perverscope.filtration/1";
inline constexpr const char* kWangSchema = "perverscope.wang/1";

/// Parses a file; SchemaError when it is missing or not JSON.
Json read_json_file(const std::string& path);
/// Checks the "schema" field of a top-level document (optional on nested ones).
void expect_schema(const Json& j, const char* schema, bool required = true);

RationalMatrix matrix_from_json(const Json& j, const std::string& where);
/// Same, with a shape check; [] is accepted for empty shapes.
RationalMatrix matrix_from_json(const Json& j, long rows, long cols, const std::string& where);
Json matrix_to_json(const RationalMatrix& m);

Json dims_to_json(const GradedDims& g);
GradedDims dims_from_json(const Json& j, const std::string& where);

/// Sites; a document with "open" describes subsite(ambient, open).
CellSite site_from_json(const Json& j);
Json site_to_json(const CellSite& site);
Json open_model_to_json(const OpenModel& m);

SheafComplex complex_from_json(const Json& j, const CellSite& site);
Json complex_to_json(const SheafComplex& k, const CellSite& site);

Flag flag_from_json(const Json& j, const CellSite& site);
Json flag_to_json(const Flag& flag, const CellSite& site);

CellMap map_from_json(const Json& j);
Json map_to_json(const CellMap& f);

std::vector<SplitSummand> summands_from_json(const Json& j, const CellSite& site);

MonodromyRep rep_from_json(const Json& j);
Json rep_to_json(const MonodromyRep& rep);

/// Fiber Betti numbers and the monodromy on each fiber cohomology group.
struct WangInput {
    GradedDims fiber_betti;
    std::map<int, RationalMatrix> monodromy;
};
WangInput wang_from_json(const Json& j);
Json wang_to_json(const WangInput& w);

MapStratification stratification_from_json(const Json& j);
Json stratification_to_json(const MapStratification& ms);

std::vector<ExceptionalConfig> surface_from_json(const Json& j);
Json surface_to_json(const std::vector<ExceptionalConfig>& points);

DTShape shape_from_json(const Json& j);
Json shape_to_json(const DTShape& shape);

FiltrationTable table_from_json(const Json& j);
Json table_to_json(const FiltrationTable& t);

Json perversity_report_to_json(const PerversityReport& r);

}  // namespace perverscope

#endif
