#include "perverscope/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace perverscope {

namespace {

/// Rejects non-objects, missing required keys and unknown keys.
void check_object(const Json& j, const std::string& where, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional)
{
    if (!j.is_object())
        throw SchemaError(where + ": expected an object");
    std::set<std::string> allowed;
    for (const char* k : required) {
        allowed.insert(k);
        if (!j.contains(k))
            throw SchemaError(where + ": missing field \"" + k + "\"");
    }
    for (const char* k : optional)
        allowed.insert(k);
    allowed.insert("schema");
    allowed.insert("comment");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k))
            throw SchemaError(where + ": unknown field \"" + k + "\"");
    if (j.contains("comment") && !j["comment"].is_string())
        throw SchemaError(where + ": \"comment\" must be a string");
}

long get_int(const Json& j, const char* key, const std::string& where)
{
    const Json& v = j.at(key);
    if (!v.is_number_integer())
        throw SchemaError(where + ": \"" + key + "\" must be an integer");
    return v.get<long>();
}

long as_int(const Json& v, const std::string& where)
{
    if (!v.is_number_integer())
        throw SchemaError(where + ": expected an integer");
    return v.get<long>();
}

bool get_bool(const Json& j, const char* key, bool fallback, const std::string& where)
{
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_boolean())
        throw SchemaError(where + ": \"" + key + "\" must be a boolean");
    return j[key].get<bool>();
}

std::string get_string(const Json& j, const char* key, const std::string& where)
{
    const Json& v = j.at(key);
    if (!v.is_string())
        throw SchemaError(where + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

const Json& get_array(const Json& j, const char* key, const std::string& where)
{
    const Json& v = j.at(key);
    if (!v.is_array())
        throw SchemaError(where + ": \"" + key + "\" must be an array");
    return v;
}

std::string as_string(const Json& v, const std::string& where)
{
    if (!v.is_string())
        throw SchemaError(where + ": expected a string");
    return v.get<std::string>();
}

int cell_index(const CellSite& site, const Json& v, const std::string& where)
{
    const std::string name = as_string(v, where);
    if (!site.contains(name))
        throw SchemaError(where + ": unknown cell \"" + name + "\"");
    return site.index(name);
}

CellSet cell_list(const CellSite& site, const Json& v, const std::string& where)
{
    if (v.is_string() && v.get<std::string>() == "all")
        return all_cells(site);
    if (!v.is_array())
        throw SchemaError(where + ": expected a list of cell names or \"all\"");
    CellSet out;
    for (const auto& x : v)
        out.push_back(cell_index(site, x, where));
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end())
        throw SchemaError(where + ": repeated cell");
    return out;
}

Json names_of(const CellSite& site, const CellSet& cells)
{
    Json a = Json::array();
    for (int c : cells)
        a.push_back(site.name(c));
    return a;
}

Rational entry(const Json& v, const std::string& where)
{
    if (v.is_number_integer())
        return Rational(v.get<long>());
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const std::exception&) {
            throw SchemaError(where + ": bad rational \"" + v.get<std::string>() + "\"");
        }
    }
    throw SchemaError(where + ": matrix entries must be integers or \"p/q\" strings");
}

Json entry_to_json(const Rational& q)
{
    if (denominator(q) == 1 && abs(numerator(q)) < Integer(1L << 53))
        return numerator(q).convert_to<long>();
    return format_rational(q);
}

void apply_strata(CellSite& site, const Json& strata, const std::string& where)
{
    if (!strata.is_array())
        throw SchemaError(where + ": \"strata\" must be an array");
    site.clear_strata();
    for (const auto& s : strata) {
        check_object(s, where + " stratum", {"name", "cdim", "cells"}, {});
        try {
            site.set_stratum(get_string(s, "name", where), cell_list(site, s["cells"], where + " stratum"),
                             static_cast<int>(get_int(s, "cdim", where)));
        } catch (const MathError& e) {
            throw SchemaError(where + ": " + e.what());
        }
    }
}

Json strata_to_json(const CellSite& site)
{
    Json a = Json::array();
    for (const auto& s : site.stratum_names())
        a.push_back({{"name", s}, {"cdim", site.stratum_cdim(s)}, {"cells", names_of(site, site.stratum_cells(s))}});
    return a;
}

CellSheaf sheaf_from_json(const Json& j, const CellSite& site, const std::string& where)
{
    if (!j.is_object() || j.size() != 1)
        throw SchemaError(where + ": a term is an object with exactly one of \"constant\", \"skyscraper\", "
                                  "\"twisted\", \"explicit\"");
    const auto& [kind, body] = *j.items().begin();
    CellSheaf f;
    if (kind == "constant") {
        check_object(body, where + " constant", {}, {"support", "rank"});
        const CellSet support = body.contains("support") ? cell_list(site, body["support"], where) : all_cells(site);
        f = constant_on(site, support, body.contains("rank") ? get_int(body, "rank", where) : 1);
    } else if (kind == "skyscraper") {
        check_object(body, where + " skyscraper", {"cell"}, {"rank"});
        f = skyscraper(site, cell_index(site, body["cell"], where), body.contains("rank") ? get_int(body, "rank", where) : 1);
    } else if (kind == "twisted") {
        check_object(body, where + " twisted", {"face", "coface", "matrix"}, {"support"});
        const CellSet support = body.contains("support") ? cell_list(site, body["support"], where) : all_cells(site);
        f = twisted_sheaf(site, support, cell_index(site, body["face"], where), cell_index(site, body["coface"], where),
                          matrix_from_json(body["matrix"], where + " twisted matrix"));
    } else if (kind == "explicit") {
        check_object(body, where + " explicit", {"stalks"}, {"restrictions"});
        if (!body["stalks"].is_object())
            throw SchemaError(where + ": \"stalks\" must map cell names to dimensions");
        f.stalk.assign(site.size(), 0);
        for (const auto& [name, d] : body["stalks"].items())
            f.stalk[static_cast<std::size_t>(cell_index(site, Json(name), where))] = as_int(d, where + " stalk");
        if (body.contains("restrictions"))
            for (const auto& r : get_array(body, "restrictions", where)) {
                if (!r.is_array() || r.size() != 3)
                    throw SchemaError(where + ": a restriction is [face, coface, matrix]");
                const int a = cell_index(site, r[0], where), b = cell_index(site, r[1], where);
                f.restr[{a, b}] = matrix_from_json(r[2], f.stalk[static_cast<std::size_t>(b)],
                                                   f.stalk[static_cast<std::size_t>(a)], where + " restriction");
            }
        for (const auto& cv : site.covers())
            if (f.stalk[static_cast<std::size_t>(cv.face)] > 0 && f.stalk[static_cast<std::size_t>(cv.coface)] > 0 &&
                !f.restr.count({cv.face, cv.coface}))
                throw SchemaError(where + ": missing restriction (\"" + site.name(cv.face) + "\", \"" +
                                  site.name(cv.coface) + "\")");
    } else {
        throw SchemaError(where + ": unknown term kind \"" + kind + "\"");
    }
    return f;
}

}  // namespace

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw SchemaError("cannot open \"" + path + "\"");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError("\"" + path + "\" is not valid JSON: " + e.what());
    }
}

void expect_schema(const Json& j, const char* schema, bool required)
{
    if (!j.is_object())
        throw SchemaError(std::string(schema) + ": expected an object");
    if (!j.contains("schema")) {
        if (required)
            throw SchemaError(std::string("missing \"schema\": expected \"") + schema + "\"");
        return;
    }
    if (!j["schema"].is_string() || j["schema"].get<std::string>() != schema)
        throw SchemaError(std::string("wrong schema: expected \"") + schema + "\", got " + j["schema"].dump());
}

RationalMatrix matrix_from_json(const Json& j, const std::string& where)
{
    if (!j.is_array())
        throw SchemaError(where + ": a matrix is an array of rows");
    const long rows = static_cast<long>(j.size());
    long cols = -1;
    for (const auto& r : j) {
        if (!r.is_array())
            throw SchemaError(where + ": a matrix is an array of rows");
        if (cols >= 0 && static_cast<long>(r.size()) != cols)
            throw SchemaError(where + ": ragged matrix");
        cols = static_cast<long>(r.size());
    }
    RationalMatrix m = zeros(rows, std::max(0L, cols));
    for (long i = 0; i < rows; ++i)
        for (long k = 0; k < cols; ++k)
            m(i, k) = entry(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], where);
    return m;
}

RationalMatrix matrix_from_json(const Json& j, long rows, long cols, const std::string& where)
{
    if (j.is_array() && j.empty() && (rows == 0 || cols == 0))
        return zeros(rows, cols);
    RationalMatrix m = matrix_from_json(j, where);
    if (m.rows() != rows || m.cols() != cols)
        throw SchemaError(where + ": expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    return m;
}

Json matrix_to_json(const RationalMatrix& m)
{
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            row.push_back(entry_to_json(m(i, k)));
        a.push_back(row);
    }
    return a;
}

Json dims_to_json(const GradedDims& g)
{
    Json o = Json::object();
    for (const auto& [d, v] : g.map())
        o[std::to_string(d)] = v;
    return o;
}

GradedDims dims_from_json(const Json& j, const std::string& where)
{
    if (!j.is_object())
        throw SchemaError(where + ": graded dimensions are an object degree -> dimension");
    GradedDims g;
    for (const auto& [k, v] : j.items()) {
        std::size_t used = 0;
        int d = 0;
        try {
            d = std::stoi(k, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != k.size() || k.empty())
            throw SchemaError(where + ": degree \"" + k + "\" is not an integer");
        const long x = as_int(v, where);
        if (x < 0)
            throw SchemaError(where + ": negative dimension");
        g.set(d, x);
    }
    return g;
}

// ------------------------------------------------------------------ sites

CellSite site_from_json(const Json& j)
{
    const std::string where = "site";
    check_object(j, where, {"cells", "covers"}, {"compact", "affine", "strata", "open", "name"});
    CellSite ambient;
    for (const auto& c : get_array(j, "cells", where)) {
        if (!c.is_array() || c.size() != 2)
            throw SchemaError(where + ": a cell is [name, dim]");
        const std::string name = as_string(c[0], where + " cell name");
        if (ambient.contains(name))
            throw SchemaError(where + ": duplicate cell \"" + name + "\"");
        ambient.add_cell(name, static_cast<int>(as_int(c[1], where + " cell dim")));
    }
    for (const auto& c : get_array(j, "covers", where)) {
        if (!c.is_array() || c.size() != 3)
            throw SchemaError(where + ": a cover is [face, coface, sign]");
        const int a = cell_index(ambient, c[0], where), b = cell_index(ambient, c[1], where);
        const long s = as_int(c[2], where + " cover sign");
        if (s != 1 && s != -1)
            throw SchemaError(where + ": cover signs are +1 or -1");
        ambient.add_cover(a, b, static_cast<int>(s));
    }
    ambient.compact = get_bool(j, "compact", false, where);
    CellSite site = ambient;
    if (j.contains("open")) {
        if (!ambient.compact)
            throw SchemaError(where + ": \"open\" needs a compact ambient site");
        const CellSet open = cell_list(ambient, j["open"], where + " open");
        if (!is_up_closed(ambient, open))
            throw SchemaError(where + ": \"open\" is not up-closed");
        site = subsite(ambient, open);
    }
    site.affine = get_bool(j, "affine", false, where);
    if (j.contains("strata"))
        apply_strata(site, j["strata"], where);
    return site;
}

Json site_to_json(const CellSite& site)
{
    if (site.open_in_compact)
        throw MathError("site_to_json: an open subsite is written through its ambient model");
    Json cells = Json::array(), covers = Json::array();
    for (int c = 0; c < static_cast<int>(site.size()); ++c)
        cells.push_back(Json::array({site.name(c), site.dim(c)}));
    for (const auto& cv : site.covers())
        covers.push_back(Json::array({site.name(cv.face), site.name(cv.coface), cv.sign}));
    Json j = {{"schema", kSiteSchema}, {"compact", site.compact}, {"affine", site.affine}, {"cells", cells},
              {"covers", covers}};
    if (!site.stratum_names().empty())
        j["strata"] = strata_to_json(site);
    return j;
}

Json open_model_to_json(const OpenModel& m)
{
    CellSite ambient = m.ambient;
    ambient.clear_strata();
    ambient.affine = false;
    Json j = site_to_json(ambient);
    j["affine"] = m.site.affine;
    j["open"] = names_of(m.ambient, m.open);
    j["strata"] = strata_to_json(m.site);
    return j;
}

// -------------------------------------------------------------- complexes

SheafComplex complex_from_json(const Json& j, const CellSite& site)
{
    const std::string where = "complex";
    check_object(j, where, {"terms"}, {"lo", "diffs"});
    SheafComplex k;
    k.lo = j.contains("lo") ? static_cast<int>(get_int(j, "lo", where)) : 0;
    const Json& terms = get_array(j, "terms", where);
    if (terms.empty())
        throw SchemaError(where + ": no terms");
    for (std::size_t i = 0; i < terms.size(); ++i)
        k.terms.push_back(sheaf_from_json(terms[i], site, where + " term " + std::to_string(i)));
    const Json diffs = j.contains("diffs") ? j["diffs"] : Json::array();
    if (!diffs.is_array())
        throw SchemaError(where + ": \"diffs\" must be an array");
    if (!diffs.empty() && diffs.size() + 1 != terms.size())
        throw SchemaError(where + ": expected " + std::to_string(terms.size() - 1) + " differentials");
    for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
        std::vector<RationalMatrix> per_cell;
        for (std::size_t c = 0; c < site.size(); ++c)
            per_cell.push_back(zeros(k.terms[i + 1].stalk[c], k.terms[i].stalk[c]));
        if (!diffs.empty()) {
            if (!diffs[i].is_object())
                throw SchemaError(where + ": a differential maps cell names to matrices");
            for (const auto& [name, m] : diffs[i].items()) {
                const auto c = static_cast<std::size_t>(cell_index(site, Json(name), where));
                per_cell[c] = matrix_from_json(m, k.terms[i + 1].stalk[c], k.terms[i].stalk[c], where + " differential");
            }
        }
        k.diffs.push_back(std::move(per_cell));
    }
    try {
        validate_complex(k, site);
    } catch (const MathError& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return k;
}

Json complex_to_json(const SheafComplex& k, const CellSite& site)
{
    Json terms = Json::array(), diffs = Json::array();
    for (const auto& f : k.terms) {
        Json stalks = Json::object(), restr = Json::array();
        for (std::size_t c = 0; c < f.stalk.size(); ++c)
            if (f.stalk[c] > 0)
                stalks[site.name(static_cast<int>(c))] = f.stalk[c];
        for (const auto& [key, m] : f.restr)
            if (m.size() > 0)
                restr.push_back(Json::array({site.name(key.first), site.name(key.second), matrix_to_json(m)}));
        terms.push_back({{"explicit", {{"stalks", stalks}, {"restrictions", restr}}}});
    }
    for (const auto& per_cell : k.diffs) {
        Json d = Json::object();
        for (std::size_t c = 0; c < per_cell.size(); ++c) {
            const RationalMatrix& m = per_cell[c];
            bool nz = false;
            for (Eigen::Index r = 0; r < m.rows() && !nz; ++r)
                for (Eigen::Index s = 0; s < m.cols() && !nz; ++s)
                    nz = !is_zero(m(r, s));
            if (nz)
                d[site.name(static_cast<int>(c))] = matrix_to_json(m);
        }
        diffs.push_back(d);
    }
    return {{"schema", kComplexSchema}, {"lo", k.lo}, {"terms", terms}, {"diffs", diffs}};
}

// ---------------------------------------------------------- flags and maps

Flag flag_from_json(const Json& j, const CellSite& site)
{
    const std::string where = "flag";
    check_object(j, where, {"steps"}, {});
    Flag f;
    for (const auto& s : get_array(j, "steps", where))
        f.steps.push_back(cell_list(site, s, where + " step"));
    try {
        validate_flag(site, f);
    } catch (const MathError& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return f;
}

Json flag_to_json(const Flag& flag, const CellSite& site)
{
    Json steps = Json::array();
    for (const auto& s : flag.steps)
        steps.push_back(s.size() == site.size() ? Json("all") : names_of(site, s));
    return {{"schema", kFlagSchema}, {"steps", steps}};
}

CellMap map_from_json(const Json& j)
{
    const std::string where = "map";
    check_object(j, where, {"source", "target", "image"}, {});
    expect_schema(j["source"], kSiteSchema, false);
    expect_schema(j["target"], kSiteSchema, false);
    const CellSite source = site_from_json(j["source"]);
    const CellSite target = site_from_json(j["target"]);
    if (!j["image"].is_object())
        throw SchemaError(where + ": \"image\" maps source cells to target cells");
    std::map<std::string, std::string> table;
    for (const auto& [k, v] : j["image"].items())
        table[k] = as_string(v, where + " image");
    try {
        return map_by_names(source, target, table);
    } catch (const MathError& e) {
        throw SchemaError(where + ": " + e.what());
    }
}

Json map_to_json(const CellMap& f)
{
    Json image = Json::object();
    for (std::size_t c = 0; c < f.image.size(); ++c)
        image[f.source.name(static_cast<int>(c))] = f.target.name(f.image[c]);
    Json s = site_to_json(f.source), t = site_to_json(f.target);
    s.erase("schema");
    t.erase("schema");
    return {{"schema", kMapSchema}, {"source", s}, {"target", t}, {"image", image}};
}

std::vector<SplitSummand> summands_from_json(const Json& j, const CellSite& site)
{
    const std::string where = "summands";
    check_object(j, where, {"summands"}, {});
    std::vector<SplitSummand> out;
    for (const auto& s : get_array(j, "summands", where)) {
        check_object(s, where + " entry", {"level", "complex"}, {});
        expect_schema(s["complex"], kComplexSchema, false);
        out.push_back({complex_from_json(s["complex"], site), static_cast<int>(get_int(s, "level", where))});
    }
    if (out.empty())
        throw SchemaError(where + ": no summands");
    return out;
}

// ------------------------------------------------------------ bookkeeping

MonodromyRep rep_from_json(const Json& j)
{
    const std::string where = "monodromy";
    check_object(j, where, {"rank", "generators"}, {});
    MonodromyRep rep;
    rep.rank = get_int(j, "rank", where);
    for (const auto& g : get_array(j, "generators", where))
        rep.generators.push_back(matrix_from_json(g, rep.rank, rep.rank, where + " generator"));
    try {
        validate_rep(rep);
    } catch (const MathError& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return rep;
}

Json rep_to_json(const MonodromyRep& rep)
{
    Json gens = Json::array();
    for (const auto& g : rep.generators)
        gens.push_back(matrix_to_json(g));
    return {{"schema", kMonodromySchema}, {"rank", rep.rank}, {"generators", gens}};
}

WangInput wang_from_json(const Json& j)
{
    const std::string where = "wang";
    check_object(j, where, {"fiber_betti", "monodromy"}, {});
    WangInput w;
    w.fiber_betti = dims_from_json(j.at("fiber_betti"), where + " fiber_betti");
    const Json& m = j.at("monodromy");
    if (!m.is_object())
        throw SchemaError(where + ": \"monodromy\" must be an object keyed by degree");
    for (const auto& [key, value] : m.items()) {
        int q = 0;
        try {
            std::size_t used = 0;
            q = std::stoi(key, &used);
            if (used != key.size())
                throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw SchemaError(where + ": degree key \"" + key + "\" is not an integer");
        }
        const long b = w.fiber_betti[q];
        w.monodromy[q] = matrix_from_json(value, b, b, where + " monodromy in degree " + key);
    }
    return w;
}

Json wang_to_json(const WangInput& w)
{
    Json m = Json::object();
    for (const auto& [q, t] : w.monodromy)
        m[std::to_string(q)] = matrix_to_json(t);
    return {{"schema", kWangSchema}, {"fiber_betti", dims_to_json(w.fiber_betti)}, {"monodromy", m}};
}

MapStratification stratification_from_json(const Json& j)
{
    const std::string where = "stratification";
    check_object(j, where, {"name", "dim_x", "strata"}, {"dim_y", "generically_finite", "fiber_product_dim"});
    MapStratification ms;
    ms.name = get_string(j, "name", where);
    ms.dim_x = static_cast<int>(get_int(j, "dim_x", where));
    if (j.contains("dim_y"))
        ms.dim_y = static_cast<int>(get_int(j, "dim_y", where));
    ms.generically_finite = get_bool(j, "generically_finite", true, where);
    if (j.contains("fiber_product_dim"))
        ms.fiber_product_dim = static_cast<int>(get_int(j, "fiber_product_dim", where));
    for (const auto& s : get_array(j, "strata", where)) {
        check_object(s, where + " stratum", {"name", "dim_s", "fiber_dim"}, {"components", "monodromy"});
        StratumRecord r;
        r.name = get_string(s, "name", where);
        r.dim_s = static_cast<int>(get_int(s, "dim_s", where));
        r.fiber_dim = static_cast<int>(get_int(s, "fiber_dim", where));
        r.components = s.contains("components") ? get_int(s, "components", where) : 1;
        if (s.contains("monodromy"))
            for (const auto& m : get_array(s, "monodromy", where))
                r.comp_monodromy.push_back(matrix_from_json(m, r.components, r.components, where + " monodromy"));
        ms.strata.push_back(std::move(r));
    }
    try {
        validate_stratification(ms);
    } catch (const MathError& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return ms;
}

Json stratification_to_json(const MapStratification& ms)
{
    Json strata = Json::array();
    for (const auto& s : ms.strata) {
        Json r = {{"name", s.name}, {"dim_s", s.dim_s}, {"fiber_dim", s.fiber_dim}, {"components", s.components}};
        if (!s.comp_monodromy.empty()) {
            Json m = Json::array();
            for (const auto& g : s.comp_monodromy)
                m.push_back(matrix_to_json(g));
            r["monodromy"] = m;
        }
        strata.push_back(r);
    }
    Json j = {{"schema", kStratificationSchema}, {"name", ms.name}, {"dim_x", ms.dim_x}};
    if (ms.dim_y)
        j["dim_y"] = *ms.dim_y;
    j["generically_finite"] = ms.generically_finite;
    if (ms.fiber_product_dim)
        j["fiber_product_dim"] = *ms.fiber_product_dim;
    j["strata"] = strata;
    return j;
}

std::vector<ExceptionalConfig> surface_from_json(const Json& j)
{
    const std::string where = "surface";
    check_object(j, where, {"points"}, {});
    std::vector<ExceptionalConfig> out;
    for (const auto& p : get_array(j, "points", where)) {
        check_object(p, where + " point", {"point", "components", "intersection"}, {});
        ExceptionalConfig c;
        c.point = get_string(p, "point", where);
        c.components = get_int(p, "components", where);
        c.intersection = matrix_from_json(p["intersection"], c.components, c.components, where + " intersection");
        out.push_back(std::move(c));
    }
    return out;
}

Json surface_to_json(const std::vector<ExceptionalConfig>& points)
{
    Json a = Json::array();
    for (const auto& p : points)
        a.push_back({{"point", p.point}, {"components", p.components}, {"intersection", matrix_to_json(p.intersection)}});
    return {{"schema", kSurfaceSchema}, {"points", a}};
}

DTShape shape_from_json(const Json& j)
{
    const std::string where = "dtshape";
    check_object(j, where, {"summands"}, {});
    DTShape shape;
    for (const auto& s : get_array(j, "summands", where)) {
        check_object(s, where + " summand", {"stratum", "local_system", "rank", "multiplicity", "shift"},
                     {"division_dim"});
        shape.summands.push_back({get_string(s, "stratum", where), get_string(s, "local_system", where),
                                  get_int(s, "rank", where), get_int(s, "multiplicity", where),
                                  static_cast<int>(get_int(s, "shift", where)),
                                  s.contains("division_dim") ? get_int(s, "division_dim", where) : 1});
    }
    return shape;
}

Json shape_to_json(const DTShape& shape)
{
    Json a = Json::array();
    for (const auto& s : shape.summands)
        a.push_back({{"stratum", s.stratum},
                     {"local_system", s.local_system},
                     {"rank", s.rank},
                     {"multiplicity", s.multiplicity},
                     {"shift", s.shift},
                     {"division_dim", s.division_dim}});
    return {{"schema", kShapeSchema}, {"summands", a}};
}

FiltrationTable table_from_json(const Json& j)
{
    const std::string where = "filtration";
    check_object(j, where, {"level_lo", "level_hi", "degrees"}, {"normalization"});
    FiltrationTable t;
    t.level_lo = static_cast<int>(get_int(j, "level_lo", where));
    t.level_hi = static_cast<int>(get_int(j, "level_hi", where));
    for (const auto& d : get_array(j, "degrees", where)) {
        check_object(d, where + " degree", {"degree", "total", "dims"}, {});
        const int n = static_cast<int>(get_int(d, "degree", where));
        if (t.totals.count(n))
            throw SchemaError(where + ": degree " + std::to_string(n) + " repeated");
        t.totals[n] = get_int(d, "total", where);
        auto& row = t.dims[n];
        for (const auto& x : get_array(d, "dims", where))
            row.push_back(as_int(x, where + " dims"));
    }
    try {
        t.validate();
    } catch (const MathError& e) {
        throw SchemaError(where + ": " + e.what());
    }
    return t;
}

Json table_to_json(const FiltrationTable& t)
{
    Json degrees = Json::array();
    for (const auto& [n, h] : t.totals) {
        Json dims = Json::array();
        for (int b = t.level_lo; b <= t.level_hi; ++b)
            dims.push_back(t.at(n, b));
        degrees.push_back({{"degree", n}, {"total", h}, {"dims", dims}});
    }
    return {{"schema", kFiltrationSchema}, {"level_lo", t.level_lo}, {"level_hi", t.level_hi}, {"degrees", degrees}};
}

Json perversity_report_to_json(const PerversityReport& r)
{
    auto entries = [](const std::map<int, std::vector<StratumEntry>>& m) {
        Json a = Json::array();
        for (const auto& [deg, list] : m)
            for (const auto& e : list)
                a.push_back({{"degree", deg}, {"stratum", e.stratum}, {"cdim", e.cdim}, {"dim", e.dim}});
        return a;
    };
    return {{"shift", r.shift},
            {"bounds", r.bounds == Bounds::perverse ? "perverse" : "intersection"},
            {"support_ok", r.support_ok},
            {"cosupport_ok", r.cosupport_ok},
            {"stalks", entries(r.stalks)},
            {"costalks", entries(r.costalks)},
            {"violations", r.violations}};
}

}  // namespace perverscope
