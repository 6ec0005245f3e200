#include "perverscope/models.hpp"
#include "perverscope/rational.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <tuple>

namespace perverscope {

CellSite interval_site()
{
    CellSite s;
    s.add_cell("v0", 0);
    s.add_cell("v1", 0);
    s.add_cell("e", 1);
    s.add_cover("v0", "e", -1);
    s.add_cover("v1", "e", 1);
    s.compact = true;
    return s;
}

CellSite circle_site(int m)
{
    if (m < 2)
        throw MathError("circle_site: a regular cell structure needs at least two vertices");
    CellSite s;
    for (int i = 0; i < m; ++i)
        s.add_cell("v" + std::to_string(i), 0);
    for (int i = 0; i < m; ++i)
        s.add_cell("e" + std::to_string(i), 1);
    for (int i = 0; i < m; ++i) {
        s.add_cover("v" + std::to_string(i), "e" + std::to_string(i), -1);
        s.add_cover("v" + std::to_string((i + 1) % m), "e" + std::to_string(i), 1);
    }
    s.compact = true;
    return s;
}

CellSite sphere_site(int n)
{
    if (n < 0)
        throw MathError("sphere_site: negative dimension");
    CellSite s;
    auto nm = [](int k, int i) { return "s" + std::to_string(k) + "." + std::to_string(i); };
    for (int k = 0; k <= n; ++k)
        for (int i = 0; i < 2; ++i)
            s.add_cell(nm(k, i), k);
    for (int k = 1; k <= n; ++k)
        for (int i = 0; i < 2; ++i) {
            s.add_cover(nm(k - 1, 0), nm(k, i), 1);
            s.add_cover(nm(k - 1, 1), nm(k, i), -1);
        }
    s.compact = true;
    return s;
}

CellSite product_site(const CellSite& a, const CellSite& b)
{
    CellSite s;
    const int nb = static_cast<int>(b.size());
    auto id = [nb](int x, int y) { return x * nb + y; };
    for (int x = 0; x < static_cast<int>(a.size()); ++x)
        for (int y = 0; y < nb; ++y)
            s.add_cell(a.name(x) + "|" + b.name(y), a.dim(x) + b.dim(y));
    for (const auto& cv : a.covers())
        for (int y = 0; y < nb; ++y)
            s.add_cover(id(cv.face, y), id(cv.coface, y), cv.sign);
    for (int x = 0; x < static_cast<int>(a.size()); ++x)
        for (const auto& cv : b.covers())
            s.add_cover(id(x, cv.face), id(x, cv.coface), (a.dim(x) % 2 == 0 ? 1 : -1) * cv.sign);
    for (const auto& sa : a.stratum_names())
        for (const auto& sb : b.stratum_names()) {
            CellSet cells;
            for (int x : a.stratum_cells(sa))
                for (int y : b.stratum_cells(sb))
                    cells.push_back(id(x, y));
            s.set_stratum(sa + "|" + sb, cells, a.stratum_cdim(sa) + b.stratum_cdim(sb));
        }
    s.compact = a.compact && b.compact;
    return s;
}

CellSite prefixed(const CellSite& site, const std::string& prefix)
{
    CellSite s;
    for (int c = 0; c < static_cast<int>(site.size()); ++c)
        s.add_cell(prefix + site.name(c), site.dim(c));
    for (const auto& cv : site.covers())
        s.add_cover(cv.face, cv.coface, cv.sign);
    for (const auto& st : site.stratum_names())
        s.set_stratum(st, site.stratum_cells(st), site.stratum_cdim(st));
    s.compact = site.compact;
    s.affine = site.affine;
    return s;
}

CellSite disjoint_union(const CellSite& a, const CellSite& b)
{
    CellSite s = a;
    const int off = static_cast<int>(a.size());
    for (int c = 0; c < static_cast<int>(b.size()); ++c)
        s.add_cell(b.name(c), b.dim(c));
    for (const auto& cv : b.covers())
        s.add_cover(cv.face + off, cv.coface + off, cv.sign);
    s.clear_strata();
    std::vector<std::string> names = a.stratum_names();
    for (const auto& st : b.stratum_names())
        if (std::find(names.begin(), names.end(), st) == names.end())
            names.push_back(st);
    for (const auto& st : names) {
        CellSet cells;
        int cdim = -1;
        if (std::find(a.stratum_names().begin(), a.stratum_names().end(), st) != a.stratum_names().end()) {
            cells = a.stratum_cells(st);
            cdim = a.stratum_cdim(st);
        }
        if (std::find(b.stratum_names().begin(), b.stratum_names().end(), st) != b.stratum_names().end()) {
            if (cdim >= 0 && cdim != b.stratum_cdim(st))
                throw MathError("disjoint_union: stratum \"" + st + "\" has two complex dimensions");
            cdim = b.stratum_cdim(st);
            for (int c : b.stratum_cells(st))
                cells.push_back(c + off);
        }
        s.set_stratum(st, cells, cdim);
    }
    s.compact = a.compact && b.compact;
    return s;
}

CellSite connected_sum(const CellSite& a, const std::string& top_a, const CellSite& b,
                       const std::string& top_b, const std::map<std::string, std::string>& iso)
{
    const int ta = a.index(top_a), tb = b.index(top_b);
    if (a.dim(ta) != b.dim(tb) || !a.cofaces(ta).empty() || !b.cofaces(tb).empty())
        throw MathError("connected_sum: the removed cells must be top cells of equal dimension");
    CellSet ba = down_closure(a, {ta}), bb = down_closure(b, {tb});
    ba.erase(std::find(ba.begin(), ba.end(), ta));
    bb.erase(std::find(bb.begin(), bb.end(), tb));
    if (iso.size() != bb.size())
        throw MathError("connected_sum: identification must cover the whole boundary");
    std::map<int, int> phi;  // b index -> a index
    std::set<int> hit;
    for (const auto& [x, y] : iso) {
        const int bx = b.index(x), ay = a.index(y);
        if (!std::binary_search(bb.begin(), bb.end(), bx) || !std::binary_search(ba.begin(), ba.end(), ay))
            throw MathError("connected_sum: identification leaves the boundary at \"" + x + "\"");
        if (b.dim(bx) != a.dim(ay) || !hit.insert(ay).second)
            throw MathError("connected_sum: identification is not a bijection of cells");
        phi[bx] = ay;
    }
    for (const auto& cv : b.covers()) {
        if (!phi.count(cv.face) || !phi.count(cv.coface))
            continue;
        bool ok = false;
        for (const auto& [f, s] : a.faces(phi[cv.coface]))
            if (f == phi[cv.face] && s == cv.sign)
                ok = true;
        if (!ok)
            throw MathError("connected_sum: identification does not preserve incidences");
    }

    CellSite s;
    std::vector<int> from_a(a.size(), -1), from_b(b.size(), -1);
    for (int c = 0; c < static_cast<int>(a.size()); ++c)
        if (c != ta)
            from_a[static_cast<std::size_t>(c)] = s.add_cell(a.name(c), a.dim(c));
    for (int c = 0; c < static_cast<int>(b.size()); ++c) {
        if (c == tb)
            continue;
        auto it = phi.find(c);
        from_b[static_cast<std::size_t>(c)] = it != phi.end() ? from_a[static_cast<std::size_t>(it->second)]
                                                              : s.add_cell(b.name(c), b.dim(c));
    }
    for (const auto& cv : a.covers())
        if (cv.coface != ta)
            s.add_cover(from_a[static_cast<std::size_t>(cv.face)], from_a[static_cast<std::size_t>(cv.coface)],
                        cv.sign);
    for (const auto& cv : b.covers())
        if (cv.coface != tb && !(phi.count(cv.face) && phi.count(cv.coface)))
            s.add_cover(from_b[static_cast<std::size_t>(cv.face)], from_b[static_cast<std::size_t>(cv.coface)],
                        cv.sign);
    s.compact = a.compact && b.compact;
    return s;
}

CellSite link_site(int b)
{
    if (b < 0)
        throw MathError("link_site: negative Betti number");
    if (b == 0)
        return sphere_site(3);
    const CellSite base = product_site(sphere_site(1), sphere_site(2));
    std::vector<std::string> tops;
    for (int c = 0; c < static_cast<int>(base.size()); ++c)
        if (base.dim(c) == 3)
            tops.push_back(base.name(c));

    CellSite m = prefixed(base, "1:");
    std::map<std::string, std::string> alias;  // copy-prefixed name -> name in m
    for (int c = 0; c < static_cast<int>(base.size()); ++c)
        alias["1:" + base.name(c)] = "1:" + base.name(c);
    std::deque<std::pair<int, std::string>> free_tops;  // (copy, base top name)
    for (const auto& t : tops)
        free_tops.emplace_back(1, t);

    for (int k = 2; k <= b; ++k) {
        const auto [copy, top] = free_tops.front();
        free_tops.pop_front();
        const std::string pk = std::to_string(k) + ":", pc = std::to_string(copy) + ":";
        CellSite fresh = prefixed(base, pk);
        CellSet bd = down_closure(base, {base.index(top)});
        std::map<std::string, std::string> iso;
        for (int c : bd)
            if (base.name(c) != top)
                iso[pk + base.name(c)] = alias.at(pc + base.name(c));
        m = connected_sum(m, pc + top, fresh, pk + top, iso);
        for (int c = 0; c < static_cast<int>(base.size()); ++c) {
            const std::string n = pk + base.name(c);
            alias[n] = iso.count(n) ? iso[n] : n;
        }
        for (const auto& t : tops)
            if (t != top)
                free_tops.emplace_back(k, t);
    }
    return m;
}

CellSite closed_cone_site(const CellSite& link)
{
    CellSite s;
    const int o = s.add_cell("o", 0);
    const int n = static_cast<int>(link.size());
    for (int c = 0; c < n; ++c)
        s.add_cell("b:" + link.name(c), link.dim(c));
    for (int c = 0; c < n; ++c)
        s.add_cell("c:" + link.name(c), link.dim(c) + 1);
    auto b = [](int c) { return 1 + c; };
    auto cc = [n](int c) { return 1 + n + c; };
    for (const auto& cv : link.covers()) {
        s.add_cover(b(cv.face), b(cv.coface), cv.sign);
        s.add_cover(cc(cv.face), cc(cv.coface), -cv.sign);
    }
    for (int c = 0; c < n; ++c) {
        s.add_cover(b(c), cc(c), 1);
        if (link.dim(c) == 0)
            s.add_cover(o, cc(c), -1);
    }
    s.compact = link.compact;
    return s;
}

namespace {

OpenModel make_open(CellSite ambient, const CellSet& open)
{
    OpenModel m{std::move(ambient), open, {}};
    m.site = subsite(m.ambient, open);
    return m;
}

void two_strata(CellSite& site, const std::string& point_name, const CellSet& point, int cdim)
{
    site.clear_strata();
    site.set_stratum(point_name, point, 0);
    site.set_stratum("generic", set_difference(all_cells(site), point), cdim);
}

CellSite closed_disk()
{
    CellSite s;
    for (const char* v : {"p", "q", "t", "u"})
        s.add_cell(v, 0);
    const std::vector<std::tuple<const char*, const char*, const char*>> edges = {
        {"e", "p", "q"}, {"a1", "p", "t"}, {"a2", "p", "u"}, {"a3", "q", "t"},
        {"a4", "q", "u"}, {"bl", "t", "u"}, {"br", "t", "u"}};
    for (const auto& [e, from, to] : edges) {
        s.add_cell(e, 1);
        s.add_cover(from, e, -1);
        s.add_cover(to, e, 1);
    }
    // boundary cycles: (edge, sign) going around each triangle
    const std::vector<std::pair<const char*, std::vector<std::pair<const char*, int>>>> faces = {
        {"top", {{"e", 1}, {"a3", 1}, {"a1", -1}}},
        {"bottom", {{"e", 1}, {"a4", 1}, {"a2", -1}}},
        {"left", {{"a1", 1}, {"bl", 1}, {"a2", -1}}},
        {"right", {{"a3", 1}, {"br", 1}, {"a4", -1}}}};
    for (const auto& [f, bd] : faces) {
        s.add_cell(f, 2);
        for (const auto& [e, sign] : bd)
            s.add_cover(e, f, sign);
    }
    s.compact = true;
    return s;
}

CellSet open_disk_cells(const CellSite& disk, const std::string& prefix)
{
    return cells_by_name(disk, {prefix + "p", prefix + "q", prefix + "e", prefix + "a1", prefix + "a2",
                                      prefix + "a3", prefix + "a4", prefix + "top", prefix + "bottom",
                                      prefix + "left", prefix + "right"});
}

}  // namespace

OpenModel cone_model(int b)
{
    CellSite ambient = closed_cone_site(link_site(b));
    CellSet open;
    for (int c = 0; c < static_cast<int>(ambient.size()); ++c)
        if (ambient.name(c) == "o" || ambient.name(c).rfind("c:", 0) == 0)
            open.push_back(c);
    OpenModel m = make_open(std::move(ambient), open);
    m.site.clear_strata();
    m.site.set_stratum("o", {m.site.index("o")}, 0);
    m.site.set_stratum("smooth", set_difference(all_cells(m.site), {m.site.index("o")}), 2);
    m.site.affine = true;
    return m;
}

OpenModel disk_model()
{
    CellSite ambient = closed_disk();
    CellSet open = open_disk_cells(ambient, "");
    OpenModel m = make_open(std::move(ambient), open);
    two_strata(m.site, "p", {m.site.index("p")}, 1);
    m.site.affine = true;
    return m;
}

OpenModel plane_model()
{
    const CellSite d = closed_disk();
    const CellSet od = open_disk_cells(d, "");
    CellSite ambient = product_site(d, d);
    CellSet open;
    for (int x : od)
        for (int y : od)
            open.push_back(x * static_cast<int>(d.size()) + y);
    std::sort(open.begin(), open.end());
    OpenModel m = make_open(std::move(ambient), open);
    m.site.clear_strata();
    const int origin = m.site.index("p|p");
    m.site.set_stratum("origin", {origin}, 0);
    m.site.set_stratum("generic", set_difference(all_cells(m.site), {origin}), 2);
    m.site.affine = true;
    return m;
}

OpenModel nodal_model()
{
    const CellSite d = closed_disk();
    CellSite ambient;
    ambient.add_cell("node", 0);
    for (const std::string pre : {"1:", "2:"})
        for (int c = 0; c < static_cast<int>(d.size()); ++c)
            if (d.name(c) != "p")
                ambient.add_cell(pre + d.name(c), d.dim(c));
    for (const std::string pre : {"1:", "2:"})
        for (const auto& cv : d.covers()) {
            const std::string f = d.name(cv.face) == "p" ? "node" : pre + d.name(cv.face);
            ambient.add_cover(f, pre + d.name(cv.coface), cv.sign);
        }
    ambient.compact = true;
    CellSet open = {ambient.index("node")};
    for (const std::string pre : {"1:", "2:"})
        for (const char* n : {"q", "e", "a1", "a2", "a3", "a4", "top", "bottom", "left", "right"})
            open.push_back(ambient.index(pre + n));
    std::sort(open.begin(), open.end());
    OpenModel m = make_open(std::move(ambient), open);
    two_strata(m.site, "node", {m.site.index("node")}, 1);
    m.site.affine = true;
    return m;
}

CellMap normalization_map()
{
    const CellSite d = closed_disk();
    CellSite two = disjoint_union(prefixed(d, "1:"), prefixed(d, "2:"));
    CellSet open = open_disk_cells(two, "1:");
    for (int c : open_disk_cells(two, "2:"))
        open.push_back(c);
    std::sort(open.begin(), open.end());
    CellSite source = subsite(two, open);
    two_strata(source, "centres", cells_by_name(source, {"1:p", "2:p"}), 1);
    source.affine = true;
    OpenModel target = nodal_model();
    std::map<std::string, std::string> table;
    for (int c = 0; c < static_cast<int>(source.size()); ++c) {
        const std::string& n = source.name(c);
        table[n] = (n == "1:p" || n == "2:p") ? "node" : n;
    }
    return map_by_names(source, target.site, table);
}

CellSite projective_line_site()
{
    CellSite s = sphere_site(2);
    two_strata(s, "a", {s.index("s0.0")}, 1);
    return s;
}

CellMap cyclic_cover_map(int n)
{
    if (n < 1)
        throw MathError("cyclic_cover_map: n must be positive");
    CellSite up = circle_site(2 * n), down = circle_site(2);
    std::map<std::string, std::string> table;
    for (int i = 0; i < 2 * n; ++i) {
        table["v" + std::to_string(i)] = "v" + std::to_string(i % 2);
        table["e" + std::to_string(i)] = "e" + std::to_string(i % 2);
    }
    return map_by_names(up, down, table);
}

CellMap circle_projection_map()
{
    CellSite c = circle_site(2);
    CellSite x = product_site(c, interval_site());
    std::map<std::string, std::string> table;
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
        const std::string& n = x.name(i);
        table[n] = n.substr(0, n.find('|'));
    }
    return map_by_names(x, c, table);
}

}  // namespace perverscope
