#include "perverscope/cellsite.hpp"
#include "perverscope/rational.hpp"

#include <algorithm>
#include <set>

namespace perverscope {

int CellSite::add_cell(const std::string& name, int dim)
{
    if (index_.count(name))
        throw MathError("duplicate cell id \"" + name + "\"");
    if (dim < 0)
        throw MathError("negative dimension for cell \"" + name + "\"");
    const int id = static_cast<int>(names_.size());
    names_.push_back(name);
    dims_.push_back(dim);
    index_[name] = id;
    faces_.emplace_back();
    cofaces_.emplace_back();
    cell_stratum_.emplace_back();
    order_ready_ = false;
    return id;
}

void CellSite::add_cover(int face, int coface, int sign)
{
    if (face < 0 || coface < 0 || face >= static_cast<int>(size()) || coface >= static_cast<int>(size()))
        throw MathError("cover refers to an unknown cell");
    covers_.push_back({face, coface, sign});
    faces_[static_cast<std::size_t>(coface)].emplace_back(face, sign);
    cofaces_[static_cast<std::size_t>(face)].emplace_back(coface, sign);
    order_ready_ = false;
}

void CellSite::add_cover(const std::string& face, const std::string& coface, int sign)
{
    add_cover(index(face), index(coface), sign);
}

void CellSite::set_stratum(const std::string& name, const CellSet& cells, int cdim)
{
    if (cdim < 0)
        throw MathError("stratum \"" + name + "\" has negative complex dimension");
    if (strata_.count(name)) {
        for (int c : strata_[name])
            cell_stratum_[static_cast<std::size_t>(c)].clear();
    } else {
        stratum_names_.push_back(name);
    }
    CellSet sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    for (int c : sorted) {
        auto& s = cell_stratum_.at(static_cast<std::size_t>(c));
        if (!s.empty() && s != name)
            throw MathError("cell \"" + names_[static_cast<std::size_t>(c)] + "\" is in strata \"" + s +
                            "\" and \"" + name + "\"");
        s = name;
    }
    strata_[name] = sorted;
    strat_cdim_[name] = cdim;
}

void CellSite::clear_strata()
{
    stratum_names_.clear();
    strata_.clear();
    strat_cdim_.clear();
    for (auto& s : cell_stratum_)
        s.clear();
}

int CellSite::max_dim() const
{
    int m = -1;
    for (int d : dims_)
        m = std::max(m, d);
    return m;
}

int CellSite::index(const std::string& name) const
{
    auto it = index_.find(name);
    if (it == index_.end())
        throw MathError("unknown cell id \"" + name + "\"");
    return it->second;
}

const std::vector<std::pair<int, int>>& CellSite::faces(int c) const
{
    return faces_.at(static_cast<std::size_t>(c));
}

const std::vector<std::pair<int, int>>& CellSite::cofaces(int c) const
{
    return cofaces_.at(static_cast<std::size_t>(c));
}

void CellSite::ensure_order() const
{
    if (order_ready_)
        return;
    const std::size_t n = size();
    up_.assign(n, std::vector<bool>(n, false));
    // Covers raise dimension by one on valid sites; fall back to a fixpoint otherwise.
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dims_[a] > dims_[b]; });
    bool changed = true;
    for (std::size_t i = 0; i < n; ++i)
        up_[i][i] = true;
    for (int pass = 0; changed && pass < static_cast<int>(n) + 1; ++pass) {
        changed = false;
        for (int c : order)
            for (const auto& [cf, s] : cofaces_[static_cast<std::size_t>(c)]) {
                auto& row = up_[static_cast<std::size_t>(c)];
                const auto& other = up_[static_cast<std::size_t>(cf)];
                for (std::size_t k = 0; k < n; ++k)
                    if (other[k] && !row[k]) {
                        row[k] = true;
                        changed = true;
                    }
            }
    }
    order_ready_ = true;
}

bool CellSite::leq(int a, int b) const
{
    ensure_order();
    return up_.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b));
}

std::vector<int> CellSite::top_down_order() const
{
    std::vector<int> order(size());
    for (std::size_t i = 0; i < size(); ++i)
        order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dims_[a] > dims_[b]; });
    return order;
}

const CellSet& CellSite::stratum_cells(const std::string& s) const
{
    auto it = strata_.find(s);
    if (it == strata_.end())
        throw MathError("unknown stratum \"" + s + "\"");
    return it->second;
}

int CellSite::stratum_cdim(const std::string& s) const
{
    auto it = strat_cdim_.find(s);
    if (it == strat_cdim_.end())
        throw MathError("unknown stratum \"" + s + "\"");
    return it->second;
}

const std::string& CellSite::stratum_of(int c) const
{
    return cell_stratum_.at(static_cast<std::size_t>(c));
}

// ------------------------------------------------------------------ checks

std::vector<Violation> verify_site(const CellSite& site)
{
    std::vector<Violation> out;
    const int n = static_cast<int>(site.size());
    std::set<std::pair<int, int>> seen;
    for (const auto& cv : site.covers()) {
        if (site.dim(cv.coface) != site.dim(cv.face) + 1)
            out.push_back({"dimension", "cover does not raise dimension by one",
                           {site.name(cv.face), site.name(cv.coface)}});
        if (cv.sign != 1 && cv.sign != -1)
            out.push_back({"sign", "incidence sign must be +1 or -1",
                           {site.name(cv.face), site.name(cv.coface)}});
        if (!seen.insert({cv.face, cv.coface}).second)
            out.push_back({"duplicate", "cover listed twice", {site.name(cv.face), site.name(cv.coface)}});
    }
    if (!out.empty())
        return out;

    // σ < τ with dim τ = dim σ + 2: Σ ε(σ,ρ) ε(ρ,τ) = 0
    for (int t = 0; t < n; ++t) {
        std::map<int, int> sums;
        for (const auto& [r, s1] : site.faces(t))
            for (const auto& [s, s2] : site.faces(r))
                sums[s] += s1 * s2;
        for (const auto& [s, total] : sums)
            if (total != 0)
                out.push_back({"sign-condition",
                               "diamond sum is " + std::to_string(total) + " instead of 0",
                               {site.name(s), site.name(t)}});
    }

    // strata
    std::vector<int> assigned(static_cast<std::size_t>(n), 0);
    for (const auto& s : site.stratum_names()) {
        const auto& cells = site.stratum_cells(s);
        for (int c : cells)
            ++assigned[static_cast<std::size_t>(c)];
        if (!is_locally_closed(site, cells))
            out.push_back({"locally-closed", "stratum \"" + s + "\" is not locally closed", {}});
    }
    if (!site.stratum_names().empty()) {
        Violation v{"partition", "cells not covered by exactly one stratum", {}};
        for (int c = 0; c < n; ++c)
            if (assigned[static_cast<std::size_t>(c)] != 1)
                v.cells.push_back(site.name(c));
        if (!v.cells.empty())
            out.push_back(v);
    }

    if (site.compact) {
        // closed cells: two vertices per edge with opposite signs, spherical boundaries
        for (int c = 0; c < n; ++c) {
            if (site.dim(c) == 1) {
                const auto& f = site.faces(c);
                if (f.size() != 2 || f[0].second + f[1].second != 0)
                    out.push_back({"edge", "edge needs two vertices with opposite signs", {site.name(c)}});
            }
            if (site.dim(c) > 0 && site.faces(c).empty())
                out.push_back({"boundary", "cell of positive dimension without faces", {site.name(c)}});
            long chi = 0;
            for (int b = 0; b < n; ++b)
                if (b != c && site.leq(b, c))
                    chi += (site.dim(b) % 2 == 0) ? 1 : -1;
            const int p = site.dim(c);
            const long sphere = p == 0 ? 0 : 1 + ((p - 1) % 2 == 0 ? 1 : -1);
            if (chi != sphere)
                out.push_back({"boundary", "boundary Euler characteristic " + std::to_string(chi) +
                                               " differs from that of a sphere",
                               {site.name(c)}});
        }
    }
    return out;
}

// -------------------------------------------------------------- cell sets

CellSet all_cells(const CellSite& site)
{
    CellSet s(site.size());
    for (std::size_t i = 0; i < site.size(); ++i)
        s[i] = static_cast<int>(i);
    return s;
}

CellSet open_star(const CellSite& site, int cell)
{
    if (cell < 0 || cell >= static_cast<int>(site.size()))
        throw MathError("open_star: unknown cell");
    CellSet s;
    for (int c = 0; c < static_cast<int>(site.size()); ++c)
        if (site.leq(cell, c))
            s.push_back(c);
    return s;
}

CellSet open_star(const CellSite& site, const std::string& cell) { return open_star(site, site.index(cell)); }

CellSet up_closure(const CellSite& site, const CellSet& cells)
{
    CellSet s;
    for (int c = 0; c < static_cast<int>(site.size()); ++c)
        for (int a : cells)
            if (site.leq(a, c)) {
                s.push_back(c);
                break;
            }
    return s;
}

CellSet down_closure(const CellSite& site, const CellSet& cells)
{
    CellSet s;
    for (int c = 0; c < static_cast<int>(site.size()); ++c)
        for (int a : cells)
            if (site.leq(c, a)) {
                s.push_back(c);
                break;
            }
    return s;
}

bool is_up_closed(const CellSite& site, const CellSet& cells)
{
    CellSet sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    return up_closure(site, sorted) == sorted;
}

bool is_down_closed(const CellSite& site, const CellSet& cells)
{
    CellSet sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    return down_closure(site, sorted) == sorted;
}

bool is_locally_closed(const CellSite& site, const CellSet& cells)
{
    CellSet sorted = cells;
    std::sort(sorted.begin(), sorted.end());
    return set_intersection(up_closure(site, sorted), down_closure(site, sorted)) == sorted;
}

CellSet closed_complement(const CellSite& site, const CellSet& open)
{
    if (!is_up_closed(site, open))
        throw MathError("closed_complement: the given set is not up-closed");
    CellSet sorted = open;
    std::sort(sorted.begin(), sorted.end());
    return set_difference(all_cells(site), sorted);
}

CellSet set_difference(const CellSet& a, const CellSet& b)
{
    CellSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

CellSet set_intersection(const CellSet& a, const CellSet& b)
{
    CellSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

CellSet cells_by_name(const CellSite& site, const std::vector<std::string>& names)
{
    CellSet s;
    for (const auto& n : names)
        s.push_back(site.index(n));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

CellSite subsite(const CellSite& site, const CellSet& cells, std::vector<int>* parent)
{
    CellSite sub;
    std::vector<int> local(site.size(), -1);
    for (int c : cells) {
        local[static_cast<std::size_t>(c)] = sub.add_cell(site.name(c), site.dim(c));
        if (parent)
            parent->push_back(c);
    }
    for (const auto& cv : site.covers())
        if (local[static_cast<std::size_t>(cv.face)] >= 0 && local[static_cast<std::size_t>(cv.coface)] >= 0)
            sub.add_cover(local[static_cast<std::size_t>(cv.face)], local[static_cast<std::size_t>(cv.coface)],
                          cv.sign);
    for (const auto& s : site.stratum_names()) {
        CellSet part;
        for (int c : site.stratum_cells(s))
            if (local[static_cast<std::size_t>(c)] >= 0)
                part.push_back(local[static_cast<std::size_t>(c)]);
        if (!part.empty())
            sub.set_stratum(s, part, site.stratum_cdim(s));
    }
    if (site.has_compactification() && is_up_closed(site, cells))
        sub.open_in_compact = true;
    if (cells.size() == site.size())
        sub.compact = site.compact;
    return sub;
}

void validate_map(const CellMap& f)
{
    if (f.image.size() != f.source.size())
        throw MathError("cellular map: image table has wrong length");
    for (int t : f.image)
        if (t < 0 || t >= static_cast<int>(f.target.size()))
            throw MathError("cellular map: image outside the target");
    for (const auto& cv : f.source.covers())
        if (!f.target.leq(f.image[static_cast<std::size_t>(cv.face)], f.image[static_cast<std::size_t>(cv.coface)]))
            throw MathError("cellular map is not monotone at \"" + f.source.name(cv.face) + "\" < \"" +
                            f.source.name(cv.coface) + "\"");
}

CellSet preimage(const CellMap& f, const CellSet& cells)
{
    std::vector<bool> in(f.target.size(), false);
    for (int c : cells)
        in[static_cast<std::size_t>(c)] = true;
    CellSet out;
    for (std::size_t s = 0; s < f.image.size(); ++s)
        if (in[static_cast<std::size_t>(f.image[s])])
            out.push_back(static_cast<int>(s));
    return out;
}

CellMap identity_map(const CellSite& site)
{
    return CellMap{site, site, all_cells(site)};
}

CellMap map_by_names(const CellSite& source, const CellSite& target,
                     const std::map<std::string, std::string>& table)
{
    CellMap f{source, target, std::vector<int>(source.size(), -1)};
    for (const auto& [a, b] : table)
        f.image[static_cast<std::size_t>(source.index(a))] = target.index(b);
    for (std::size_t c = 0; c < source.size(); ++c)
        if (f.image[c] < 0)
            throw MathError("cellular map: no image for \"" + source.name(static_cast<int>(c)) + "\"");
    validate_map(f);
    return f;
}

Flag pull_flag(const CellMap& f, const Flag& flag)
{
    Flag out;
    for (const auto& s : flag.steps)
        out.steps.push_back(preimage(f, s));
    return out;
}

Flag skeleton_flag(const CellSite& site)
{
    Flag f;
    const int top = site.max_dim();
    for (int k = 0; k <= top + 1; ++k) {
        CellSet s;
        for (int c = 0; c < static_cast<int>(site.size()); ++c)
            if (site.dim(c) <= top - k)
                s.push_back(c);
        f.steps.push_back(s);
    }
    return f;
}

void validate_flag(const CellSite& site, const Flag& flag)
{
    if (flag.steps.empty() || flag.steps.front() != all_cells(site))
        throw MathError("flag: first step must be the whole site");
    for (std::size_t k = 0; k < flag.steps.size(); ++k) {
        const auto& s = flag.steps[k];
        if (!std::is_sorted(s.begin(), s.end()))
            throw MathError("flag: step " + std::to_string(k) + " is not sorted");
        if (!is_down_closed(site, s))
            throw MathError("flag: step " + std::to_string(k) + " is not closed");
        if (k > 0 && set_intersection(s, flag.steps[k - 1]) != s)
            throw MathError("flag: step " + std::to_string(k) + " is not contained in the previous step");
    }
}

}  // namespace perverscope
