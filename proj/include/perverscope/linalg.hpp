#ifndef PERVERSCOPE_LINALG_HPP
#define PERVERSCOPE_LINALG_HPP

#include "perverscope/rational.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace perverscope {

template <class Scalar>
struct Echelon {
    Matrix<Scalar> reduced;             // reduced row echelon form, zero rows trimmed
    std::vector<Eigen::Index> pivots;   // pivot column of each nonzero row
};

/// Gauss-Jordan elimination over an exact field.
template <class Scalar>
Echelon<Scalar> rref(Matrix<Scalar> m)
{
    const Eigen::Index rows = m.rows(), cols = m.cols();
    std::vector<Eigen::Index> pivots;
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        Eigen::Index p = -1;
        for (Eigen::Index i = r; i < rows; ++i)
            if (m(i, c) != 0) {
                p = i;
                break;
            }
        if (p < 0)
            continue;
        if (p != r)
            m.row(p).swap(m.row(r));
        const Scalar inv = Scalar(1) / m(r, c);
        for (Eigen::Index j = c; j < cols; ++j)
            if (m(r, j) != 0)
                m(r, j) *= inv;
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (i == r || m(i, c) == 0)
                continue;
            const Scalar f = m(i, c);
            for (Eigen::Index j = c; j < cols; ++j)
                if (m(r, j) != 0)
                    m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    Echelon<Scalar> e;
    e.reduced = m.topRows(r);
    e.pivots = std::move(pivots);
    return e;
}

template <class Scalar>
Eigen::Index rank(const Matrix<Scalar>& m)
{
    if (m.rows() == 0 || m.cols() == 0)
        return 0;
    return static_cast<Eigen::Index>(rref<Scalar>(m).pivots.size());
}

/// Basis of the null space, one vector per column.
template <class Scalar>
Matrix<Scalar> kernel(const Matrix<Scalar>& m)
{
    const Eigen::Index cols = m.cols();
    if (m.rows() == 0) {
        Matrix<Scalar> id = Matrix<Scalar>::Constant(cols, cols, Scalar(0));
        for (Eigen::Index i = 0; i < cols; ++i)
            id(i, i) = 1;
        return id;
    }
    const auto e = rref<Scalar>(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : e.pivots)
        is_pivot[c] = true;
    const Eigen::Index nfree = cols - static_cast<Eigen::Index>(e.pivots.size());
    Matrix<Scalar> k = Matrix<Scalar>::Constant(cols, nfree, Scalar(0));
    Eigen::Index j = 0;
    for (Eigen::Index c = 0; c < cols; ++c) {
        if (is_pivot[c])
            continue;
        k(c, j) = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r)
            k(e.pivots[r], j) = -e.reduced(static_cast<Eigen::Index>(r), c);
        ++j;
    }
    return k;
}

/// Basis of the column space, chosen among the columns of m.
template <class Scalar>
Matrix<Scalar> column_space(const Matrix<Scalar>& m)
{
    if (m.rows() == 0 || m.cols() == 0)
        return Matrix<Scalar>(m.rows(), 0);
    const auto e = rref<Scalar>(m);
    Matrix<Scalar> out(m.rows(), static_cast<Eigen::Index>(e.pivots.size()));
    for (std::size_t j = 0; j < e.pivots.size(); ++j)
        out.col(static_cast<Eigen::Index>(j)) = m.col(e.pivots[j]);
    return out;
}

template <class Scalar>
Matrix<Scalar> hstack(const Matrix<Scalar>& a, const Matrix<Scalar>& b)
{
    if (a.rows() != b.rows())
        throw MathError("hstack: row count mismatch");
    Matrix<Scalar> out(a.rows(), a.cols() + b.cols());
    if (a.cols())
        out.leftCols(a.cols()) = a;
    if (b.cols())
        out.rightCols(b.cols()) = b;
    return out;
}

template <class Scalar>
Matrix<Scalar> vstack(const Matrix<Scalar>& a, const Matrix<Scalar>& b)
{
    if (a.cols() != b.cols())
        throw MathError("vstack: column count mismatch");
    Matrix<Scalar> out(a.rows() + b.rows(), a.cols());
    if (a.rows())
        out.topRows(a.rows()) = a;
    if (b.rows())
        out.bottomRows(b.rows()) = b;
    return out;
}

/// Dimension of span(a) + span(b).
template <class Scalar>
Eigen::Index sum_dim(const Matrix<Scalar>& a, const Matrix<Scalar>& b)
{
    return rank<Scalar>(hstack<Scalar>(a, b));
}

/// Basis of span(a) ∩ span(b); a and b are given by spanning columns.
template <class Scalar>
Matrix<Scalar> intersection(const Matrix<Scalar>& a, const Matrix<Scalar>& b)
{
    const Matrix<Scalar> ab = column_space<Scalar>(a);
    const Matrix<Scalar> bb = column_space<Scalar>(b);
    if (ab.cols() == 0 || bb.cols() == 0)
        return Matrix<Scalar>(a.rows(), 0);
    Matrix<Scalar> neg = -bb;
    const Matrix<Scalar> k = kernel<Scalar>(hstack<Scalar>(ab, neg));
    return column_space<Scalar>(Matrix<Scalar>(ab * k.topRows(ab.cols())));
}

/// Basis of { x : m x ∈ span(f) }.
template <class Scalar>
Matrix<Scalar> preimage(const Matrix<Scalar>& m, const Matrix<Scalar>& f)
{
    Matrix<Scalar> negf = -f;
    const Matrix<Scalar> k = kernel<Scalar>(hstack<Scalar>(m, negf));
    return column_space<Scalar>(Matrix<Scalar>(k.topRows(m.cols())));
}

/// Solves a x = b exactly; throws when inconsistent.
template <class Scalar>
Matrix<Scalar> solve(const Matrix<Scalar>& a, const Matrix<Scalar>& b)
{
    if (a.rows() != b.rows())
        throw MathError("solve: shape mismatch");
    const auto e = rref<Scalar>(hstack<Scalar>(a, b));
    Matrix<Scalar> x = Matrix<Scalar>::Constant(a.cols(), b.cols(), Scalar(0));
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
        const auto c = e.pivots[r];
        if (c >= a.cols())
            throw MathError("solve: inconsistent system");
        x.row(c) = e.reduced.block(static_cast<Eigen::Index>(r), a.cols(), 1, b.cols());
    }
    return x;
}

template <class Scalar>
Matrix<Scalar> inverse(const Matrix<Scalar>& a)
{
    if (a.rows() != a.cols())
        throw MathError("inverse: matrix not square");
    Matrix<Scalar> id = Matrix<Scalar>::Constant(a.rows(), a.rows(), Scalar(0));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        id(i, i) = 1;
    if (rank<Scalar>(a) != a.rows())
        throw MathError("inverse: singular matrix");
    return solve<Scalar>(a, id);
}

/// Determinant by fraction-exact elimination.
template <class Scalar>
Scalar determinant(Matrix<Scalar> m)
{
    if (m.rows() != m.cols())
        throw MathError("determinant: matrix not square");
    const Eigen::Index n = m.rows();
    Scalar det = 1;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = -1;
        for (Eigen::Index i = c; i < n; ++i)
            if (m(i, c) != 0) {
                p = i;
                break;
            }
        if (p < 0)
            return Scalar(0);
        if (p != c) {
            m.row(p).swap(m.row(c));
            det = -det;
        }
        det *= m(c, c);
        for (Eigen::Index i = c + 1; i < n; ++i) {
            if (m(i, c) == 0)
                continue;
            const Scalar f = m(i, c) / m(c, c);
            for (Eigen::Index j = c; j < n; ++j)
                m(i, j) -= f * m(c, j);
        }
    }
    return det;
}

/// Leading principal minors det(m[0..k, 0..k]) for k = 1..n.
template <class Scalar>
std::vector<Scalar> leading_minors(const Matrix<Scalar>& m)
{
    std::vector<Scalar> out;
    for (Eigen::Index k = 1; k <= m.rows(); ++k)
        out.push_back(determinant<Scalar>(m.topLeftCorner(k, k)));
    return out;
}

// ---------------------------------------------------------------------------
// Sparse elimination.  Rows are kept as sorted (column, value) lists and
// bucketed by leading column; the shortest row in a bucket becomes the pivot.

template <class Scalar>
using SparseRow = std::vector<std::pair<int, Scalar>>;

template <class Scalar>
SparseRow<Scalar> axpy_row(const SparseRow<Scalar>& x, const Scalar& f, const SparseRow<Scalar>& y)
{
    // returns x + f * y
    SparseRow<Scalar> out;
    out.reserve(x.size() + y.size());
    std::size_t i = 0, j = 0;
    while (i < x.size() || j < y.size()) {
        if (j == y.size() || (i < x.size() && x[i].first < y[j].first)) {
            out.push_back(x[i++]);
        } else if (i == x.size() || y[j].first < x[i].first) {
            out.emplace_back(y[j].first, f * y[j].second);
            ++j;
        } else {
            Scalar v = x[i].second + f * y[j].second;
            if (v != 0)
                out.emplace_back(x[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

/// Row echelon form of a sparse matrix given by rows.
template <class Scalar>
std::vector<SparseRow<Scalar>> sparse_echelon(std::vector<SparseRow<Scalar>> rows)
{
    std::map<int, std::vector<SparseRow<Scalar>>> buckets;
    for (auto& r : rows)
        if (!r.empty())
            buckets[r.front().first].push_back(std::move(r));
    std::vector<SparseRow<Scalar>> out;
    while (!buckets.empty()) {
        auto it = buckets.begin();
        auto bucket = std::move(it->second);
        buckets.erase(it);
        std::size_t best = 0;
        for (std::size_t i = 1; i < bucket.size(); ++i)
            if (bucket[i].size() < bucket[best].size())
                best = i;
        std::swap(bucket[best], bucket.back());
        SparseRow<Scalar> pivot = std::move(bucket.back());
        bucket.pop_back();
        const Scalar inv = Scalar(1) / pivot.front().second;
        for (auto& r : bucket) {
            const Scalar f = -r.front().second * inv;
            SparseRow<Scalar> reduced = axpy_row<Scalar>(r, f, pivot);
            if (!reduced.empty())
                buckets[reduced.front().first].push_back(std::move(reduced));
        }
        out.push_back(std::move(pivot));
    }
    return out;
}

template <class Scalar>
std::vector<SparseRow<Scalar>> sparse_rows(const Eigen::SparseMatrix<Scalar>& m)
{
    std::vector<SparseRow<Scalar>> rows(static_cast<std::size_t>(m.rows()));
    for (int k = 0; k < m.outerSize(); ++k)
        for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(m, k); it; ++it)
            if (it.value() != 0)
                rows[static_cast<std::size_t>(it.row())].emplace_back(static_cast<int>(it.col()),
                                                                      it.value());
    for (auto& r : rows)
        std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return rows;
}

template <class Scalar>
Eigen::Index sparse_rank(const Eigen::SparseMatrix<Scalar>& m)
{
    if (m.rows() == 0 || m.cols() == 0)
        return 0;
    // eliminate along the shorter side
    if (m.rows() > m.cols()) {
        Eigen::SparseMatrix<Scalar> t = m.transpose();
        return static_cast<Eigen::Index>(sparse_echelon<Scalar>(sparse_rows<Scalar>(t)).size());
    }
    return static_cast<Eigen::Index>(sparse_echelon<Scalar>(sparse_rows<Scalar>(m)).size());
}

}  // namespace perverscope

#endif
