#ifndef PERVERSCOPE_RATIONAL_HPP
#define PERVERSCOPE_RATIONAL_HPP

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

namespace perverscope {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RationalMatrix = Matrix<Rational>;
using RationalVector = Vector<Rational>;
using SparseRationalMatrix = Eigen::SparseMatrix<Rational, Eigen::ColMajor>;

/// Thrown for malformed mathematical input (shape mismatch, broken invariants).
struct MathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when an input document does not match its schema.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses "p", "-p" or "p/q"; the result is in lowest terms.
Rational parse_rational(const std::string& text);

/// Formats as "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& q);

inline bool is_zero(const Rational& q) { return q.is_zero(); }

/// Dense zero matrix; Eigen's Zero() needs a literal cast for multiprecision scalars.
inline RationalMatrix zeros(Eigen::Index rows, Eigen::Index cols)
{
    return RationalMatrix::Constant(rows, cols, Rational(0));
}

inline RationalMatrix identity(Eigen::Index n)
{
    RationalMatrix m = zeros(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        m(i, i) = 1;
    return m;
}

RationalMatrix to_dense(const SparseRationalMatrix& s);
SparseRationalMatrix to_sparse(const RationalMatrix& m);

/// Builds a matrix from integer rows; handy for fixtures and tests.
RationalMatrix matrix_from_ints(const std::vector<std::vector<long>>& rows);

}  // namespace perverscope

#endif
