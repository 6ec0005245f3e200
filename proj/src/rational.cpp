#include "perverscope/rational.hpp"

#include <cctype>

namespace perverscope {

namespace {

Integer parse_integer(const std::string& s, const std::string& whole)
{
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+'))
        ++i;
    if (i == s.size())
        throw SchemaError("not a rational: \"" + whole + "\"");
    for (std::size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j])))
            throw SchemaError("not a rational: \"" + whole + "\"");
    return Integer(s[0] == '+' ? s.substr(1) : s);
}

}  // namespace

Rational parse_rational(const std::string& text)
{
    const auto slash = text.find('/');
    if (slash == std::string::npos)
        return Rational(parse_integer(text, text));
    const Integer num = parse_integer(text.substr(0, slash), text);
    const std::string dtext = text.substr(slash + 1);
    if (!dtext.empty() && (dtext[0] == '-' || dtext[0] == '+'))
        throw SchemaError("denominator must be unsigned: \"" + text + "\"");
    const Integer den = parse_integer(dtext, text);
    if (den == 0)
        throw SchemaError("zero denominator: \"" + text + "\"");
    return Rational(num, den);
}

std::string format_rational(const Rational& q)
{
    if (denominator(q) == 1)
        return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

RationalMatrix to_dense(const SparseRationalMatrix& s)
{
    RationalMatrix m = zeros(s.rows(), s.cols());
    for (int k = 0; k < s.outerSize(); ++k)
        for (SparseRationalMatrix::InnerIterator it(s, k); it; ++it)
            m(it.row(), it.col()) = it.value();
    return m;
}

SparseRationalMatrix to_sparse(const RationalMatrix& m)
{
    std::vector<Eigen::Triplet<Rational>> t;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!is_zero(m(i, j)))
                t.emplace_back(static_cast<int>(i), static_cast<int>(j), m(i, j));
    SparseRationalMatrix s(m.rows(), m.cols());
    s.setFromTriplets(t.begin(), t.end());
    return s;
}

RationalMatrix matrix_from_ints(const std::vector<std::vector<long>>& rows)
{
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = r ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    RationalMatrix m = zeros(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != c)
            throw MathError("matrix_from_ints: ragged rows");
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return m;
}

}  // namespace perverscope
