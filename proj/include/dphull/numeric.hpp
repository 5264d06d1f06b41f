//
// Copyright 2026 The dp-hull Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Exact scalar types and dense exact linear algebra on Eigen containers.
//
// All predicates in the library are evaluated over Integer / Rational. The
// elimination routines below are templated on the scalar so that the same
// code serves Rational matrices and (fraction-free) Integer matrices.

#ifndef DPHULL_NUMERIC_HPP_
#define DPHULL_NUMERIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

namespace dphull {

namespace bmp = boost::multiprecision;

using Integer = bmp::number<bmp::gmp_int, bmp::et_off>;
using Rational = bmp::number<bmp::gmp_rational, bmp::et_off>;
// 50 decimal digits (~166 bits); used for exponential weights and logs.
using HighFloat = bmp::cpp_bin_float_50;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using IntegerVector = Vec<Integer>;
using RationalVector = Vec<Rational>;
using IntegerMatrix = Mat<Integer>;
using RationalMatrix = Mat<Rational>;

// Reduced row echelon form of a rational matrix. Pivot columns are found by
// scanning columns in increasing index order.
struct EchelonForm {
  RationalMatrix reduced;   // rank() rows, canonical RREF
  std::vector<int> pivots;  // pivot column of each row
  int rank() const { return static_cast<int>(pivots.size()); }
};

EchelonForm row_echelon(RationalMatrix m);

// Columns form a basis of {x : m x = 0}; one column per free variable of the
// RREF, with a 1 in that free position.
RationalMatrix null_space(const RationalMatrix& m);

int rank(const RationalMatrix& m);

// Exact determinant by Gaussian elimination over the rationals.
Rational determinant(RationalMatrix m);

// Fraction-free (Bareiss) determinant of an integer matrix.
Integer bareiss_determinant(IntegerMatrix m);

// Solves m x = rhs for square nonsingular m. Returns false when m is singular.
bool solve(const RationalMatrix& m, const RationalVector& rhs,
           RationalVector* x);

// Smallest positive integer multiple of v with coprime entries; the sign is
// left unchanged. v must not be identically zero.
IntegerVector primitive_integer_vector(const RationalVector& v);
IntegerVector primitive_integer_vector(const IntegerVector& v);

// Lexicographic comparison for integer/rational vectors (used as map keys).
template <typename Scalar>
bool lex_less(const Vec<Scalar>& a, const Vec<Scalar>& b) {
  const Eigen::Index n = std::min(a.size(), b.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return a.size() < b.size();
}

template <typename Scalar>
struct LexLess {
  bool operator()(const Vec<Scalar>& a, const Vec<Scalar>& b) const {
    return lex_less(a, b);
  }
};

int sign(const Integer& x);
int sign(const Rational& x);

double to_double(const Rational& x);
Eigen::VectorXd to_double(const RationalVector& v);
HighFloat to_high(const Rational& x);

// "p/q" (or "p" when q == 1).
std::string to_string(const Rational& x);
Rational parse_rational(const std::string& s);

// Exact rational value of a finite double.
Rational from_double(double x);

// log(x) for a positive rational, accurate even when numerator and
// denominator individually overflow double.
HighFloat log_rational(const Rational& x);

}  // namespace dphull

#endif  // DPHULL_NUMERIC_HPP_
