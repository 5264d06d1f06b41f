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

#include "dphull/numeric.hpp"

#include <stdexcept>
#include <utility>

namespace dphull {

EchelonForm row_echelon(RationalMatrix m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  EchelonForm out;
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index p = r;
    while (p < rows && m(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r) m.row(p).swap(m.row(r));
    const Rational inv = Rational(1) / m(r, c);
    for (Eigen::Index j = c; j < cols; ++j) m(r, j) *= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational f = m(i, c);
      for (Eigen::Index j = c; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    out.pivots.push_back(static_cast<int>(c));
    ++r;
  }
  out.reduced = m.topRows(r);
  return out;
}

RationalMatrix null_space(const RationalMatrix& m) {
  const Eigen::Index cols = m.cols();
  const EchelonForm ef = row_echelon(m);
  std::vector<bool> is_pivot(cols, false);
  for (int p : ef.pivots) is_pivot[p] = true;
  RationalMatrix basis(cols, cols - ef.rank());
  Eigen::Index out = 0;
  for (Eigen::Index f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    for (Eigen::Index i = 0; i < cols; ++i) basis(i, out) = 0;
    basis(f, out) = 1;
    for (int r = 0; r < ef.rank(); ++r) {
      basis(ef.pivots[r], out) = -ef.reduced(r, f);
    }
    ++out;
  }
  return basis;
}

int rank(const RationalMatrix& m) { return row_echelon(m).rank(); }

Rational determinant(RationalMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: not square");
  const Eigen::Index n = m.rows();
  Rational det = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    while (p < n && m(p, c) == 0) ++p;
    if (p == n) return Rational(0);
    if (p != c) {
      m.row(p).swap(m.row(c));
      det = -det;
    }
    det *= m(c, c);
    const Rational inv = Rational(1) / m(c, c);
    for (Eigen::Index i = c + 1; i < n; ++i) {
      if (m(i, c) == 0) continue;
      const Rational f = m(i, c) * inv;
      for (Eigen::Index j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return det;
}

Integer bareiss_determinant(IntegerMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant: not square");
  const Eigen::Index n = m.rows();
  if (n == 0) return Integer(1);
  int flips = 0;
  Integer prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      Eigen::Index p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return Integer(0);
      m.row(p).swap(m.row(k));
      ++flips;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
    }
    prev = m(k, k);
  }
  Integer det = m(n - 1, n - 1);
  return (flips % 2) ? Integer(-det) : det;
}

bool solve(const RationalMatrix& m, const RationalVector& rhs,
           RationalVector* x) {
  const Eigen::Index n = m.rows();
  RationalMatrix aug(n, n + 1);
  aug.leftCols(n) = m;
  aug.col(n) = rhs;
  const EchelonForm ef = row_echelon(aug);
  if (ef.rank() != n || ef.pivots.back() == n) return false;
  x->resize(n);
  for (Eigen::Index i = 0; i < n; ++i) (*x)[i] = ef.reduced(i, n);
  return true;
}

IntegerVector primitive_integer_vector(const IntegerVector& v) {
  Integer g = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) g = gcd(g, v[i]);
  if (g == 0) throw std::invalid_argument("primitive_integer_vector: zero vector");
  if (g < 0) g = -g;
  IntegerVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i] / g;
  return out;
}

IntegerVector primitive_integer_vector(const RationalVector& v) {
  Integer l = 1;
  for (Eigen::Index i = 0; i < v.size(); ++i) l = lcm(l, denominator(v[i]));
  IntegerVector scaled(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    scaled[i] = numerator(v[i]) * (l / denominator(v[i]));
  }
  return primitive_integer_vector(scaled);
}

int sign(const Integer& x) { return x.sign(); }
int sign(const Rational& x) { return x.sign(); }

double to_double(const Rational& x) { return x.convert_to<double>(); }

Eigen::VectorXd to_double(const RationalVector& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

namespace {

HighFloat integer_to_high(const Integer& z) {
  // Conversion through the decimal string keeps every digit that fits in the
  // 50-digit mantissa, independent of the magnitude of z.
  return HighFloat(z.str());
}

}  // namespace

HighFloat to_high(const Rational& x) {
  return integer_to_high(numerator(x)) / integer_to_high(denominator(x));
}

HighFloat log_rational(const Rational& x) {
  if (x <= 0) throw std::domain_error("log_rational: non-positive argument");
  return log(integer_to_high(numerator(x))) - log(integer_to_high(denominator(x)));
}

std::string to_string(const Rational& x) { return x.str(); }

Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (s.find_first_of(".eE") != std::string::npos) return from_double(std::stod(s));
    return Rational(Integer(s));
  }
  const Integer num(s.substr(0, slash));
  const Integer den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("parse_rational: zero denominator");
  return Rational(num, den);
}

Rational from_double(double x) { return Rational(x); }

}  // namespace dphull
