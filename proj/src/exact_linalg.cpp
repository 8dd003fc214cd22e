#include "hypshadow/exact_linalg.hpp"

#include "hypshadow/error.hpp"

#include <utility>

namespace hypshadow {

RMatrix RMatrix::identity(std::size_t n) {
  RMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RMatrix RMatrix::from_rows(const std::vector<RVector>& rows) {
  if (rows.empty()) return {};
  RMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require_dims(rows[i].size(), m.cols(), "RMatrix::from_rows");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

RVector RMatrix::row(std::size_t i) const { return RVector(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }

RVector RMatrix::col(std::size_t j) const {
  RVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

RMatrix RMatrix::transpose() const {
  RMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool RMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool RMatrix::is_zero() const {
  for (const auto& x : data_)
    if (x != 0) return false;
  return true;
}

RMatrix RMatrix::operator*(const RMatrix& other) const {
  require_dims(other.rows_, cols_, "RMatrix product");
  RMatrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& a = (*this)(i, k);
      if (a == 0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  return out;
}

RVector RMatrix::operator*(std::span<const Rational> v) const {
  require_dims(v.size(), cols_, "RMatrix-vector product");
  RVector out(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if ((*this)(i, j) != 0) out[i] += (*this)(i, j) * v[j];
  return out;
}

RMatrix RMatrix::operator+(const RMatrix& other) const {
  require_dims(other.rows_, rows_, "RMatrix sum");
  require_dims(other.cols_, cols_, "RMatrix sum");
  RMatrix out = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += other.data_[i];
  return out;
}

RMatrix RMatrix::operator*(const Rational& s) const {
  RMatrix out = *this;
  for (auto& x : out.data_) x *= s;
  return out;
}

Rref rref(const RMatrix& m) {
  Rref r{m, {}, RMatrix::identity(m.rows())};
  RMatrix& a = r.reduced;
  RMatrix& t = r.transform;
  std::size_t row = 0;
  for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::size_t piv = row;
    while (piv < a.rows() && a(piv, col) == 0) ++piv;
    if (piv == a.rows()) continue;
    if (piv != row) {
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(piv, j), a(row, j));
      for (std::size_t j = 0; j < t.cols(); ++j) std::swap(t(piv, j), t(row, j));
    }
    const Rational inv = 1 / a(row, col);
    for (std::size_t j = 0; j < a.cols(); ++j) a(row, j) *= inv;
    for (std::size_t j = 0; j < t.cols(); ++j) t(row, j) *= inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col) == 0) continue;
      const Rational f = a(i, col);
      for (std::size_t j = 0; j < a.cols(); ++j)
        if (a(row, j) != 0) a(i, j) -= f * a(row, j);
      for (std::size_t j = 0; j < t.cols(); ++j)
        if (t(row, j) != 0) t(i, j) -= f * t(row, j);
    }
    r.pivots.push_back(col);
    ++row;
  }
  return r;
}

std::vector<RVector> kernel(const RMatrix& m) {
  const Rref r = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : r.pivots) is_pivot[p] = true;
  std::vector<RVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    RVector v(m.cols());
    v[free] = 1;
    for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = -r.reduced(i, free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RVector> solve_any(const RMatrix& m, std::span<const Rational> b) {
  require_dims(b.size(), m.rows(), "solve_any");
  const Rref r = rref(m);
  const RVector tb = r.transform * b;
  for (std::size_t i = r.pivots.size(); i < m.rows(); ++i)
    if (tb[i] != 0) return std::nullopt;
  RVector x(m.cols());
  for (std::size_t i = 0; i < r.pivots.size(); ++i) x[r.pivots[i]] = tb[i];
  return x;
}

std::size_t rank(const RMatrix& m) { return rref(m).pivots.size(); }

Rational determinant(const RMatrix& m) {
  require_dims(m.cols(), m.rows(), "determinant");
  RMatrix a = m;
  Rational det = 1;
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a(piv, c) == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(c, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a(i, c) == 0) continue;
      const Rational f = a(i, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

std::vector<Rational> leading_minors(const RMatrix& m) {
  require_dims(m.cols(), m.rows(), "leading_minors");
  std::vector<Rational> out;
  for (std::size_t k = 1; k <= m.rows(); ++k) {
    RMatrix sub(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(i, j);
    out.push_back(determinant(sub));
  }
  return out;
}

std::vector<RVector> orthogonal_complement(const std::vector<RVector>& vectors, std::size_t n) {
  if (vectors.empty()) {
    std::vector<RVector> basis;
    for (std::size_t i = 0; i < n; ++i) {
      RVector v(n);
      v[i] = 1;
      basis.push_back(std::move(v));
    }
    return basis;
  }
  return kernel(RMatrix::from_rows(vectors));
}

RVector project_onto(const std::vector<RVector>& basis, std::span<const Rational> x) {
  const std::size_t n = x.size();
  if (basis.empty()) return RVector(n);
  const std::size_t k = basis.size();
  RMatrix gram(k, k);
  RVector rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) gram(i, j) = dot(basis[i], basis[j]);
    rhs[i] = dot(basis[i], x);
  }
  const auto coeffs = solve_any(gram, rhs);
  if (!coeffs) throw NumericError("project_onto: degenerate basis");
  RVector out(n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j] += (*coeffs)[i] * basis[i][j];
  return out;
}

}  // namespace hypshadow

namespace hypshadow {

const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive_definite: return "positive_definite";
    case Definiteness::positive_semidefinite: return "positive_semidefinite";
    case Definiteness::indefinite: return "indefinite";
  }
  return "unknown";
}

Rational quadratic_form(const RMatrix& s, std::span<const Rational> v) {
  require_dims(v.size(), s.cols(), "quadratic_form");
  return dot(v, s * v);
}

DefinitenessCertificate classify_semidefinite(const RMatrix& s) {
  if (s.rows() != s.cols() || !s.is_symmetric()) throw DomainError("classify_semidefinite: matrix not symmetric");
  const std::size_t n = s.rows();
  RMatrix a = s;
  // basis[k] is the original-coordinate vector behind reduced coordinate k.
  std::vector<RVector> basis;
  for (std::size_t k = 0; k < n; ++k) basis.push_back(RMatrix::identity(n).row(k));
  std::vector<bool> active(n, true);

  while (true) {
    std::optional<std::size_t> pos;
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k]) continue;
      if (a(k, k) < 0) return {Definiteness::indefinite, basis[k]};
      if (a(k, k) > 0 && !pos) pos = k;
    }
    if (!pos) break;
    const std::size_t k = *pos;
    active[k] = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (!active[j] || a(k, j) == 0) continue;
      const Rational c = a(k, j) / a(k, k);
      for (std::size_t l = 0; l < n; ++l)
        if (active[l]) a(j, l) -= c * a(k, l);
      basis[j] = axpy(-c, basis[k], basis[j]);
    }
    for (std::size_t j = 0; j < n; ++j)
      if (active[j]) a(j, k) = a(k, j) = 0;
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (!active[k]) continue;
    for (std::size_t j = k + 1; j < n; ++j)
      if (active[j] && a(k, j) != 0) {
        const Rational sgn_s = a(k, j) > 0 ? Rational(-1) : Rational(1);
        return {Definiteness::indefinite, axpy(sgn_s, basis[j], basis[k])};
      }
  }
  for (std::size_t k = 0; k < n; ++k)
    if (active[k]) return {Definiteness::positive_semidefinite, basis[k]};
  return {Definiteness::positive_definite, {}};
}

}  // namespace hypshadow
