#pragma once

#include "hypshadow/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace hypshadow {

// Dense row-major matrix of rationals. Sizes here are tiny (pencils of a few
// rows, Hessians of a handful of variables), so no attempt at blocking.
class RMatrix {
 public:
  RMatrix() = default;
  RMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static RMatrix identity(std::size_t n);
  static RMatrix from_rows(const std::vector<RVector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  RVector row(std::size_t i) const;
  RVector col(std::size_t j) const;
  RMatrix transpose() const;
  bool is_symmetric() const;
  bool is_zero() const;

  RMatrix operator*(const RMatrix& other) const;
  RVector operator*(std::span<const Rational> v) const;
  RMatrix operator+(const RMatrix& other) const;
  RMatrix operator*(const Rational& s) const;
  bool operator==(const RMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rational> data_;
};

struct Rref {
  RMatrix reduced;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
  RMatrix transform;                // transform * input == reduced
};

Rref rref(const RMatrix& m);

/// Basis of {x : m x = 0}, one vector per free column.
std::vector<RVector> kernel(const RMatrix& m);

/// Some solution of m x = b, or nullopt if inconsistent.
std::optional<RVector> solve_any(const RMatrix& m, std::span<const Rational> b);

std::size_t rank(const RMatrix& m);

Rational determinant(const RMatrix& m);

/// Leading principal minors d_1..d_n (Sylvester).
std::vector<Rational> leading_minors(const RMatrix& m);

/// Basis of the orthogonal complement of span(vectors) in Q^n.
std::vector<RVector> orthogonal_complement(const std::vector<RVector>& vectors, std::size_t n);

/// Exact orthogonal projection of x onto span(basis).
RVector project_onto(const std::vector<RVector>& basis, std::span<const Rational> x);

enum class Definiteness { positive_definite, positive_semidefinite, indefinite };

const char* to_string(Definiteness d);

struct DefinitenessCertificate {
  Definiteness status;
  // indefinite: w^T S w < 0; positive_semidefinite: w != 0 with w^T S w = 0.
  RVector witness;
};

/// Exact classification of a symmetric rational matrix by symmetric
/// elimination with diagonal pivots.
DefinitenessCertificate classify_semidefinite(const RMatrix& s);

Rational quadratic_form(const RMatrix& s, std::span<const Rational> v);

}  // namespace hypshadow
