#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agdmm/error.hpp"

namespace agdmm {

/// Integer encoding of a field element: sum c_i t^i  <->  sum c_i p^i.
using Elem = std::uint32_t;

/**
 * Finite field GF(p^e) in the polynomial basis over GF(p).
 *
 * Instances are interned: Field::get(q) always returns the same object, and
 * that object lives until program exit. Elements and matrices keep a raw
 * pointer to it.
 *
 * Fixed moduli: GF(4) t^2+t+1, GF(8) t^3+t+1, GF(9) t^2+1, GF(16) t^4+t+1,
 * GF(25) t^2+2. Any other extension field uses the monic irreducible
 * polynomial with the smallest integer encoding.
 */
class Field {
 public:
  static constexpr std::uint32_t kMaxOrder = 1u << 16;

  /// Throws std::invalid_argument unless q is a prime power in [2, 2^16].
  static const Field& get(std::uint32_t q);

  Field(const Field&) = delete;
  Field& operator=(const Field&) = delete;

  std::uint32_t p() const noexcept { return p_; }
  int degree() const noexcept { return e_; }
  std::uint32_t q() const noexcept { return q_; }
  /// Coefficients of the modulus, constant term first, monic.
  const std::vector<std::uint32_t>& modulus() const noexcept { return modulus_; }

  Elem add(Elem a, Elem b) const noexcept;
  Elem sub(Elem a, Elem b) const noexcept { return add(a, neg_[b]); }
  Elem neg(Elem a) const noexcept { return neg_[a]; }
  Elem mul(Elem a, Elem b) const noexcept {
    if (a == 0 || b == 0) return 0;
    return exp_[log_[a] + log_[b]];
  }
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, std::int64_t k) const;
  /// Image of an integer in the prime subfield.
  Elem from_int(std::int64_t k) const noexcept;
  bool contains(Elem a) const noexcept { return a < q_; }

  /// Digits of the polynomial-basis representation, constant term first.
  std::vector<std::uint32_t> digits(Elem a) const;
  Elem from_digits(std::span<const std::uint32_t> digits) const;

  std::string name() const;

 private:
  Field(std::uint32_t p, int e, std::vector<std::uint32_t> modulus);

  Elem slow_mul(Elem a, Elem b) const;

  std::uint32_t p_;
  int e_;
  std::uint32_t q_;
  std::vector<std::uint32_t> modulus_;
  std::vector<Elem> exp_;  // length 2(q-1), doubled to skip a modulo
  std::vector<std::uint32_t> log_;
  std::vector<Elem> neg_;
  std::vector<Elem> add_table_;  // small odd-characteristic extensions only
};

/// True if `poly` (constant term first) is irreducible over GF(p).
bool is_irreducible_mod_p(const std::vector<std::uint32_t>& poly, std::uint32_t p);

/// Field element carrying its field; arithmetic on mixed fields throws FieldMismatch.
class FieldElement {
 public:
  FieldElement(const Field& field, Elem value);

  const Field& field() const noexcept { return *field_; }
  Elem value() const noexcept { return value_; }
  bool is_zero() const noexcept { return value_ == 0; }

  FieldElement inv() const { return {*field_, field_->inv(value_)}; }
  FieldElement pow(std::int64_t k) const { return {*field_, field_->pow(value_, k)}; }
  FieldElement operator-() const { return {*field_, field_->neg(value_)}; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b);
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b);
  friend bool operator==(const FieldElement& a, const FieldElement& b) noexcept {
    return a.field_ == b.field_ && a.value_ == b.value_;
  }

 private:
  const Field* field_;
  Elem value_;
};

enum class ArithOp { Add, Sub, Mul, Div, Pow, Inv };

/// Single entry point for the six field operations. For Pow the exponent is the
/// integer encoding of `b`; for Inv `b` is ignored but must share the field.
FieldElement field_arith(const FieldElement& a, const FieldElement& b, ArithOp op);

/// Dense row-major matrix over a finite field.
class Matrix {
 public:
  /// Empty 0 x 0 placeholder with no field; assign before use.
  Matrix() : field_(nullptr), rows_(0), cols_(0) {}
  Matrix(const Field& field, std::size_t rows, std::size_t cols);
  Matrix(const Field& field, std::size_t rows, std::size_t cols, std::vector<Elem> entries);

  static Matrix identity(const Field& field, std::size_t n);
  static Matrix random(const Field& field, std::size_t rows, std::size_t cols, std::mt19937_64& rng);

  const Field& field() const noexcept { return *field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const Elem> entries() const noexcept { return data_; }

  Elem operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
  Elem& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  FieldElement element(std::size_t r, std::size_t c) const { return {*field_, (*this)(r, c)}; }

  bool is_zero() const noexcept;
  Matrix transposed() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  /// this += c * x
  void add_scaled(Elem c, const Matrix& x);

  friend bool operator==(const Matrix& a, const Matrix& b) noexcept {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  const Field* field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Elem> data_;
};

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix matmul(const Matrix& a, const Matrix& b);

struct LinearSolution {
  /// One particular solution (free variables zero); empty when inconsistent.
  std::optional<Matrix> solution;
  /// Null-space basis, one vector of length cols(M) per free column.
  std::vector<std::vector<Elem>> kernel_basis;
  std::size_t rank = 0;

  bool consistent() const noexcept { return solution.has_value(); }
};

/// Solves M X = rhs by Gauss-Jordan elimination. Pivots are taken column by
/// column, using the first row holding a nonzero entry.
LinearSolution solve_linear(const Matrix& m, const Matrix& rhs);

/// Rank of M (same elimination as solve_linear).
std::size_t rank_of(const Matrix& m);

/// Text format: "q rows cols" then one line per row of space-separated codes.
std::string to_text(const Matrix& m);
Matrix matrix_from_text(std::string_view text);
void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is);

}  // namespace agdmm
