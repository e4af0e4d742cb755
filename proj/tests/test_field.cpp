#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "agdmm/field.hpp"

using namespace agdmm;

namespace {

// Schoolbook product of digit vectors reduced by the field modulus; kept
// separate from the log-table multiplication it checks.
Elem reference_mul(const Field& f, Elem a, Elem b) {
  const auto p = f.p();
  const int e = f.degree();
  auto da = f.digits(a), db = f.digits(b);
  std::vector<std::uint32_t> prod(2 * e, 0);
  for (int i = 0; i < e; ++i)
    for (int j = 0; j < e; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
  const auto& mod = f.modulus();
  for (int k = 2 * e - 2; k >= e; --k) {
    const std::uint32_t c = prod[k];
    if (c == 0) continue;
    for (int i = 0; i <= e; ++i) prod[k - e + i] = (prod[k - e + i] + (p - c) * mod[i]) % p;
  }
  prod.resize(e);
  return f.from_digits(prod);
}

Matrix reference_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.field(), a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      FieldElement acc(a.field(), 0);
      for (std::size_t k = 0; k < a.cols(); ++k) acc = acc + a.element(i, k) * b.element(k, j);
      c(i, j) = acc.value();
    }
  return c;
}

const std::vector<std::uint32_t> kSmallOrders{2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32, 49, 64};

}  // namespace

TEST_CASE("prime field arithmetic") {
  const Field& f = Field::get(5);
  CHECK(f.mul(3, 4) == 2);
  CHECK(f.add(3, 4) == 2);
  CHECK(f.sub(1, 3) == 3);
  CHECK(f.inv(2) == 3);
  CHECK(f.pow(2, 4) == 1);
  CHECK(f.pow(2, -1) == 3);
  for (Elem x = 0; x < 5; ++x) CHECK(f.mul(1, x) == x);
}

TEST_CASE("extension field encodings") {
  const Field& f4 = Field::get(4);
  CHECK(f4.modulus() == std::vector<std::uint32_t>{1, 1, 1});
  // alpha = t (code 2), alpha + 1 (code 3)
  CHECK(f4.mul(2, 3) == 1);
  const Field& f9 = Field::get(9);
  CHECK(f9.mul(3, 3) == 2);  // t^2 = -1
  CHECK(Field::get(8).modulus() == std::vector<std::uint32_t>{1, 1, 0, 1});
  CHECK(Field::get(16).modulus() == std::vector<std::uint32_t>{1, 1, 0, 0, 1});
  CHECK(Field::get(25).modulus() == std::vector<std::uint32_t>{2, 0, 1});
  CHECK(&Field::get(16) == &Field::get(16));
}

TEST_CASE("unsupported orders are rejected") {
  CHECK_THROWS_AS(Field::get(6), std::invalid_argument);
  CHECK_THROWS_AS(Field::get(1), std::invalid_argument);
  CHECK_THROWS_AS(Field::get(100), std::invalid_argument);
  CHECK_THROWS_AS(Field::get((1u << 16) + 1), std::invalid_argument);
}

TEST_CASE("moduli are irreducible") {
  for (std::uint32_t q : {4u, 8u, 9u, 16u, 25u, 27u, 32u, 49u, 64u, 81u, 121u, 125u, 128u, 243u, 256u}) {
    const Field& f = Field::get(q);
    CHECK(is_irreducible_mod_p(f.modulus(), f.p()));
  }
  CHECK_FALSE(is_irreducible_mod_p({1, 0, 1}, 2));  // t^2 + 1 = (t + 1)^2
  CHECK_FALSE(is_irreducible_mod_p({0, 0, 1}, 3));
}

TEST_CASE("multiplication agrees with schoolbook reduction") {
  for (std::uint32_t q : {4u, 8u, 9u, 16u, 25u, 27u, 49u, 64u}) {
    const Field& f = Field::get(q);
    for (Elem a = 0; a < q; ++a)
      for (Elem b = 0; b < q; ++b) REQUIRE(f.mul(a, b) == reference_mul(f, a, b));
  }
}

TEST_CASE("field axioms exhaustively for q <= 64") {
  for (std::uint32_t q : kSmallOrders) {
    const Field& f = Field::get(q);
    for (Elem a = 0; a < q; ++a) {
      REQUIRE(f.add(a, f.neg(a)) == 0);
      for (Elem b = 0; b < q; ++b) {
        REQUIRE(f.add(a, b) == f.add(b, a));
        REQUIRE(f.mul(a, b) == f.mul(b, a));
        for (Elem c = 0; c < q; ++c) {
          REQUIRE(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)));
          REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
          REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        }
      }
    }
  }
}

TEST_CASE("inverses exhaustively for q <= 256") {
  for (std::uint32_t q : {2u, 3u, 4u, 5u, 8u, 9u, 16u, 25u, 27u, 32u, 64u, 81u, 121u, 125u, 128u, 169u, 243u, 256u}) {
    const Field& f = Field::get(q);
    for (Elem a = 1; a < q; ++a) REQUIRE(f.mul(a, f.inv(a)) == 1);
  }
}

TEST_CASE("sampled axioms in larger fields") {
  std::mt19937_64 rng(11);
  for (std::uint32_t q : {1024u, 3125u, 65536u, 65521u}) {
    const Field& f = Field::get(q);
    for (int trial = 0; trial < 2000; ++trial) {
      const Elem a = rng() % q, b = rng() % q, c = rng() % q;
      REQUIRE(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)));
      REQUIRE(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
      if (a != 0) REQUIRE(f.mul(a, f.inv(a)) == 1);
    }
  }
}

TEST_CASE("field_arith entry point and errors") {
  const Field& f5 = Field::get(5);
  const Field& f7 = Field::get(7);
  FieldElement three(f5, 3), four(f5, 4), zero(f5, 0);
  CHECK(field_arith(three, four, ArithOp::Mul).value() == 2);
  CHECK(field_arith(three, four, ArithOp::Add).value() == 2);
  CHECK(field_arith(three, four, ArithOp::Sub).value() == 4);
  CHECK(field_arith(three, four, ArithOp::Div).value() == 2);
  CHECK(field_arith(three, FieldElement(f5, 2), ArithOp::Pow).value() == 4);
  CHECK(field_arith(three, zero, ArithOp::Inv).value() == 2);
  CHECK_THROWS_AS(field_arith(three, zero, ArithOp::Div), DivisionByZero);
  CHECK_THROWS_AS(field_arith(zero, three, ArithOp::Inv), DivisionByZero);
  CHECK_THROWS_AS(field_arith(three, FieldElement(f7, 3), ArithOp::Add), FieldMismatch);
  CHECK_THROWS_AS(FieldElement(f5, 5), std::invalid_argument);
}

TEST_CASE("solve_linear basics") {
  const Field& f = Field::get(5);
  SUBCASE("identity") {
    Matrix rhs(f, 3, 2, {1, 2, 3, 4, 0, 1});
    auto sol = solve_linear(Matrix::identity(f, 3), rhs);
    REQUIRE(sol.consistent());
    CHECK(*sol.solution == rhs);
    CHECK(sol.kernel_basis.empty());
    CHECK(sol.rank == 3);
  }
  SUBCASE("vandermonde on 1,2,3") {
    Matrix v(f, 3, 3);
    for (Elem i = 0; i < 3; ++i)
      for (Elem j = 0; j < 3; ++j) v(i, j) = f.pow(i + 1, j);
    // determinant (2-1)(3-1)(3-2) = 2 in GF(5)
    Matrix rhs(f, 3, 1, {4, 1, 3});
    auto sol = solve_linear(v, rhs);
    CHECK(sol.rank == 3);
    REQUIRE(sol.consistent());
    CHECK(sol.kernel_basis.empty());
    CHECK(matmul(v, *sol.solution) == rhs);
  }
  SUBCASE("zero system") {
    auto sol = solve_linear(Matrix(f, 2, 3), Matrix(f, 2, 1));
    CHECK(sol.rank == 0);
    CHECK(sol.kernel_basis.size() == 3);
    REQUIRE(sol.consistent());
    CHECK(sol.solution->is_zero());
  }
  SUBCASE("inconsistent") {
    auto sol = solve_linear(Matrix(f, 2, 1, {1, 1}), Matrix(f, 2, 1, {0, 1}));
    CHECK_FALSE(sol.consistent());
    CHECK(sol.kernel_basis.empty());
    CHECK(sol.rank == 1);
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(solve_linear(Matrix(f, 2, 2), Matrix(f, 3, 1)), DimensionMismatch);
    CHECK_THROWS_AS(solve_linear(Matrix(f, 2, 2), Matrix(Field::get(7), 2, 1)), FieldMismatch);
  }
}

TEST_CASE("solve_linear properties on random systems") {
  std::mt19937_64 rng(3);
  for (std::uint32_t q : {2u, 7u, 9u, 16u}) {
    const Field& f = Field::get(q);
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 6;
      Matrix m = Matrix::random(f, rows, cols, rng);
      // Low-rank instances: zero a random set of rows.
      if (trial % 3 == 0)
        for (std::size_t r = 0; r < rows; r += 2)
          for (std::size_t c = 0; c < cols; ++c) m(r, c) = 0;
      Matrix rhs = (trial % 2 == 0) ? matmul(m, Matrix::random(f, cols, 2, rng)) : Matrix::random(f, rows, 2, rng);
      auto sol = solve_linear(m, rhs);
      CHECK(sol.rank + sol.kernel_basis.size() == cols);
      CHECK(sol.rank == rank_of(m));
      if (trial % 2 == 0) REQUIRE(sol.consistent());
      if (sol.consistent()) CHECK(matmul(m, *sol.solution) == rhs);
      for (const auto& k : sol.kernel_basis) CHECK(matmul(m, Matrix(f, cols, 1, k)).is_zero());
    }
  }
}

TEST_CASE("matmul") {
  std::mt19937_64 rng(5);
  const Field& f9 = Field::get(9);
  Matrix b = Matrix::random(f9, 4, 3, rng);
  CHECK(matmul(Matrix::identity(f9, 4), b) == b);
  const Field& f5 = Field::get(5);
  CHECK(matmul(Matrix(f5, 1, 1, {3}), Matrix(f5, 1, 1, {4})) == Matrix(f5, 1, 1, {2}));
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x = Matrix::random(f9, 4, 4, rng), y = Matrix::random(f9, 4, 4, rng), z = Matrix::random(f9, 4, 4, rng);
    CHECK(matmul(x, y) == reference_matmul(x, y));
    CHECK(matmul(matmul(x, y), z) == matmul(x, matmul(y, z)));
    CHECK(matmul(x, y + z) == matmul(x, y) + matmul(x, z));
  }
  CHECK_THROWS_AS(matmul(Matrix(f9, 2, 3), Matrix(f9, 2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(matmul(Matrix(f9, 2, 2), Matrix(f5, 2, 2)), FieldMismatch);
}

TEST_CASE("matrix blocks and text format") {
  const Field& f = Field::get(9);
  Matrix m(f, 2, 3, {0, 1, 2, 3, 4, 8});
  CHECK(to_text(m) == "9 2 3\n0 1 2\n3 4 8\n");
  CHECK(matrix_from_text(to_text(m)) == m);
  CHECK(m.transposed().transposed() == m);
  CHECK(m.block(1, 1, 1, 2) == Matrix(f, 1, 2, {4, 8}));
  Matrix z(f, 2, 3);
  z.set_block(1, 1, m.block(1, 1, 1, 2));
  CHECK(z(1, 2) == 8);
  CHECK_THROWS_AS(matrix_from_text("9 2 2\n1 2 3\n"), ParseError);
  CHECK_THROWS_AS(matrix_from_text("9 1 1\n9\n"), ParseError);
  CHECK_THROWS_AS(Matrix(f, 2, 2, {1, 2, 3}), DimensionMismatch);
}
