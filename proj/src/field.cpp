#include "agdmm/field.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace agdmm {

const char* to_string(BuildErrorCode code) noexcept {
  switch (code) {
    case BuildErrorCode::InvalidPartition: return "InvalidPartition";
    case BuildErrorCode::GenusMismatch: return "GenusMismatch";
    case BuildErrorCode::ThresholdExceedsPlaces: return "ThresholdExceedsPlaces";
    case BuildErrorCode::InsufficientPlaces: return "InsufficientPlaces";
    case BuildErrorCode::SemigroupPreconditionFailed: return "SemigroupPreconditionFailed";
    case BuildErrorCode::ConditionViolated: return "ConditionViolated";
  }
  return "BuildError";
}

namespace {

using Poly = std::vector<std::uint32_t>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

std::uint32_t inv_mod_p(std::uint32_t a, std::uint32_t p) {
  std::int64_t t = 0, new_t = 1, r = p, new_r = a;
  while (new_r != 0) {
    std::int64_t quot = r / new_r;
    std::tie(t, new_t) = std::make_pair(new_t, t - quot * new_t);
    std::tie(r, new_r) = std::make_pair(new_r, r - quot * new_r);
  }
  if (t < 0) t += p;
  return static_cast<std::uint32_t>(t);
}

// Remainder of a modulo b over GF(p); b nonzero.
Poly poly_mod(Poly a, const Poly& b, std::uint32_t p) {
  trim(a);
  const std::size_t db = b.size() - 1;
  const std::uint32_t lead_inv = inv_mod_p(b.back(), p);
  while (a.size() >= b.size()) {
    const std::uint64_t factor = static_cast<std::uint64_t>(a.back()) * lead_inv % p;
    const std::size_t shift = a.size() - 1 - db;
    for (std::size_t i = 0; i <= db; ++i) {
      const std::uint64_t sub = factor * b[i] % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
  return a;
}

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

Poly fixed_modulus(std::uint32_t p, int e) {
  const std::uint32_t q = [&] {
    std::uint32_t v = 1;
    for (int i = 0; i < e; ++i) v *= p;
    return v;
  }();
  switch (q) {
    case 4: return {1, 1, 1};
    case 8: return {1, 1, 0, 1};
    case 9: return {1, 0, 1};
    case 16: return {1, 1, 0, 0, 1};
    case 25: return {2, 0, 1};
    default: break;
  }
  if (e == 1) return {0, 1};
  // Smallest encoding among monic irreducibles of degree e.
  std::uint32_t count = q;
  for (std::uint32_t code = 0; code < count; ++code) {
    Poly cand(e + 1, 0);
    std::uint32_t c = code;
    for (int i = 0; i < e; ++i) {
      cand[i] = c % p;
      c /= p;
    }
    cand[e] = 1;
    if (is_irreducible_mod_p(cand, p)) return cand;
  }
  throw std::logic_error("no irreducible polynomial found");
}

}  // namespace

bool is_irreducible_mod_p(const std::vector<std::uint32_t>& poly_in, std::uint32_t p) {
  Poly poly = poly_in;
  trim(poly);
  if (poly.size() < 2) return false;
  const int deg = static_cast<int>(poly.size()) - 1;
  if (deg == 1) return true;
  // Trial division by every monic polynomial of degree 1..deg/2.
  for (int d = 1; d <= deg / 2; ++d) {
    std::uint64_t total = 1;
    for (int i = 0; i < d; ++i) total *= p;
    for (std::uint64_t code = 0; code < total; ++code) {
      Poly div(d + 1, 0);
      std::uint64_t c = code;
      for (int i = 0; i < d; ++i) {
        div[i] = static_cast<std::uint32_t>(c % p);
        c /= p;
      }
      div[d] = 1;
      if (poly_mod(poly, div, p).empty()) return false;
    }
  }
  return true;
}

const Field& Field::get(std::uint32_t q) {
  static std::mutex mutex;
  static std::map<std::uint32_t, std::unique_ptr<Field>> registry;
  std::lock_guard lock(mutex);
  if (auto it = registry.find(q); it != registry.end()) return *it->second;
  if (q < 2 || q > kMaxOrder) throw std::invalid_argument("field order out of range: " + std::to_string(q));
  std::uint32_t p = 2;
  while (q % p != 0) ++p;
  int e = 0;
  std::uint32_t rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++e;
  }
  if (rest != 1 || !is_prime(p)) throw std::invalid_argument("not a prime power: " + std::to_string(q));
  auto field = std::unique_ptr<Field>(new Field(p, e, fixed_modulus(p, e)));
  const Field& ref = *field;
  registry.emplace(q, std::move(field));
  return ref;
}

Field::Field(std::uint32_t p, int e, std::vector<std::uint32_t> modulus)
    : p_(p), e_(e), q_(1), modulus_(std::move(modulus)) {
  for (int i = 0; i < e_; ++i) q_ *= p_;
  neg_.resize(q_);
  for (Elem a = 0; a < q_; ++a) {
    auto d = digits(a);
    for (auto& c : d) c = (p_ - c) % p_;
    neg_[a] = from_digits(d);
  }
  if (e_ > 1 && p_ != 2 && q_ <= 2048) {
    add_table_.resize(static_cast<std::size_t>(q_) * q_);
    for (Elem a = 0; a < q_; ++a) {
      const auto da = digits(a);
      for (Elem b = 0; b < q_; ++b) {
        auto db = digits(b);
        for (int i = 0; i < e_; ++i) db[i] = (db[i] + da[i]) % p_;
        add_table_[static_cast<std::size_t>(a) * q_ + b] = from_digits(db);
      }
    }
  }
  // Discrete log tables from the first primitive element.
  log_.assign(q_, 0);
  exp_.assign(2 * static_cast<std::size_t>(q_ - 1) + 1, 0);
  if (q_ == 2) {
    exp_[0] = exp_[1] = 1;
    return;
  }
  for (Elem g = 2; g < q_; ++g) {
    Elem x = 1;
    std::uint32_t order = 0;
    do {
      x = slow_mul(x, g);
      ++order;
    } while (x != 1 && order < q_);
    if (order != q_ - 1) continue;
    x = 1;
    for (std::uint32_t k = 0; k < q_ - 1; ++k) {
      exp_[k] = x;
      exp_[k + q_ - 1] = x;
      log_[x] = k;
      x = slow_mul(x, g);
    }
    return;
  }
  throw std::logic_error("no primitive element");
}

Elem Field::slow_mul(Elem a, Elem b) const {
  const auto da = digits(a);
  const auto db = digits(b);
  Poly prod(2 * e_, 0);
  for (int i = 0; i < e_; ++i)
    for (int j = 0; j < e_; ++j)
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + static_cast<std::uint64_t>(da[i]) * db[j]) % p_);
  Poly r = poly_mod(prod, modulus_, p_);
  r.resize(e_, 0);
  return from_digits(r);
}

Elem Field::add(Elem a, Elem b) const noexcept {
  if (e_ == 1) {
    const Elem s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  if (p_ == 2) return a ^ b;
  if (!add_table_.empty()) return add_table_[static_cast<std::size_t>(a) * q_ + b];
  Elem out = 0, scale = 1;
  for (int i = 0; i < e_; ++i) {
    out += ((a % p_ + b % p_) % p_) * scale;
    a /= p_;
    b /= p_;
    scale *= p_;
  }
  return out;
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw DivisionByZero();
  if (a == 1) return 1;
  return exp_[(q_ - 1) - log_[a]];
}

Elem Field::pow(Elem a, std::int64_t k) const {
  if (k == 0) return 1;
  if (a == 0) {
    if (k < 0) throw DivisionByZero();
    return 0;
  }
  const std::int64_t order = q_ - 1;
  std::int64_t r = (static_cast<std::int64_t>(log_[a]) * (k % order)) % order;
  if (r < 0) r += order;
  return exp_[r];
}

Elem Field::from_int(std::int64_t k) const noexcept {
  std::int64_t r = k % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return static_cast<Elem>(r);
}

std::vector<std::uint32_t> Field::digits(Elem a) const {
  std::vector<std::uint32_t> d(e_, 0);
  for (int i = 0; i < e_; ++i) {
    d[i] = a % p_;
    a /= p_;
  }
  return d;
}

Elem Field::from_digits(std::span<const std::uint32_t> d) const {
  Elem v = 0;
  for (std::size_t i = d.size(); i-- > 0;) v = v * p_ + d[i];
  return v;
}

std::string Field::name() const { return "GF(" + std::to_string(q_) + ")"; }

// ---------------------------------------------------------------------------

FieldElement::FieldElement(const Field& field, Elem value) : field_(&field), value_(value) {
  if (!field.contains(value)) throw std::invalid_argument("element code out of range for " + field.name());
}

namespace {
const Field& common(const FieldElement& a, const FieldElement& b) {
  if (&a.field() != &b.field()) throw FieldMismatch();
  return a.field();
}
}  // namespace

FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  const Field& f = common(a, b);
  return {f, f.add(a.value_, b.value_)};
}
FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  const Field& f = common(a, b);
  return {f, f.sub(a.value_, b.value_)};
}
FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  const Field& f = common(a, b);
  return {f, f.mul(a.value_, b.value_)};
}
FieldElement operator/(const FieldElement& a, const FieldElement& b) {
  const Field& f = common(a, b);
  return {f, f.div(a.value_, b.value_)};
}

FieldElement field_arith(const FieldElement& a, const FieldElement& b, ArithOp op) {
  common(a, b);
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
    case ArithOp::Div: return a / b;
    case ArithOp::Pow: return a.pow(b.value());
    case ArithOp::Inv: return a.inv();
  }
  throw std::invalid_argument("unknown field operation");
}

// ---------------------------------------------------------------------------

Matrix::Matrix(const Field& field, std::size_t rows, std::size_t cols)
    : field_(&field), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

Matrix::Matrix(const Field& field, std::size_t rows, std::size_t cols, std::vector<Elem> entries)
    : field_(&field), rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw DimensionMismatch("entry count does not match rows x cols");
  for (Elem v : data_)
    if (!field.contains(v)) throw std::invalid_argument("matrix entry out of range for " + field.name());
}

Matrix Matrix::identity(const Field& field, std::size_t n) {
  Matrix m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

Matrix Matrix::random(const Field& field, std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  Matrix m(field, rows, cols);
  for (auto& v : m.data_) v = static_cast<Elem>(rng() % field.q());
  return m;
}

bool Matrix::is_zero() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](Elem v) { return v == 0; });
}

Matrix Matrix::transposed() const {
  Matrix t(*field_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
  Matrix b(*field_, nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
  return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
  if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw DimensionMismatch("block out of range");
  for (std::size_t r = 0; r < b.rows_; ++r)
    for (std::size_t c = 0; c < b.cols_; ++c) (*this)(r0 + r, c0 + c) = b(r, c);
}

void Matrix::add_scaled(Elem c, const Matrix& x) {
  if (x.field_ != field_) throw FieldMismatch();
  if (x.rows_ != rows_ || x.cols_ != cols_) throw DimensionMismatch("add_scaled: shape mismatch");
  if (c == 0) return;
  const Field& f = *field_;
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] = f.add(data_[i], f.mul(c, x.data_[i]));
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix s = a;
  s.add_scaled(1, b);
  return s;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (&a.field() != &b.field()) throw FieldMismatch();
  if (a.cols() != b.rows())
    throw DimensionMismatch("matmul: inner dimensions " + std::to_string(a.cols()) + " and " +
                            std::to_string(b.rows()) + " differ");
  const Field& f = a.field();
  Matrix c(f, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Elem aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = f.add(c(i, j), f.mul(aik, b(k, j)));
    }
  }
  return c;
}

namespace {

struct Echelon {
  Matrix reduced;                   // [M | rhs] in reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column per pivot row
};

Echelon eliminate(Matrix aug, std::size_t ncols) {
  const Field& f = aug.field();
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < aug.rows(); ++col) {
    std::size_t sel = row;
    while (sel < aug.rows() && aug(sel, col) == 0) ++sel;
    if (sel == aug.rows()) continue;
    if (sel != row)
      for (std::size_t c = 0; c < aug.cols(); ++c) std::swap(aug(sel, c), aug(row, c));
    const Elem inv = f.inv(aug(row, col));
    for (std::size_t c = col; c < aug.cols(); ++c) aug(row, c) = f.mul(aug(row, c), inv);
    for (std::size_t r = 0; r < aug.rows(); ++r) {
      if (r == row) continue;
      const Elem factor = aug(r, col);
      if (factor == 0) continue;
      for (std::size_t c = col; c < aug.cols(); ++c) aug(r, c) = f.sub(aug(r, c), f.mul(factor, aug(row, c)));
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(aug), std::move(pivots)};
}

}  // namespace

LinearSolution solve_linear(const Matrix& m, const Matrix& rhs) {
  if (&m.field() != &rhs.field()) throw FieldMismatch();
  if (m.rows() != rhs.rows()) throw DimensionMismatch("solve_linear: rhs rows differ from matrix rows");
  const Field& f = m.field();
  const std::size_t n = m.cols();
  const std::size_t k = rhs.cols();
  Matrix aug(f, m.rows(), n + k);
  aug.set_block(0, 0, m);
  aug.set_block(0, n, rhs);
  auto [red, pivots] = eliminate(std::move(aug), n);

  LinearSolution out;
  out.rank = pivots.size();
  bool consistent = true;
  for (std::size_t r = out.rank; r < red.rows() && consistent; ++r)
    for (std::size_t c = n; c < n + k; ++c)
      if (red(r, c) != 0) {
        consistent = false;
        break;
      }
  if (consistent) {
    Matrix sol(f, n, k);
    for (std::size_t i = 0; i < pivots.size(); ++i)
      for (std::size_t c = 0; c < k; ++c) sol(pivots[i], c) = red(i, n + c);
    out.solution = std::move(sol);
  }
  std::vector<bool> is_pivot(n, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Elem> v(n, 0);
    v[free] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = f.neg(red(i, free));
    out.kernel_basis.push_back(std::move(v));
  }
  return out;
}

std::size_t rank_of(const Matrix& m) { return eliminate(m, m.cols()).pivots.size(); }

void write_matrix(std::ostream& os, const Matrix& m) {
  os << m.field().q() << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << m(r, c);
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is) {
  std::uint64_t q = 0, rows = 0, cols = 0;
  if (!(is >> q >> rows >> cols)) throw ParseError("matrix header must be 'q rows cols'");
  const Field& f = Field::get(static_cast<std::uint32_t>(q));
  std::vector<Elem> entries;
  entries.reserve(rows * cols);
  for (std::uint64_t i = 0; i < rows * cols; ++i) {
    std::int64_t v = 0;
    if (!(is >> v)) throw ParseError("matrix body truncated");
    if (v < 0 || static_cast<std::uint64_t>(v) >= q) throw ParseError("matrix entry out of range");
    entries.push_back(static_cast<Elem>(v));
  }
  return Matrix(f, rows, cols, std::move(entries));
}

std::string to_text(const Matrix& m) {
  std::ostringstream os;
  write_matrix(os, m);
  return os.str();
}

Matrix matrix_from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return read_matrix(is);
}

}  // namespace agdmm
