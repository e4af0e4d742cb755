#pragma once

#include <compare>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agdmm/field.hpp"
#include "agdmm/series.hpp"

namespace agdmm {

enum class CurveKind { Rational, Elliptic, Hermitian };

/// A rational (degree one) place: an affine point or the unique place at infinity.
struct Place {
  bool at_infinity = false;
  Elem x = 0;
  Elem y = 0;

  static Place infinity() noexcept { return {true, 0, 0}; }
  static Place affine(Elem x, Elem y) noexcept { return {false, x, y}; }

  std::string to_string() const;

  // Affine places sorted by (x, y) codes, infinity last.
  friend bool operator==(const Place&, const Place&) = default;
  friend std::strong_ordering operator<=>(const Place& a, const Place& b) noexcept {
    if (a.at_infinity != b.at_infinity) return a.at_infinity ? std::strong_ordering::greater : std::strong_ordering::less;
    if (a.at_infinity) return std::strong_ordering::equal;
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
  }
};

/// Finite formal sum of places with integer coefficients. Zero entries are never stored.
class Divisor {
 public:
  Divisor() = default;
  static Divisor single(const Place& p, int n = 1);

  int coefficient(const Place& p) const;
  void add(const Place& p, int n);
  int degree() const noexcept;
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_effective() const noexcept;
  std::vector<Place> support() const;
  const std::map<Place, int>& terms() const noexcept { return terms_; }

  Divisor positive_part() const;
  Divisor negative_part() const;  // as an effective divisor

  Divisor& operator+=(const Divisor& o);
  Divisor& operator-=(const Divisor& o);
  friend Divisor operator+(Divisor a, const Divisor& b) { return a += b; }
  friend Divisor operator-(Divisor a, const Divisor& b) { return a -= b; }
  friend Divisor operator*(int k, const Divisor& d);
  friend bool operator==(const Divisor&, const Divisor&) = default;

  std::string to_string() const;

 private:
  std::map<Place, int> terms_;
};

/// x - value or y - value.
struct ShiftForm {
  enum class Var : std::uint8_t { X, Y };
  Var var = Var::X;
  Elem value = 0;

  static ShiftForm x(Elem a) noexcept { return {Var::X, a}; }
  static ShiftForm y(Elem b) noexcept { return {Var::Y, b}; }
  std::string to_string() const;
  friend auto operator<=>(const ShiftForm&, const ShiftForm&) = default;
};

/// Numerator polynomial in the reduced monomial basis, indexed by pole order at infinity.
using CurvePoly = std::vector<Elem>;

class Curve;
using CurvePtr = std::shared_ptr<const Curve>;

/// Coordinate expansions at a place in its local parameter.
struct LocalChart {
  LaurentSeries x;
  LaurentSeries y;
  int rel_prec;  // relative precision of both series
};

/**
 * One of three plane models over GF(q): the projective line, an elliptic curve
 * y^2 = x^3 + a x + b (characteristic >= 5), or the Hermitian curve
 * y^u + y = x^(u+1) over GF(u^2).
 *
 * Functions regular away from infinity are written in the reduced monomials
 * x^i y^j (j below the y-degree), which have pairwise distinct pole orders at
 * infinity.
 */
class Curve : public std::enable_shared_from_this<Curve> {
 public:
  static CurvePtr rational(std::uint32_t q);
  static CurvePtr elliptic(std::uint32_t q, Elem a, Elem b);
  static CurvePtr hermitian(std::uint32_t u);
  /// `rational:q=5`, `elliptic:q=5,a=1,b=1`, `hermitian:u=2`.
  static CurvePtr parse(std::string_view spec);

  CurveKind kind() const noexcept { return kind_; }
  const Field& field() const noexcept { return *field_; }
  int genus() const noexcept { return genus_; }
  std::string spec() const;
  Elem a() const noexcept { return a_; }
  Elem b() const noexcept { return b_; }
  std::uint32_t hermitian_u() const noexcept { return u_; }

  /// Pole orders of x and y at infinity (y is unused on the rational line).
  int x_pole() const noexcept { return x_pole_; }
  int y_pole() const noexcept { return y_pole_; }
  /// Number of powers of y in the reduced monomials (1, 2 or u).
  int y_degree() const noexcept { return y_degree_; }

  bool is_pole_number(int k) const;
  /// Exponents (i, j) of the reduced monomial with pole order k, if k is a pole number.
  std::optional<std::pair<int, int>> monomial_exponents(int k) const;

  /// F(x, y) with F = 0 the affine equation (always 0 on the rational line).
  Elem equation(Elem x, Elem y) const;
  Elem equation_dx(Elem x, Elem y) const;
  Elem equation_dy(Elem x, Elem y) const;
  LaurentSeries equation(const LaurentSeries& x, const LaurentSeries& y) const;
  bool contains(const Place& p) const;

  /// All rational places, affine sorted by (x, y) codes, infinity last.
  const std::vector<Place>& rational_places() const noexcept { return places_; }
  std::vector<Place> affine_places() const;
  std::vector<Place> fiber_x(Elem a) const;
  std::vector<Place> fiber_y(Elem b) const;

  /// True if the local parameter at an affine place is x - x0 (otherwise y - y0).
  bool x_is_local_parameter(const Place& p) const;

  // Numerator arithmetic.
  CurvePoly monomial_poly(int i, int j) const;
  CurvePoly poly_mul(const CurvePoly& a, const CurvePoly& b) const;
  CurvePoly poly_add(const CurvePoly& a, const CurvePoly& b) const;
  CurvePoly poly_scale(const CurvePoly& a, Elem c) const;
  CurvePoly shift_poly(const ShiftForm& s) const;
  Elem poly_eval(const CurvePoly& a, Elem x, Elem y) const;

  /// Coordinate expansions with at least `rel_prec` known terms each. Cached.
  LocalChart chart(const Place& p, int rel_prec) const;

 private:
  Curve(CurveKind kind, const Field& field, Elem a, Elem b, std::uint32_t u);
  void enumerate_places();
  LocalChart compute_chart(const Place& p, int rel_prec) const;

  CurveKind kind_;
  const Field* field_;
  Elem a_ = 0;
  Elem b_ = 0;
  std::uint32_t u_ = 0;
  int genus_ = 0;
  int x_pole_ = 1;
  int y_pole_ = 0;
  int y_degree_ = 1;
  std::vector<Place> places_;

  mutable std::mutex cache_mutex_;
  mutable std::map<Place, LocalChart> charts_;
  mutable std::map<std::pair<int, int>, CurvePoly> reductions_;
};

/// An element of the function field as numerator / product of shift forms.
class FunctionRep {
 public:
  using Denominator = std::vector<std::pair<ShiftForm, int>>;

  FunctionRep(CurvePtr curve, CurvePoly numerator, Denominator denominator = {});

  static FunctionRep constant(CurvePtr curve, Elem c);
  static FunctionRep x(CurvePtr curve);
  static FunctionRep y(CurvePtr curve);
  /// The reduced monomial with pole order k; throws if k is a gap.
  static FunctionRep monomial(CurvePtr curve, int k);
  static FunctionRep shift(CurvePtr curve, const ShiftForm& s);
  /// 1 / s^e.
  static FunctionRep inverse_shift(CurvePtr curve, const ShiftForm& s, int e = 1);

  const Curve& curve() const noexcept { return *curve_; }
  const CurvePtr& curve_ptr() const noexcept { return curve_; }
  const CurvePoly& numerator() const noexcept { return num_; }
  const Denominator& denominator() const noexcept { return den_; }
  /// Pole order at infinity of the numerator.
  int pole_bound() const noexcept { return static_cast<int>(num_.size()) - 1; }
  bool numerator_is_zero() const noexcept { return num_.empty(); }

  /// Numerator over a larger denominator `target` (which must divide-contain this one).
  CurvePoly numerator_over(const Denominator& target) const;

  FunctionRep scaled(Elem c) const;
  std::string to_string() const;

 private:
  CurvePtr curve_;
  CurvePoly num_;
  Denominator den_;  // sorted by form, positive exponents
};

FunctionRep operator*(const FunctionRep& a, const FunctionRep& b);
FunctionRep operator+(const FunctionRep& a, const FunctionRep& b);
FunctionRep operator-(const FunctionRep& a, const FunctionRep& b);

/// Least common multiple of denominators.
FunctionRep::Denominator common_denominator(const std::vector<FunctionRep>& fs);
/// sum coeffs[i] * fs[i]; all on the same curve.
FunctionRep linear_combination(const std::vector<FunctionRep>& fs, const std::vector<Elem>& coeffs);

const std::vector<Place>& rational_places(const Curve& curve);
FunctionRep local_parameter(const CurvePtr& curve, const Place& place);
/// Coordinate series such that F(x, y) is zero to precision at least `depth`.
std::pair<LaurentSeries, LaurentSeries> expand_coordinates(const Curve& curve, const Place& place, int depth);
/// Expansion of f at `place`, known at least up to O(t^prec).
LaurentSeries expand_function(const FunctionRep& f, const Place& place, int prec);
/// Exact valuation; throws IndeterminateValuation for the zero function.
int valuation_at(const FunctionRep& f, const Place& place);
FieldElement evaluate(const FunctionRep& f, const Place& place);
Divisor principal_divisor_of_shift(const CurvePtr& curve, const ShiftForm& form);
/// Basis of L(M * infinity), sorted by (pairwise distinct) pole order.
std::vector<std::pair<FunctionRep, int>> one_point_basis(const CurvePtr& curve, int M);

}  // namespace agdmm
