#pragma once

#include <string>
#include <vector>

#include "agdmm/field.hpp"

namespace agdmm {

/**
 * Truncated Laurent series sum_{k >= lead} c_k t^k + O(t^prec).
 *
 * Coefficients are stored densely from `lead` up to the last nonzero one; the
 * remaining exponents below `prec` are known to be zero. A nonzero
 * series always has a nonzero coefficient at `lead`, so lead() is its exact
 * valuation. The zero series has lead == prec and only says "valuation >= prec".
 */
class LaurentSeries {
 public:
  /// Normalizes: leading zeros are dropped, entries at or beyond prec are ignored.
  LaurentSeries(const Field& field, int lead, int prec, std::vector<Elem> coeffs);

  static LaurentSeries zero(const Field& field, int prec);
  static LaurentSeries constant(const Field& field, Elem c, int prec);
  /// c * t^k + O(t^prec); zero series if c == 0 or k >= prec.
  static LaurentSeries monomial(const Field& field, Elem c, int k, int prec);

  const Field& field() const noexcept { return *field_; }
  int lead() const noexcept { return lead_; }
  int prec() const noexcept { return prec_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }
  /// Number of known terms past the valuation.
  int relative_prec() const noexcept { return prec_ - lead_; }
  /// Number of stored coefficients; everything past them up to prec is zero.
  int terms() const noexcept { return static_cast<int>(coeffs_.size()); }

  /// Exact valuation; throws IndeterminateValuation for the zero series.
  int valuation() const;

  /// Coefficient of t^k. Zero below lead, PrecisionExceeded at or beyond prec.
  Elem coeff(int k) const;
  FieldElement coeff_at(int k) const { return {*field_, coeff(k)}; }

  /// Same series with precision lowered to min(prec, new_prec).
  LaurentSeries truncated(int new_prec) const;
  LaurentSeries scaled(Elem c) const;
  /// Multiplication by t^k.
  LaurentSeries shifted(int k) const;
  LaurentSeries pow(int k) const;

  std::string to_string() const;

  friend bool operator==(const LaurentSeries& a, const LaurentSeries& b) noexcept {
    return a.field_ == b.field_ && a.lead_ == b.lead_ && a.prec_ == b.prec_ && a.coeffs_ == b.coeffs_;
  }

 private:
  void normalize();

  const Field* field_;
  int lead_;
  int prec_;
  std::vector<Elem> coeffs_;  // coeffs_[i] is the coefficient of t^(lead_ + i)
};

LaurentSeries series_add(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries series_sub(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries series_mul(const LaurentSeries& a, const LaurentSeries& b);
/// Throws IndeterminateValuation when `a` is zero to its precision.
LaurentSeries series_inv(const LaurentSeries& a);
LaurentSeries series_div(const LaurentSeries& a, const LaurentSeries& b);
FieldElement coeff_at(const LaurentSeries& a, int k);

inline LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) { return series_add(a, b); }
inline LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) { return series_sub(a, b); }
inline LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) { return series_mul(a, b); }

}  // namespace agdmm
