#include "agdmm/series.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

namespace agdmm {

namespace {
constexpr int kMaxInverseTerms = 1 << 16;
}  // namespace

LaurentSeries::LaurentSeries(const Field& field, int lead, int prec, std::vector<Elem> coeffs)
    : field_(&field), lead_(lead), prec_(prec), coeffs_(std::move(coeffs)) {
  for (Elem c : coeffs_)
    if (!field.contains(c)) throw std::invalid_argument("series coefficient out of range for " + field.name());
  normalize();
}

void LaurentSeries::normalize() {
  if (lead_ >= prec_) {
    coeffs_.clear();
    lead_ = prec_;
    return;
  }
  if (coeffs_.size() > static_cast<std::size_t>(prec_ - lead_)) coeffs_.resize(static_cast<std::size_t>(prec_ - lead_));
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  auto first = std::find_if(coeffs_.begin(), coeffs_.end(), [](Elem c) { return c != 0; });
  if (first == coeffs_.end()) {
    coeffs_.clear();
    lead_ = prec_;
    return;
  }
  lead_ += static_cast<int>(first - coeffs_.begin());
  coeffs_.erase(coeffs_.begin(), first);
}

LaurentSeries LaurentSeries::zero(const Field& field, int prec) { return {field, prec, prec, {}}; }

LaurentSeries LaurentSeries::constant(const Field& field, Elem c, int prec) { return monomial(field, c, 0, prec); }

LaurentSeries LaurentSeries::monomial(const Field& field, Elem c, int k, int prec) {
  if (c == 0 || k >= prec) return zero(field, prec);
  return {field, k, prec, {c}};
}

int LaurentSeries::valuation() const {
  if (is_zero())
    throw IndeterminateValuation("series is zero up to O(t^" + std::to_string(prec_) + ")");
  return lead_;
}

Elem LaurentSeries::coeff(int k) const {
  if (k >= prec_)
    throw PrecisionExceeded("coefficient of t^" + std::to_string(k) + " requested, series known only up to O(t^" +
                            std::to_string(prec_) + ")");
  if (k < lead_ || k - lead_ >= static_cast<int>(coeffs_.size())) return 0;
  return coeffs_[static_cast<std::size_t>(k - lead_)];
}

LaurentSeries LaurentSeries::truncated(int new_prec) const {
  if (new_prec >= prec_) return *this;
  if (is_zero()) return zero(*field_, new_prec);
  return {*field_, lead_, new_prec, coeffs_};
}

LaurentSeries LaurentSeries::scaled(Elem c) const {
  std::vector<Elem> out(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] = field_->mul(c, coeffs_[i]);
  return {*field_, lead_, prec_, std::move(out)};
}

LaurentSeries LaurentSeries::shifted(int k) const { return {*field_, lead_ + k, prec_ + k, coeffs_}; }

LaurentSeries LaurentSeries::pow(int k) const {
  if (k < 0) return series_inv(*this).pow(-k);
  if (k == 0) return constant(*field_, 1, std::max(relative_prec(), 1));
  LaurentSeries base = *this;
  std::optional<LaurentSeries> result;
  while (true) {
    if (k & 1) result = result ? series_mul(*result, base) : base;
    k >>= 1;
    if (k == 0) break;
    base = series_mul(base, base);
  }
  return *result;
}

std::string LaurentSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    if (!first) os << " + ";
    os << coeffs_[i] << "*t^" << (lead_ + static_cast<int>(i));
    first = false;
  }
  if (!first) os << " + ";
  os << "O(t^" << prec_ << ")";
  return os.str();
}

LaurentSeries series_add(const LaurentSeries& a, const LaurentSeries& b) {
  if (&a.field() != &b.field()) throw FieldMismatch();
  const Field& f = a.field();
  const int prec = std::min(a.prec(), b.prec());
  const int lead = std::min(a.lead(), b.lead());
  if (lead >= prec) return LaurentSeries::zero(f, prec);
  const int end = std::min(prec, std::max(a.lead() + a.terms(), b.lead() + b.terms()));
  std::vector<Elem> out(static_cast<std::size_t>(std::max(end - lead, 0)), 0);
  for (int k = lead; k < end; ++k) out[k - lead] = f.add(a.coeff(k), b.coeff(k));
  return {f, lead, prec, std::move(out)};
}

LaurentSeries series_sub(const LaurentSeries& a, const LaurentSeries& b) { return series_add(a, b.scaled(b.field().neg(1))); }

LaurentSeries series_mul(const LaurentSeries& a, const LaurentSeries& b) {
  if (&a.field() != &b.field()) throw FieldMismatch();
  const Field& f = a.field();
  const int prec = std::min(a.prec() + b.lead(), b.prec() + a.lead());
  if (a.is_zero() || b.is_zero()) return LaurentSeries::zero(f, prec);
  const int lead = a.lead() + b.lead();
  if (lead >= prec) return LaurentSeries::zero(f, prec);
  const int len = std::min(prec - lead, a.terms() + b.terms() - 1);
  std::vector<Elem> out(static_cast<std::size_t>(len), 0);
  const int la = std::min(a.terms(), len);
  const int lb = std::min(b.terms(), len);
  for (int i = 0; i < la; ++i) {
    const Elem ai = a.coeff(a.lead() + i);
    if (ai == 0) continue;
    for (int j = 0; j < lb && i + j < len; ++j) out[i + j] = f.add(out[i + j], f.mul(ai, b.coeff(b.lead() + j)));
  }
  return {f, lead, prec, std::move(out)};
}

LaurentSeries series_inv(const LaurentSeries& a) {
  const Field& f = a.field();
  const int v = a.valuation();
  const int len = a.relative_prec();
  if (len > kMaxInverseTerms) throw PrecisionExceeded("inverse of a series with unbounded precision");
  std::vector<Elem> u(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) u[i] = a.coeff(v + i);
  const Elem u0_inv = f.inv(u[0]);
  std::vector<Elem> w(static_cast<std::size_t>(len), 0);
  w[0] = u0_inv;
  for (int k = 1; k < len; ++k) {
    Elem acc = 0;
    for (int i = 1; i <= k; ++i) acc = f.add(acc, f.mul(u[i], w[k - i]));
    w[k] = f.neg(f.mul(acc, u0_inv));
  }
  return {f, -v, -v + len, std::move(w)};
}

LaurentSeries series_div(const LaurentSeries& a, const LaurentSeries& b) { return series_mul(a, series_inv(b)); }

FieldElement coeff_at(const LaurentSeries& a, int k) { return a.coeff_at(k); }

}  // namespace agdmm
