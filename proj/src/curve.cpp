#include "agdmm/curve.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace agdmm {

namespace {

// Precision used for series that are exact (constants, the parameter itself).
constexpr int kExact = 1 << 20;

bool is_prime_power(std::uint32_t n) {
  if (n < 2) return false;
  std::uint32_t p = 2;
  while (n % p != 0) ++p;
  while (n % p == 0) n /= p;
  return n == 1;
}

void trim(CurvePoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

std::uint32_t parse_uint(std::string_view text, std::string_view what) {
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("invalid value for " + std::string(what) + ": '" + std::string(text) + "'");
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string Place::to_string() const {
  if (at_infinity) return "inf";
  return "(" + std::to_string(x) + "," + std::to_string(y) + ")";
}

Divisor Divisor::single(const Place& p, int n) {
  Divisor d;
  d.add(p, n);
  return d;
}

int Divisor::coefficient(const Place& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? 0 : it->second;
}

void Divisor::add(const Place& p, int n) {
  if (n == 0) return;
  int& v = terms_[p];
  v += n;
  if (v == 0) terms_.erase(p);
}

int Divisor::degree() const noexcept {
  int d = 0;
  for (const auto& [p, n] : terms_) d += n;
  return d;
}

bool Divisor::is_effective() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second > 0; });
}

std::vector<Place> Divisor::support() const {
  std::vector<Place> out;
  for (const auto& [p, n] : terms_) out.push_back(p);
  return out;
}

Divisor Divisor::positive_part() const {
  Divisor d;
  for (const auto& [p, n] : terms_)
    if (n > 0) d.terms_.emplace(p, n);
  return d;
}

Divisor Divisor::negative_part() const {
  Divisor d;
  for (const auto& [p, n] : terms_)
    if (n < 0) d.terms_.emplace(p, -n);
  return d;
}

Divisor& Divisor::operator+=(const Divisor& o) {
  for (const auto& [p, n] : o.terms_) add(p, n);
  return *this;
}

Divisor& Divisor::operator-=(const Divisor& o) {
  for (const auto& [p, n] : o.terms_) add(p, -n);
  return *this;
}

Divisor operator*(int k, const Divisor& d) {
  Divisor out;
  for (const auto& [p, n] : d.terms_) out.add(p, k * n);
  return out;
}

std::string Divisor::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, n] : terms_) {
    if (first)
      os << (n < 0 ? "-" : "");
    else
      os << (n < 0 ? " - " : " + ");
    const int a = n < 0 ? -n : n;
    if (a != 1) os << a << "*";
    os << p.to_string();
    first = false;
  }
  return os.str();
}

std::string ShiftForm::to_string() const {
  return std::string("(") + (var == Var::X ? "x" : "y") + "-" + std::to_string(value) + ")";
}

// ---------------------------------------------------------------------------

Curve::Curve(CurveKind kind, const Field& field, Elem a, Elem b, std::uint32_t u)
    : kind_(kind), field_(&field), a_(a), b_(b), u_(u) {
  switch (kind_) {
    case CurveKind::Rational:
      genus_ = 0;
      x_pole_ = 1;
      y_pole_ = 0;
      y_degree_ = 1;
      break;
    case CurveKind::Elliptic:
      genus_ = 1;
      x_pole_ = 2;
      y_pole_ = 3;
      y_degree_ = 2;
      break;
    case CurveKind::Hermitian:
      genus_ = static_cast<int>(u * (u - 1) / 2);
      x_pole_ = static_cast<int>(u);
      y_pole_ = static_cast<int>(u + 1);
      y_degree_ = static_cast<int>(u);
      break;
  }
  enumerate_places();
}

CurvePtr Curve::rational(std::uint32_t q) {
  return CurvePtr(new Curve(CurveKind::Rational, Field::get(q), 0, 0, 0));
}

CurvePtr Curve::elliptic(std::uint32_t q, Elem a, Elem b) {
  const Field& f = Field::get(q);
  if (f.p() < 5) throw std::invalid_argument("elliptic curves require characteristic at least 5");
  if (!f.contains(a) || !f.contains(b)) throw std::invalid_argument("elliptic coefficients out of range");
  const Elem disc = f.add(f.mul(f.from_int(4), f.pow(a, 3)), f.mul(f.from_int(27), f.mul(b, b)));
  if (disc == 0) throw std::invalid_argument("singular elliptic curve: 4a^3 + 27b^2 = 0");
  return CurvePtr(new Curve(CurveKind::Elliptic, f, a, b, 0));
}

CurvePtr Curve::hermitian(std::uint32_t u) {
  if (!is_prime_power(u) || u > 256) throw std::invalid_argument("hermitian curve needs a prime power u <= 256");
  return CurvePtr(new Curve(CurveKind::Hermitian, Field::get(u * u), 0, 0, u));
}

CurvePtr Curve::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view family = spec.substr(0, colon);
  std::map<std::string, std::uint32_t, std::less<>> params;
  if (colon != std::string_view::npos) {
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ParseError("curve parameter without '=': '" + std::string(item) + "'");
      const std::string key(item.substr(0, eq));
      if (params.count(key)) throw ParseError("duplicate curve parameter '" + key + "'");
      params[key] = parse_uint(item.substr(eq + 1), key);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
  }
  auto take = [&](const char* key) {
    auto it = params.find(key);
    if (it == params.end()) throw ParseError("curve spec '" + std::string(spec) + "' lacks " + key);
    const auto v = it->second;
    params.erase(it);
    return v;
  };
  CurvePtr out;
  try {
    if (family == "rational") {
      out = rational(take("q"));
    } else if (family == "elliptic") {
      const auto q = take("q");
      const auto a = take("a");
      const auto b = take("b");
      out = elliptic(q, a, b);
    } else if (family == "hermitian") {
      out = hermitian(take("u"));
    } else {
      throw ParseError("unknown curve family '" + std::string(family) + "'");
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  if (!params.empty()) throw ParseError("unknown curve parameter '" + params.begin()->first + "'");
  return out;
}

std::string Curve::spec() const {
  switch (kind_) {
    case CurveKind::Rational: return "rational:q=" + std::to_string(field_->q());
    case CurveKind::Elliptic:
      return "elliptic:q=" + std::to_string(field_->q()) + ",a=" + std::to_string(a_) + ",b=" + std::to_string(b_);
    case CurveKind::Hermitian: return "hermitian:u=" + std::to_string(u_);
  }
  return {};
}

bool Curve::is_pole_number(int k) const { return monomial_exponents(k).has_value(); }

std::optional<std::pair<int, int>> Curve::monomial_exponents(int k) const {
  if (k < 0) return std::nullopt;
  switch (kind_) {
    case CurveKind::Rational: return std::pair{k, 0};
    case CurveKind::Elliptic:
      if (k % 2 == 0) return std::pair{k / 2, 0};
      if (k >= 3) return std::pair{(k - 3) / 2, 1};
      return std::nullopt;
    case CurveKind::Hermitian: {
      const int u = static_cast<int>(u_);
      const int j = k % u;
      const int rest = k - j * (u + 1);
      if (rest < 0) return std::nullopt;
      return std::pair{rest / u, j};
    }
  }
  return std::nullopt;
}

Elem Curve::equation(Elem x, Elem y) const {
  const Field& f = *field_;
  switch (kind_) {
    case CurveKind::Rational: return 0;
    case CurveKind::Elliptic:
      return f.sub(f.mul(y, y), f.add(f.add(f.pow(x, 3), f.mul(a_, x)), b_));
    case CurveKind::Hermitian: return f.sub(f.add(f.pow(y, u_), y), f.pow(x, u_ + 1));
  }
  return 0;
}

Elem Curve::equation_dx(Elem x, Elem) const {
  const Field& f = *field_;
  switch (kind_) {
    case CurveKind::Rational: return 0;
    case CurveKind::Elliptic: return f.neg(f.add(f.mul(f.from_int(3), f.mul(x, x)), a_));
    case CurveKind::Hermitian: return f.neg(f.mul(f.from_int(u_ + 1), f.pow(x, u_)));
  }
  return 0;
}

Elem Curve::equation_dy(Elem, Elem y) const {
  const Field& f = *field_;
  switch (kind_) {
    case CurveKind::Rational: return 1;
    case CurveKind::Elliptic: return f.mul(f.from_int(2), y);
    case CurveKind::Hermitian: return f.add(f.mul(f.from_int(u_), f.pow(y, u_ - 1)), 1);
  }
  return 0;
}

LaurentSeries Curve::equation(const LaurentSeries& x, const LaurentSeries& y) const {
  const Field& f = *field_;
  switch (kind_) {
    case CurveKind::Rational: return LaurentSeries::zero(f, std::min(x.prec(), y.prec()));
    case CurveKind::Elliptic: {
      const LaurentSeries rhs = x.pow(3) + x.scaled(a_) + LaurentSeries::constant(f, b_, kExact);
      return y.pow(2) - rhs;
    }
    case CurveKind::Hermitian: return y.pow(static_cast<int>(u_)) + y - x.pow(static_cast<int>(u_ + 1));
  }
  return LaurentSeries::zero(f, 0);
}

bool Curve::contains(const Place& p) const {
  if (p.at_infinity) return true;
  if (!field_->contains(p.x) || !field_->contains(p.y)) return false;
  if (kind_ == CurveKind::Rational) return p.y == 0;
  return equation(p.x, p.y) == 0;
}

void Curve::enumerate_places() {
  const std::uint32_t q = field_->q();
  if (kind_ == CurveKind::Rational) {
    for (Elem x = 0; x < q; ++x) places_.push_back(Place::affine(x, 0));
  } else {
    for (Elem x = 0; x < q; ++x)
      for (Elem y = 0; y < q; ++y)
        if (equation(x, y) == 0) places_.push_back(Place::affine(x, y));
  }
  places_.push_back(Place::infinity());
}

std::vector<Place> Curve::affine_places() const { return {places_.begin(), places_.end() - 1}; }

std::vector<Place> Curve::fiber_x(Elem a) const {
  std::vector<Place> out;
  for (const auto& p : places_)
    if (!p.at_infinity && p.x == a) out.push_back(p);
  return out;
}

std::vector<Place> Curve::fiber_y(Elem b) const {
  std::vector<Place> out;
  if (kind_ == CurveKind::Rational) return out;
  for (const auto& p : places_)
    if (!p.at_infinity && p.y == b) out.push_back(p);
  return out;
}

bool Curve::x_is_local_parameter(const Place& p) const {
  if (p.at_infinity) return false;
  if (kind_ == CurveKind::Rational) return true;
  return equation_dy(p.x, p.y) != 0;
}

CurvePoly Curve::monomial_poly(int i, int j) const {
  if (j < y_degree_) {
    CurvePoly out(static_cast<std::size_t>(i * x_pole_ + j * y_pole_) + 1, 0);
    out.back() = 1;
    return out;
  }
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = reductions_.find({i, j}); it != reductions_.end()) return it->second;
  }
  const Field& f = *field_;
  // Rewrite y^deg with the curve equation until every y-exponent is reduced.
  std::map<std::pair<int, int>, Elem> work{{{i, j}, 1}};
  std::map<std::pair<int, int>, Elem> done;
  auto bump = [&f](std::map<std::pair<int, int>, Elem>& m, std::pair<int, int> key, Elem c) {
    Elem& v = m[key];
    v = f.add(v, c);
  };
  while (!work.empty()) {
    auto it = std::prev(work.end());
    auto [key, c] = *it;
    work.erase(it);
    if (c == 0) continue;
    auto [xi, yj] = key;
    if (yj < y_degree_) {
      bump(done, key, c);
      continue;
    }
    if (kind_ == CurveKind::Elliptic) {
      bump(work, {xi + 3, yj - 2}, c);
      bump(work, {xi + 1, yj - 2}, f.mul(c, a_));
      bump(work, {xi, yj - 2}, f.mul(c, b_));
    } else {
      const int u = static_cast<int>(u_);
      bump(work, {xi + u + 1, yj - u}, c);
      bump(work, {xi, yj - u + 1}, f.neg(c));
    }
  }
  CurvePoly out;
  for (const auto& [key, c] : done) {
    const std::size_t k = static_cast<std::size_t>(key.first * x_pole_ + key.second * y_pole_);
    if (out.size() <= k) out.resize(k + 1, 0);
    out[k] = f.add(out[k], c);
  }
  trim(out);
  std::lock_guard lock(cache_mutex_);
  reductions_.emplace(std::pair{i, j}, out);
  return out;
}

CurvePoly Curve::poly_mul(const CurvePoly& a, const CurvePoly& b) const {
  if (a.empty() || b.empty()) return {};
  const Field& f = *field_;
  CurvePoly out(a.size() + b.size() - 1, 0);
  for (std::size_t ka = 0; ka < a.size(); ++ka) {
    if (a[ka] == 0) continue;
    const auto ea = *monomial_exponents(static_cast<int>(ka));
    for (std::size_t kb = 0; kb < b.size(); ++kb) {
      if (b[kb] == 0) continue;
      const Elem c = f.mul(a[ka], b[kb]);
      const auto eb = *monomial_exponents(static_cast<int>(kb));
      const int j = ea.second + eb.second;
      if (j < y_degree_) {
        out[ka + kb] = f.add(out[ka + kb], c);
        continue;
      }
      const CurvePoly red = monomial_poly(ea.first + eb.first, j);
      for (std::size_t k = 0; k < red.size(); ++k)
        if (red[k] != 0) out[k] = f.add(out[k], f.mul(c, red[k]));
    }
  }
  trim(out);
  return out;
}

CurvePoly Curve::poly_add(const CurvePoly& a, const CurvePoly& b) const {
  CurvePoly out(std::max(a.size(), b.size()), 0);
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = field_->add(k < a.size() ? a[k] : 0, k < b.size() ? b[k] : 0);
  trim(out);
  return out;
}

CurvePoly Curve::poly_scale(const CurvePoly& a, Elem c) const {
  if (c == 0) return {};
  CurvePoly out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = field_->mul(c, a[k]);
  return out;
}

CurvePoly Curve::shift_poly(const ShiftForm& s) const {
  if (s.var == ShiftForm::Var::Y && kind_ == CurveKind::Rational)
    throw std::invalid_argument("y is not a coordinate on the rational line");
  const int pole = s.var == ShiftForm::Var::X ? x_pole_ : y_pole_;
  CurvePoly out(static_cast<std::size_t>(pole) + 1, 0);
  out[0] = field_->neg(s.value);
  out[pole] = 1;
  return out;
}

Elem Curve::poly_eval(const CurvePoly& a, Elem x, Elem y) const {
  const Field& f = *field_;
  Elem acc = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0) continue;
    const auto [i, j] = *monomial_exponents(static_cast<int>(k));
    acc = f.add(acc, f.mul(a[k], f.mul(f.pow(x, i), f.pow(y, j))));
  }
  return acc;
}

LocalChart Curve::chart(const Place& p, int rel_prec) const {
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = charts_.find(p); it != charts_.end() && it->second.rel_prec >= rel_prec) return it->second;
  }
  LocalChart c = compute_chart(p, rel_prec);
  std::lock_guard lock(cache_mutex_);
  auto [it, inserted] = charts_.try_emplace(p, c);
  if (!inserted && it->second.rel_prec < c.rel_prec) it->second = c;
  return c;
}

LocalChart Curve::compute_chart(const Place& p, int r) const {
  const Field& f = *field_;
  r = std::max(r, 1);
  const LaurentSeries tau = LaurentSeries::monomial(f, 1, 1, kExact);
  if (kind_ == CurveKind::Rational) {
    if (p.at_infinity) return {LaurentSeries::monomial(f, 1, -1, -1 + r), LaurentSeries::zero(f, r), r};
    return {LaurentSeries(f, 0, r, {p.x, 1}), LaurentSeries::zero(f, r), r};
  }
  if (p.at_infinity) {
    // w = 1/y as a series in tau = x/y, from the equation divided by y^(deg+1).
    const int wv = y_pole_;
    const int wprec = r + wv;
    LaurentSeries w = LaurentSeries::monomial(f, 1, wv, wprec);
    const LaurentSeries lead = w;
    for (int iter = 0; iter <= wprec; ++iter) {
      LaurentSeries next = lead;
      if (kind_ == CurveKind::Elliptic) {
        next = next + (tau * w.pow(2)).scaled(a_) + w.pow(3).scaled(b_);
      } else {
        next = next - w.pow(static_cast<int>(u_));
      }
      next = next.truncated(wprec);
      if (next == w) break;
      w = next;
    }
    const LaurentSeries y = series_inv(w);
    return {tau * y, y, r};
  }
  // Affine: one coordinate is the parameter, the other is lifted by Newton iteration.
  const bool by_x = x_is_local_parameter(p);
  LaurentSeries free_coord(f, 0, r, {by_x ? p.x : p.y, 1});
  LaurentSeries lifted = LaurentSeries::constant(f, by_x ? p.y : p.x, r);
  for (int iter = 0; iter < 64; ++iter) {
    const LaurentSeries& xs = by_x ? free_coord : lifted;
    const LaurentSeries& ys = by_x ? lifted : free_coord;
    const LaurentSeries residual = equation(xs, ys).truncated(r);
    if (residual.is_zero()) break;
    LaurentSeries deriv = LaurentSeries::zero(f, r);
    if (kind_ == CurveKind::Elliptic) {
      deriv = by_x ? ys.scaled(f.from_int(2))
                   : (xs.pow(2).scaled(f.from_int(3)) + LaurentSeries::constant(f, a_, kExact)).scaled(f.neg(1));
    } else {
      deriv = by_x ? (ys.pow(static_cast<int>(u_ - 1)).scaled(f.from_int(u_)) + LaurentSeries::constant(f, 1, kExact))
                   : xs.pow(static_cast<int>(u_)).scaled(f.neg(f.from_int(u_ + 1)));
    }
    lifted = (lifted - residual * series_inv(deriv.truncated(r))).truncated(r);
  }
  if (by_x) return {free_coord, lifted, r};
  return {lifted, free_coord, r};
}

// ---------------------------------------------------------------------------

FunctionRep::FunctionRep(CurvePtr curve, CurvePoly numerator, Denominator denominator)
    : curve_(std::move(curve)), num_(std::move(numerator)) {
  if (!curve_) throw std::invalid_argument("function without a curve");
  trim(num_);
  for (Elem c : num_)
    if (!curve_->field().contains(c)) throw std::invalid_argument("numerator coefficient out of range");
  for (std::size_t k = 0; k < num_.size(); ++k)
    if (num_[k] != 0 && !curve_->is_pole_number(static_cast<int>(k)))
      throw std::invalid_argument("numerator has a coefficient at gap " + std::to_string(k));
  std::map<ShiftForm, int> merged;
  for (const auto& [s, e] : denominator) {
    if (e < 0) throw std::invalid_argument("negative denominator exponent");
    if (s.var == ShiftForm::Var::Y && curve_->kind() == CurveKind::Rational)
      throw std::invalid_argument("y is not a coordinate on the rational line");
    if (e > 0) merged[s] += e;
  }
  den_.assign(merged.begin(), merged.end());
}

FunctionRep FunctionRep::constant(CurvePtr curve, Elem c) { return {std::move(curve), CurvePoly{c}}; }

FunctionRep FunctionRep::x(CurvePtr curve) {
  const int k = curve->x_pole();
  CurvePoly num(static_cast<std::size_t>(k) + 1, 0);
  num[k] = 1;
  return {std::move(curve), std::move(num)};
}

FunctionRep FunctionRep::y(CurvePtr curve) {
  if (curve->kind() == CurveKind::Rational) throw std::invalid_argument("y is not a coordinate on the rational line");
  const int k = curve->y_pole();
  CurvePoly num(static_cast<std::size_t>(k) + 1, 0);
  num[k] = 1;
  return {std::move(curve), std::move(num)};
}

FunctionRep FunctionRep::monomial(CurvePtr curve, int k) {
  if (!curve->is_pole_number(k)) throw std::invalid_argument(std::to_string(k) + " is not a pole number at infinity");
  CurvePoly num(static_cast<std::size_t>(k) + 1, 0);
  num[k] = 1;
  return {std::move(curve), std::move(num)};
}

FunctionRep FunctionRep::shift(CurvePtr curve, const ShiftForm& s) {
  CurvePoly num = curve->shift_poly(s);
  return {std::move(curve), std::move(num)};
}

FunctionRep FunctionRep::inverse_shift(CurvePtr curve, const ShiftForm& s, int e) {
  return {std::move(curve), CurvePoly{1}, Denominator{{s, e}}};
}

CurvePoly FunctionRep::numerator_over(const Denominator& target) const {
  CurvePoly out = num_;
  std::map<ShiftForm, int> own(den_.begin(), den_.end());
  for (const auto& [s, e] : target) {
    const int have = own.count(s) ? own[s] : 0;
    if (have > e) throw std::invalid_argument("target denominator does not contain " + s.to_string());
    const CurvePoly sp = curve_->shift_poly(s);
    for (int k = have; k < e; ++k) out = curve_->poly_mul(out, sp);
    own.erase(s);
  }
  if (!own.empty()) throw std::invalid_argument("target denominator does not contain " + own.begin()->first.to_string());
  return out;
}

FunctionRep FunctionRep::scaled(Elem c) const { return {curve_, curve_->poly_scale(num_, c), den_}; }

std::string FunctionRep::to_string() const {
  std::ostringstream os;
  if (num_.empty()) {
    os << "0";
  } else {
    bool first = true;
    for (std::size_t k = num_.size(); k-- > 0;) {
      if (num_[k] == 0) continue;
      if (!first) os << " + ";
      first = false;
      const auto [i, j] = *curve_->monomial_exponents(static_cast<int>(k));
      os << num_[k];
      if (i > 0) os << "*x" << (i > 1 ? "^" + std::to_string(i) : "");
      if (j > 0) os << "*y" << (j > 1 ? "^" + std::to_string(j) : "");
    }
  }
  if (!den_.empty()) {
    os << " / ";
    for (const auto& [s, e] : den_) {
      os << s.to_string();
      if (e > 1) os << "^" << e;
    }
  }
  return os.str();
}

namespace {

void require_same_curve(const FunctionRep& a, const FunctionRep& b) {
  if (&a.curve() != &b.curve()) throw std::invalid_argument("functions live on different curves");
}

}  // namespace

FunctionRep operator*(const FunctionRep& a, const FunctionRep& b) {
  require_same_curve(a, b);
  FunctionRep::Denominator den = a.denominator();
  den.insert(den.end(), b.denominator().begin(), b.denominator().end());
  return {a.curve_ptr(), a.curve().poly_mul(a.numerator(), b.numerator()), den};
}

FunctionRep operator+(const FunctionRep& a, const FunctionRep& b) {
  require_same_curve(a, b);
  const auto den = common_denominator({a, b});
  return {a.curve_ptr(), a.curve().poly_add(a.numerator_over(den), b.numerator_over(den)), den};
}

FunctionRep operator-(const FunctionRep& a, const FunctionRep& b) { return a + b.scaled(a.curve().field().neg(1)); }

FunctionRep::Denominator common_denominator(const std::vector<FunctionRep>& fs) {
  std::map<ShiftForm, int> lcm;
  for (const auto& f : fs)
    for (const auto& [s, e] : f.denominator()) lcm[s] = std::max(lcm[s], e);
  return {lcm.begin(), lcm.end()};
}

FunctionRep linear_combination(const std::vector<FunctionRep>& fs, const std::vector<Elem>& coeffs) {
  if (fs.empty()) throw std::invalid_argument("linear combination of no functions");
  if (fs.size() != coeffs.size()) throw DimensionMismatch("coefficient count differs from function count");
  const auto den = common_denominator(fs);
  const Curve& c = fs.front().curve();
  CurvePoly acc;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    require_same_curve(fs.front(), fs[i]);
    if (coeffs[i] == 0) continue;
    acc = c.poly_add(acc, c.poly_scale(fs[i].numerator_over(den), coeffs[i]));
  }
  return {fs.front().curve_ptr(), std::move(acc), den};
}

// ---------------------------------------------------------------------------

const std::vector<Place>& rational_places(const Curve& curve) { return curve.rational_places(); }

FunctionRep local_parameter(const CurvePtr& curve, const Place& place) {
  if (!curve->contains(place)) throw std::invalid_argument("place " + place.to_string() + " is not on the curve");
  if (place.at_infinity) {
    if (curve->kind() == CurveKind::Rational) return FunctionRep::inverse_shift(curve, ShiftForm::x(0));
    return FunctionRep(curve, FunctionRep::x(curve).numerator(), {{ShiftForm::y(0), 1}});
  }
  if (curve->x_is_local_parameter(place)) return FunctionRep::shift(curve, ShiftForm::x(place.x));
  return FunctionRep::shift(curve, ShiftForm::y(place.y));
}

std::pair<LaurentSeries, LaurentSeries> expand_coordinates(const Curve& curve, const Place& place, int depth) {
  if (depth < 1) throw std::invalid_argument("expansion depth must be positive");
  if (!curve.contains(place)) throw std::invalid_argument("place " + place.to_string() + " is not on the curve");
  int r = depth;
  if (place.at_infinity && curve.kind() != CurveKind::Rational) r += curve.y_pole() * curve.y_degree();
  for (int attempt = 0; attempt < 16; ++attempt) {
    LocalChart c = curve.chart(place, r);
    if (curve.equation(c.x, c.y).prec() >= depth) return {c.x, c.y};
    r += depth;
  }
  throw std::logic_error("coordinate expansion did not reach the requested depth");
}

namespace {

LaurentSeries shift_series(const Field& f, const LocalChart& c, const ShiftForm& s) {
  const LaurentSeries& base = s.var == ShiftForm::Var::X ? c.x : c.y;
  return base - LaurentSeries::constant(f, s.value, kExact);
}

LaurentSeries expand_once(const FunctionRep& fn, const LocalChart& c) {
  const Curve& curve = fn.curve();
  const Field& f = curve.field();
  const CurvePoly& num = fn.numerator();
  int imax = 0, jmax = 0;
  for (std::size_t k = 0; k < num.size(); ++k) {
    if (num[k] == 0) continue;
    const auto [i, j] = *curve.monomial_exponents(static_cast<int>(k));
    imax = std::max(imax, i);
    jmax = std::max(jmax, j);
  }
  std::vector<LaurentSeries> xp{LaurentSeries::constant(f, 1, kExact)};
  std::vector<LaurentSeries> yp{LaurentSeries::constant(f, 1, kExact)};
  for (int i = 1; i <= imax; ++i) xp.push_back(xp.back() * c.x);
  for (int j = 1; j <= jmax; ++j) yp.push_back(yp.back() * c.y);
  std::optional<LaurentSeries> acc;
  for (std::size_t k = 0; k < num.size(); ++k) {
    if (num[k] == 0) continue;
    const auto [i, j] = *curve.monomial_exponents(static_cast<int>(k));
    LaurentSeries term = (xp[i] * yp[j]).scaled(num[k]);
    acc = acc ? *acc + term : term;
  }
  LaurentSeries result = *acc;
  if (!fn.denominator().empty()) {
    std::optional<LaurentSeries> den;
    for (const auto& [s, e] : fn.denominator()) {
      LaurentSeries t = shift_series(f, c, s).pow(e);
      den = den ? *den * t : t;
    }
    result = result * series_inv(*den);
  }
  return result;
}

}  // namespace

LaurentSeries expand_function(const FunctionRep& fn, const Place& place, int prec) {
  const Curve& curve = fn.curve();
  if (!curve.contains(place)) throw std::invalid_argument("place " + place.to_string() + " is not on the curve");
  if (fn.numerator_is_zero()) return LaurentSeries::zero(curve.field(), prec);
  int den_mass = 0;
  for (const auto& [s, e] : fn.denominator())
    den_mass += e * (s.var == ShiftForm::Var::X ? curve.x_pole() : curve.y_pole());
  int r = std::max(prec, 0) + 2;
  if (place.at_infinity) r += fn.pole_bound();
  for (int attempt = 0; attempt < 40; ++attempt) {
    const LocalChart c = curve.chart(place, r);
    try {
      LaurentSeries s = expand_once(fn, c);
      if (s.prec() >= prec) return s.truncated(prec);
      r += (prec - s.prec()) + 2;
    } catch (const IndeterminateValuation&) {
      r += den_mass + 2;
    }
  }
  throw std::logic_error("expansion did not reach the requested precision");
}

int valuation_at(const FunctionRep& fn, const Place& place) {
  if (fn.numerator_is_zero()) throw IndeterminateValuation("the zero function has no valuation");
  LaurentSeries s = expand_function(fn, place, 1);
  if (!s.is_zero()) return s.lead();
  int bound = fn.pole_bound();
  for (const auto& [sf, e] : fn.denominator())
    bound += e * (sf.var == ShiftForm::Var::X ? fn.curve().x_pole() : fn.curve().y_pole());
  s = expand_function(fn, place, bound + 1);
  if (s.is_zero()) throw std::logic_error("nonzero function expanded to zero beyond its zero count");
  return s.lead();
}

FieldElement evaluate(const FunctionRep& fn, const Place& place) {
  const Curve& curve = fn.curve();
  const Field& f = curve.field();
  if (!curve.contains(place)) throw std::invalid_argument("place " + place.to_string() + " is not on the curve");
  if (place.at_infinity) {
    const LaurentSeries s = expand_function(fn, place, 1);
    if (s.lead() < 0) throw EvaluationAtExcludedPlace("function has a pole at infinity");
    return s.coeff_at(0);
  }
  Elem den = 1;
  for (const auto& [s, e] : fn.denominator()) {
    const Elem v = f.sub(s.var == ShiftForm::Var::X ? place.x : place.y, s.value);
    den = f.mul(den, f.pow(v, e));
  }
  if (den == 0)
    throw EvaluationAtExcludedPlace("denominator vanishes at " + place.to_string());
  return {f, f.div(curve.poly_eval(fn.numerator(), place.x, place.y), den)};
}

Divisor principal_divisor_of_shift(const CurvePtr& curve, const ShiftForm& form) {
  const bool is_x = form.var == ShiftForm::Var::X;
  if (!is_x && curve->kind() == CurveKind::Rational)
    throw std::invalid_argument("y is not a coordinate on the rational line");
  if (!curve->field().contains(form.value)) throw std::invalid_argument("shift value out of range");
  const FunctionRep fn = FunctionRep::shift(curve, form);
  const int pole = is_x ? curve->x_pole() : curve->y_pole();
  Divisor d = Divisor::single(Place::infinity(), -pole);
  int zeros = 0;
  for (const auto& p : is_x ? curve->fiber_x(form.value) : curve->fiber_y(form.value)) {
    const int v = valuation_at(fn, p);
    d.add(p, v);
    zeros += v;
  }
  if (zeros != pole)
    throw NonSplitFiber(form.to_string() + " has " + std::to_string(pole - zeros) +
                        " zeros at places of degree greater than one");
  if (d.degree() != 0) throw std::logic_error("principal divisor of nonzero degree");
  return d;
}

std::vector<std::pair<FunctionRep, int>> one_point_basis(const CurvePtr& curve, int M) {
  if (M < 0) throw std::invalid_argument("pole bound must be non-negative");
  std::vector<std::pair<FunctionRep, int>> out;
  for (int k = 0; k <= M; ++k)
    if (curve->is_pole_number(k)) out.emplace_back(FunctionRep::monomial(curve, k), k);
  return out;
}

}  // namespace agdmm
