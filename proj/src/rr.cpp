#include "agdmm/rr.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

namespace agdmm {

namespace {

// Expansions of the reduced monomials with pole orders `ks` at an affine place, to O(t^prec).
std::vector<LaurentSeries> monomial_expansions(const Curve& curve, const Place& q, const std::vector<int>& ks,
                                               int prec) {
  const Field& f = curve.field();
  const LocalChart c = curve.chart(q, prec + 1);
  const LaurentSeries x = c.x.truncated(prec);
  const LaurentSeries y = c.y.truncated(prec);
  int imax = 0, jmax = 0;
  for (int k : ks) {
    const auto [i, j] = *curve.monomial_exponents(k);
    imax = std::max(imax, i);
    jmax = std::max(jmax, j);
  }
  std::vector<LaurentSeries> xp{LaurentSeries::constant(f, 1, prec)};
  std::vector<LaurentSeries> yp{LaurentSeries::constant(f, 1, prec)};
  for (int i = 1; i <= imax; ++i) xp.push_back((xp.back() * x).truncated(prec));
  for (int j = 1; j <= jmax; ++j) yp.push_back((yp.back() * y).truncated(prec));
  std::vector<LaurentSeries> out;
  out.reserve(ks.size());
  for (int k : ks) {
    const auto [i, j] = *curve.monomial_exponents(k);
    out.push_back((xp[i] * yp[j]).truncated(prec));
  }
  return out;
}

// Row-reduces so that the last nonzero column of each row is distinct and cleared in the others.
void echelon_from_right(const Field& f, std::vector<std::vector<Elem>>& rows) {
  if (rows.empty()) return;
  const int n = static_cast<int>(rows.front().size());
  std::size_t next = 0;
  for (int col = n - 1; col >= 0 && next < rows.size(); --col) {
    std::size_t piv = next;
    while (piv < rows.size() && rows[piv][col] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[next]);
    const Elem inv = f.inv(rows[next][col]);
    for (auto& e : rows[next]) e = f.mul(e, inv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == next || rows[r][col] == 0) continue;
      const Elem c = rows[r][col];
      for (int k = 0; k < n; ++k) rows[r][k] = f.sub(rows[r][k], f.mul(c, rows[next][k]));
    }
    ++next;
  }
}

int last_nonzero(const std::vector<Elem>& v) {
  for (int k = static_cast<int>(v.size()) - 1; k >= 0; --k)
    if (v[k] != 0) return k;
  return -1;
}

// Checks nu_Q(f) >= -n_Q at every place of supp(G).
void verify_membership(const FunctionRep& fn, const Divisor& G) {
  for (const auto& [place, n] : G.terms()) {
    const LaurentSeries s = expand_function(fn, place, -n);
    if (!s.is_zero() && s.lead() < -n)
      throw std::logic_error("basis member " + fn.to_string() + " violates the bound at " + place.to_string());
  }
}

}  // namespace

RRBasis riemann_roch_basis(const CurvePtr& curve, const Divisor& G, int expansion_prec) {
  for (const auto& p : G.support())
    if (!curve->contains(p))
      throw UnsupportedDivisor("place " + p.to_string() + " is not a rational place of " + curve->spec());
  RRBasis out{G, {}, {}};
  const int g = curve->genus();
  if (G.degree() < 0) return out;

  // Clear affine poles fiber by fiber.
  std::map<Elem, int> exps;
  std::map<Elem, Divisor> fibers;
  for (const auto& [place, n] : G.terms()) {
    if (place.at_infinity || n <= 0) continue;
    if (!fibers.contains(place.x)) fibers[place.x] = principal_divisor_of_shift(curve, ShiftForm::x(place.x));
    const int v = fibers[place.x].coefficient(place);
    exps[place.x] = std::max(exps[place.x], (n + v - 1) / v);
  }
  int M = G.coefficient(Place::infinity());
  for (const auto& [c, e] : exps) M += e * curve->x_pole();
  if (M < 0) return out;

  // Vanishing orders required of w = u f at affine places.
  std::map<Place, int> need;
  for (const auto& [c, e] : exps)
    for (const auto& [place, v] : fibers[c].terms()) {
      if (place.at_infinity) continue;
      const int d = e * v - G.coefficient(place);
      if (d > 0) need[place] = d;
    }
  for (const auto& [place, n] : G.terms())
    if (!place.at_infinity && n < 0 && !exps.contains(place.x)) need[place] = -n;

  std::vector<int> ks;
  for (int k = 0; k <= M; ++k)
    if (curve->is_pole_number(k)) ks.push_back(k);
  int rows = 0;
  for (const auto& [p, d] : need) rows += d;

  const Field& f = curve->field();
  std::vector<std::vector<Elem>> kernel;
  if (rows == 0) {
    for (std::size_t i = 0; i < ks.size(); ++i) {
      std::vector<Elem> e(ks.size(), 0);
      e[i] = 1;
      kernel.push_back(std::move(e));
    }
  } else {
    Matrix C(f, static_cast<std::size_t>(rows), ks.size());
    std::size_t r = 0;
    for (const auto& [place, d] : need) {
      const auto ser = monomial_expansions(*curve, place, ks, d);
      for (int k = 0; k < d; ++k, ++r)
        for (std::size_t col = 0; col < ks.size(); ++col) C(r, col) = ser[col].coeff(k);
    }
    kernel = solve_linear(C, Matrix(f, C.rows(), 1)).kernel_basis;
  }
  echelon_from_right(f, kernel);
  std::sort(kernel.begin(), kernel.end(),
            [](const auto& a, const auto& b) { return last_nonzero(a) < last_nonzero(b); });

  FunctionRep::Denominator den;
  for (const auto& [c, e] : exps) den.emplace_back(ShiftForm::x(c), e);
  for (const auto& vec : kernel) {
    CurvePoly num(static_cast<std::size_t>(ks.back() + 1), 0);
    for (std::size_t i = 0; i < ks.size(); ++i) num[static_cast<std::size_t>(ks[i])] = vec[i];
    out.members.emplace_back(curve, std::move(num), den);
  }

  const int dim = out.dimension();
  const int deg = G.degree();
  if (dim < deg - g + 1 || dim > deg + 1 || (deg >= 2 * g - 1 && dim != deg - g + 1))
    throw std::logic_error("dimension " + std::to_string(dim) + " of L(" + G.to_string() +
                           ") contradicts the Riemann bounds");
  for (const auto& m : out.members) {
    verify_membership(m, G);
    out.expansions_at_P.push_back(expand_function(m, Place::infinity(), expansion_prec));
  }
  return out;
}

Divisor find_nonspecial_divisor(const CurvePtr& curve, const std::vector<Place>& exclusions, std::uint64_t seed,
                                int budget) {
  const int g = curve->genus();
  if (g == 0) return {};
  std::map<Elem, std::vector<Place>> by_x;
  for (const auto& p : curve->affine_places())
    if (std::find(exclusions.begin(), exclusions.end(), p) == exclusions.end()) by_x[p.x].push_back(p);
  std::vector<Elem> xs;
  for (const auto& [x, ps] : by_x) xs.push_back(x);
  if (static_cast<int>(xs.size()) < g)
    throw SearchExhausted("only " + std::to_string(xs.size()) + " x-fibers available for a divisor of degree " +
                          std::to_string(g));
  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < budget; ++trial) {
    for (std::size_t i = xs.size() - 1; i > 0; --i) std::swap(xs[i], xs[rng() % (i + 1)]);
    Divisor D;
    for (int i = 0; i < g; ++i) {
      const auto& ps = by_x[xs[static_cast<std::size_t>(i)]];
      D.add(ps[rng() % ps.size()], 1);
    }
    if (riemann_roch_basis(curve, D).dimension() == 1) return D;
  }
  throw SearchExhausted("no non-special divisor found in " + std::to_string(budget) + " trials");
}

RRBasis gapped_basis(const CurvePtr& curve, const Divisor& D, int v, int expansion_prec) {
  if (v < 0) throw std::invalid_argument("gap width must be non-negative");
  if (D.coefficient(Place::infinity()) != 0) throw std::invalid_argument("D must avoid the place at infinity");
  const Divisor G = D + Divisor::single(Place::infinity(), v);
  const RRBasis L = riemann_roch_basis(curve, G, 1);
  const int K = L.dimension();
  if (K != v + 1)
    throw std::invalid_argument("D = " + D.to_string() + " is special: l(D + " + std::to_string(v) +
                                "P) = " + std::to_string(K));
  const Field& f = curve->field();
  // Phi^T c = e_i with Phi[member][i] = coefficient of t^-i.
  Matrix phiT(f, static_cast<std::size_t>(v + 1), static_cast<std::size_t>(K));
  for (int m = 0; m < K; ++m)
    for (int i = 0; i <= v; ++i) phiT(i, m) = L.expansions_at_P[m].coeff(-i);
  const LinearSolution sol = solve_linear(phiT, Matrix::identity(f, static_cast<std::size_t>(v + 1)));
  if (!sol.consistent() || sol.rank != static_cast<std::size_t>(K))
    throw std::logic_error("expansion map of L(" + G.to_string() + ") is not bijective");

  RRBasis out{G, {}, {}};
  for (int i = 0; i <= v; ++i) {
    std::vector<Elem> c(static_cast<std::size_t>(K));
    for (int m = 0; m < K; ++m) c[m] = (*sol.solution)(m, i);
    FunctionRep fi = i == 0 ? FunctionRep::constant(curve, 1) : linear_combination(L.members, c);
    LaurentSeries s = expand_function(fi, Place::infinity(), std::max(expansion_prec, 1));
    for (int k = -i; k <= 0; ++k)
      if (s.coeff(k) != (k == -i ? 1u : 0u))
        throw std::logic_error("gapped basis member " + std::to_string(i) + " has the wrong shape");
    out.members.push_back(std::move(fi));
    out.expansions_at_P.push_back(std::move(s));
  }
  return out;
}

std::vector<FunctionRep> two_point_gapped_basis(const CurvePtr& curve, const Place& Q, int a, int b) {
  if (a < 0 || b < 0) throw std::invalid_argument("gap parameters must be non-negative");
  if (Q.at_infinity || !curve->contains(Q)) throw std::invalid_argument("Q must be an affine rational place");
  const int g = curve->genus();
  const Divisor G = Divisor::single(Q, 2 * g + a) + Divisor::single(Place::infinity(), a + b);
  const RRBasis L = riemann_roch_basis(curve, G, a + 1);
  const int K = L.dimension();
  const int targets = a + b + 1;
  const int cols = 2 * a + b + 1;
  // Coordinates: lambda_0, lambda_-1..lambda_-(a+b), lambda_1..lambda_a.
  auto exponent = [&](int col) { return col <= a + b ? -col : col - (a + b); };
  const Field& f = curve->field();
  Matrix phiT(f, static_cast<std::size_t>(cols), static_cast<std::size_t>(K));
  for (int m = 0; m < K; ++m)
    for (int col = 0; col < cols; ++col) phiT(col, m) = L.expansions_at_P[m].coeff(exponent(col));
  Matrix rhs(f, static_cast<std::size_t>(cols), static_cast<std::size_t>(targets));
  for (int i = 0; i < targets; ++i) rhs(i, i) = 1;
  const LinearSolution sol = solve_linear(phiT, rhs);
  if (!sol.consistent())
    throw std::logic_error("two-point gapped basis does not exist in L(" + G.to_string() + ")");

  std::vector<FunctionRep> out;
  for (int i = 0; i < targets; ++i) {
    std::vector<Elem> c(static_cast<std::size_t>(K));
    for (int m = 0; m < K; ++m) c[m] = (*sol.solution)(m, i);
    out.push_back(linear_combination(L.members, c));
  }
  return out;
}

// ---------------------------------------------------------------------------

SemigroupView::SemigroupView(const Curve& curve) : genus_(curve.genus()) {
  for (int k = 1; k < 2 * genus_; ++k)
    if (!curve.is_pole_number(k)) gaps_.push_back(k);
  if (static_cast<int>(gaps_.size()) != genus_)
    throw std::logic_error("gap count " + std::to_string(gaps_.size()) + " differs from the genus");
  conductor_ = gaps_.empty() ? 0 : gaps_.back() + 1;
  int smallest = 1;
  while (!member(smallest)) ++smallest;
  for (int k = 1; k <= conductor_ + smallest; ++k) {
    if (!member(k)) continue;
    bool sum = false;
    for (int i = 1; i < k && !sum; ++i) sum = member(i) && member(k - i);
    if (!sum) generators_.push_back(k);
  }
}

bool SemigroupView::member(int k) const noexcept {
  return k >= 0 && !std::binary_search(gaps_.begin(), gaps_.end(), k);
}

std::vector<int> SemigroupView::pole_numbers(int bound) const {
  std::vector<int> out;
  for (int k = 0; k <= bound; ++k)
    if (member(k)) out.push_back(k);
  return out;
}

int SemigroupView::m_prime(int m) const {
  int k = std::max(m, 0);
  while (!member(k)) ++k;
  return k;
}

std::vector<int> SemigroupView::m_sequence(int m, int n) const {
  std::vector<int> out;
  for (int i = 0; i < n; ++i) out.push_back(i == 0 ? 0 : m_prime(out.back() + m));
  return out;
}

std::string SemigroupView::describe() const {
  std::ostringstream os;
  os << "<";
  for (std::size_t i = 0; i < generators_.size(); ++i) os << (i ? "," : "") << generators_[i];
  os << "> gaps={";
  for (std::size_t i = 0; i < gaps_.size(); ++i) os << (i ? "," : "") << gaps_[i];
  os << "} c=" << conductor_;
  return os.str();
}

SemigroupView semigroup(const Curve& curve) { return SemigroupView(curve); }

// ---------------------------------------------------------------------------

Matrix numerator_matrix(const std::vector<FunctionRep>& fs) {
  if (fs.empty()) throw std::invalid_argument("no functions");
  const auto den = common_denominator(fs);
  std::vector<CurvePoly> nums;
  std::size_t width = 1;
  for (const auto& fn : fs) {
    nums.push_back(fn.numerator_over(den));
    width = std::max(width, nums.back().size());
  }
  Matrix m(fs.front().curve().field(), fs.size(), width);
  for (std::size_t r = 0; r < nums.size(); ++r)
    for (std::size_t c = 0; c < nums[r].size(); ++c) m(r, c) = nums[r][c];
  return m;
}

BasisExtension extend_to_basis(const std::vector<FunctionRep>& independent, const RRBasis& ambient) {
  const std::size_t k = independent.size();
  const std::size_t K = ambient.members.size();
  BasisExtension out;
  if (k == 0 && K == 0) return out;
  std::vector<FunctionRep> all = independent;
  all.insert(all.end(), ambient.members.begin(), ambient.members.end());
  const Matrix m = numerator_matrix(all);
  if (k > 0 && rank_of(m.block(0, 0, k, m.cols())) != k) throw DependentInput("input functions are dependent");
  if (rank_of(m) != K) throw DependentInput("input functions do not lie in L(" + ambient.divisor.to_string() + ")");

  out.basis = independent;
  for (std::size_t i = 0; i < k; ++i) {
    out.index_map.push_back(static_cast<int>(i));
    out.ambient_source.push_back(-1);
  }
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < k; ++i) chosen.push_back(i);
  std::size_t rank = k;
  for (std::size_t j = 0; j < K && rank < K; ++j) {
    chosen.push_back(k + j);
    Matrix sub(m.field(), chosen.size(), m.cols());
    for (std::size_t r = 0; r < chosen.size(); ++r) sub.set_block(r, 0, m.block(chosen[r], 0, 1, m.cols()));
    if (rank_of(sub) > rank) {
      ++rank;
      out.basis.push_back(ambient.members[j]);
      out.ambient_source.push_back(static_cast<int>(j));
    } else {
      chosen.pop_back();
    }
  }
  return out;
}

}  // namespace agdmm
