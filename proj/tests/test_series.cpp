#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "agdmm/series.hpp"

using namespace agdmm;

namespace {

LaurentSeries random_series(const Field& f, std::mt19937_64& rng, bool unit_lead) {
  const int lead = static_cast<int>(rng() % 7) - 3;
  const int len = 3 + static_cast<int>(rng() % 8);
  std::vector<Elem> c(len);
  for (auto& v : c) v = rng() % f.q();
  if (unit_lead && c[0] == 0) c[0] = 1;
  return {f, lead, lead + len, c};
}

bool agree(const LaurentSeries& a, const LaurentSeries& b) {
  const int prec = std::min(a.prec(), b.prec());
  const int lo = std::min(a.lead(), b.lead());
  for (int k = lo; k < prec; ++k)
    if (a.coeff(k) != b.coeff(k)) return false;
  return true;
}

}  // namespace

TEST_CASE("addition") {
  const Field& f5 = Field::get(5);
  auto inv_t = LaurentSeries::monomial(f5, 1, -1, 4);
  auto sum = inv_t + LaurentSeries::monomial(f5, 4, -1, 4);
  CHECK(sum.is_zero());
  CHECK(sum.prec() == 4);
  CHECK_THROWS_AS(sum.valuation(), IndeterminateValuation);

  auto a = LaurentSeries(f5, -2, 3, {1, 0, 3, 4, 2});
  CHECK(a + LaurentSeries::zero(f5, 10) == a);

  const Field& f2 = Field::get(2);
  auto x = LaurentSeries(f2, 0, 5, {1, 1});
  auto y = LaurentSeries(f2, 1, 5, {1, 1});
  auto z = x + y;
  CHECK(z == LaurentSeries(f2, 0, 5, {1, 0, 1}));
  CHECK(z.prec() == 5);
}

TEST_CASE("precision of a sum is the minimum") {
  const Field& f = Field::get(7);
  auto a = LaurentSeries(f, 0, 3, {1, 2, 3});
  auto b = LaurentSeries(f, 1, 9, {1});
  CHECK((a + b).prec() == 3);
}

TEST_CASE("multiplication") {
  const Field& f5 = Field::get(5);
  auto a = LaurentSeries(f5, -1, 6, {1, 1});
  auto t = LaurentSeries::monomial(f5, 1, 1, 100);
  auto p = a * t;
  CHECK(p.lead() == 0);
  CHECK(p.coeff(0) == 1);
  CHECK(p.coeff(1) == 1);
  CHECK(p.coeff(2) == 0);
  CHECK(p.prec() == 7);

  auto b = LaurentSeries(f5, 2, 6, {3, 1, 4});
  auto one = LaurentSeries::constant(f5, 1, 1000);
  CHECK(b * one == b);

  const Field& f2 = Field::get(2);
  auto s = LaurentSeries(f2, 0, 6, {1, 1});
  CHECK(s * s == LaurentSeries(f2, 0, 6, {1, 0, 1}));
}

TEST_CASE("product precision rule") {
  const Field& f = Field::get(7);
  auto a = LaurentSeries(f, -2, 3, {1, 1});  // prec 3, valuation -2
  auto b = LaurentSeries(f, 1, 4, {2});       // prec 4, valuation 1
  CHECK((a * b).prec() == std::min(3 + 1, 4 - 2));
  CHECK((a * b).lead() == -1);
}

TEST_CASE("inversion") {
  const Field& f5 = Field::get(5);
  auto t = LaurentSeries::monomial(f5, 1, 1, 5);
  auto ti = series_inv(t);
  CHECK(ti.lead() == -1);
  CHECK(ti.coeff(-1) == 1);
  CHECK(ti.relative_prec() == t.relative_prec());

  auto u = LaurentSeries(f5, 0, 4, {1, 1});
  auto ui = series_inv(u);
  CHECK(ui == LaurentSeries(f5, 0, 4, {1, 4, 1, 4}));
  CHECK_THROWS_AS(series_inv(LaurentSeries::zero(f5, 3)), IndeterminateValuation);
}

TEST_CASE("coefficient access contract") {
  const Field& f = Field::get(3);
  auto a = LaurentSeries(f, 0, 2, {1, 1});
  CHECK(coeff_at(a, 0).value() == 1);
  CHECK(coeff_at(a, -4).value() == 0);
  CHECK_THROWS_AS(coeff_at(a, 5), PrecisionExceeded);
  CHECK_THROWS_AS(coeff_at(a, 2), PrecisionExceeded);
  auto c = LaurentSeries::monomial(f, 1, -3, 1);
  CHECK(coeff_at(c, -3).value() == 1);
}

TEST_CASE("normalization keeps the valuation exact") {
  const Field& f = Field::get(7);
  auto a = LaurentSeries(f, -3, 4, {0, 0, 5, 1});
  CHECK(a.lead() == -1);
  CHECK(a.valuation() == -1);
  CHECK(a.prec() == 4);
  CHECK(a.to_string() == "5*t^-1 + 1*t^0 + O(t^4)");
  CHECK(LaurentSeries::zero(f, 2).to_string() == "O(t^2)");
}

TEST_CASE("ring laws and inversion on random series") {
  std::mt19937_64 rng(17);
  for (std::uint32_t q : {2u, 5u, 9u, 16u}) {
    const Field& f = Field::get(q);
    for (int trial = 0; trial < 200; ++trial) {
      auto a = random_series(f, rng, true);
      auto b = random_series(f, rng, true);
      auto c = random_series(f, rng, false);
      CHECK(agree((a * b) * c, a * (b * c)));
      CHECK(agree(a * (b + c), a * b + a * c));
      CHECK((a * b).valuation() == a.valuation() + b.valuation());
      auto ai = series_inv(a);
      CHECK(agree(series_inv(ai), a));
      auto one = ai * a;
      CHECK(one.lead() == 0);
      for (int k = 0; k < one.prec(); ++k) CHECK(one.coeff(k) == (k == 0 ? 1u : 0u));
    }
  }
}

TEST_CASE("powers") {
  const Field& f = Field::get(5);
  auto a = LaurentSeries(f, -1, 5, {2, 1, 3});
  CHECK(agree(a.pow(3), a * a * a));
  CHECK(agree(a.pow(-2), series_inv(a * a)));
  CHECK(a.pow(0).coeff(0) == 1);
}
