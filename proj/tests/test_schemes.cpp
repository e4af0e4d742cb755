#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "agdmm/error.hpp"
#include "agdmm/schemes.hpp"

using namespace agdmm;

namespace {

PartitionSpec part(int t, int r, int s, int m, int n, int p) { return {t, r, s, m, n, p}; }

SchemeSpec spec_of(SchemeKind kind, const std::string& curve, PartitionSpec pt, int N,
                   PolyDotProfile profile = PolyDotProfile::New, std::uint64_t seed = 1) {
  SchemeSpec s;
  s.kind = kind;
  s.curve = curve;
  s.part = pt;
  s.N = N;
  s.seed = seed;
  s.profile = profile;
  return s;
}

BuildErrorCode build_error(const SchemeSpec& s) {
  try {
    build(s);
  } catch (const BuildError& e) {
    return e.code();
  }
  FAIL("build succeeded");
  return BuildErrorCode::ConditionViolated;
}

std::map<int, Matrix> all_results(const SchemeInstance& inst, const Matrix& A, const Matrix& B) {
  std::map<int, Matrix> out;
  for (const auto& pl : encode(inst, A, B)) out.emplace(pl.worker, worker_compute(pl));
  return out;
}

std::vector<std::vector<int>> subsets(int N, int k, std::size_t cap, std::mt19937_64& rng) {
  std::vector<std::vector<int>> out;
  // Exhaustive enumeration by bitmask-free lexicographic walk.
  std::vector<int> c(k);
  std::iota(c.begin(), c.end(), 0);
  std::size_t count = 0;
  for (;;) {
    if (++count > cap) break;
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == N - k + i) --i;
    if (i < 0) return out;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  out.clear();
  std::vector<int> idx(N);
  for (std::size_t t = 0; t < cap; ++t) {
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = N - 1; i > 0; --i) std::swap(idx[i], idx[rng() % static_cast<std::uint64_t>(i + 1)]);
    std::vector<int> s(idx.begin(), idx.begin() + k);
    std::sort(s.begin(), s.end());
    out.push_back(s);
  }
  return out;
}

// Every R-subset (capped at 200 samples) decodes to matmul(A, B) for `trials` random pairs.
void check_round_trip(const SchemeInstance& inst, int trials = 2, std::size_t cap = 200) {
  std::mt19937_64 rng(99);
  const auto& P = inst.spec.part;
  for (int t = 0; t < trials; ++t) {
    const Matrix A = Matrix::random(inst.field(), P.t, P.r, rng);
    const Matrix B = Matrix::random(inst.field(), P.r, P.s, rng);
    const Matrix oracle = matmul(A, B);
    const auto res = all_results(inst, A, B);
    for (const auto& sub : subsets(inst.N, inst.R, cap, rng)) {
      std::map<int, Matrix> chosen;
      for (int i : sub) chosen.emplace(i, res.at(i));
      const Matrix C = decode(inst, chosen);
      REQUIRE(C == oracle);
    }
  }
}

}  // namespace

TEST_CASE("scheme strings round-trip") {
  const std::string text = "kind=ag-c3;curve=hermitian:u=2;t=4;r=4;s=4;m=1;n=1;p=2;N=6;seed=7";
  const SchemeSpec s = SchemeSpec::parse(text);
  CHECK(s.kind == SchemeKind::AgC3);
  CHECK(s.part == part(4, 4, 4, 1, 1, 2));
  CHECK(s.N == 6);
  CHECK(s.seed == 7);
  CHECK(s.to_string() == text);
  CHECK(SchemeSpec::parse(s.to_string()) == s);
  const SchemeSpec pd = SchemeSpec::parse("kind=rs-polydot;profile=entangled;curve=rational:q=11;N=8");
  CHECK(pd.profile == PolyDotProfile::Entangled);
  CHECK(SchemeSpec::parse(pd.to_string()) == pd);
  CHECK_THROWS_AS(SchemeSpec::parse("kind=ag-c3;curve=rational:q=7;bogus=1"), ParseError);
  CHECK_THROWS_AS(SchemeSpec::parse("kind=ag-c9;curve=rational:q=7"), ParseError);
  CHECK_THROWS_AS(SchemeSpec::parse("curve=rational:q=7"), ParseError);
  CHECK_THROWS_AS(SchemeSpec::parse("kind=ag-c3;curve=rational:q=7;t=x"), ParseError);
}

TEST_CASE("thresholds of the reference instances") {
  CHECK(build(spec_of(SchemeKind::RsPoly, "rational:q=11", part(6, 6, 6, 2, 3, 1), 8)).R == 6);
  const auto c1 = build(spec_of(SchemeKind::AgC1, "hermitian:u=2", part(4, 4, 4, 2, 2, 1), 6));
  CHECK(c1.R == 6);
  CHECK(c1.K == 5);
  CHECK(build(spec_of(SchemeKind::AgC3, "hermitian:u=2", part(4, 4, 4, 1, 1, 2), 6)).R == 5);
  const auto c4 = build(spec_of(SchemeKind::AgC4, "hermitian:u=3", part(4, 4, 4, 2, 1, 2), 24));
  CHECK(c4.R == 20);
  CHECK_FALSE(c4.m_case);
  CHECK(build(spec_of(SchemeKind::AgC6, "hermitian:u=3", part(4, 4, 4, 2, 2, 1), 12)).R == 8);
  CHECK(build(spec_of(SchemeKind::AgC5, "hermitian:u=3", part(4, 4, 4, 2, 2, 1), 12)).R == 9);
  CHECK(build(spec_of(SchemeKind::AgC2, "hermitian:u=2", part(4, 4, 4, 2, 2, 1), 6)).R == 5);
  CHECK(build(spec_of(SchemeKind::RsMatDot, "rational:q=11", part(6, 6, 6, 1, 1, 3), 8)).R == 5);
}

TEST_CASE("build rejects bad inputs") {
  CHECK(build_error(spec_of(SchemeKind::AgC1, "hermitian:u=2", part(3, 4, 4, 2, 2, 1), 6)) ==
        BuildErrorCode::InvalidPartition);
  CHECK(build_error(spec_of(SchemeKind::AgC1, "hermitian:u=2", part(4, 4, 4, 2, 2, 2), 6)) ==
        BuildErrorCode::InvalidPartition);
  CHECK(build_error(spec_of(SchemeKind::AgC3, "hermitian:u=2", part(4, 4, 4, 2, 1, 2), 6)) ==
        BuildErrorCode::InvalidPartition);
  CHECK(build_error(spec_of(SchemeKind::RsPoly, "elliptic:q=5,a=1,b=1", part(4, 4, 4, 2, 2, 1), 6)) ==
        BuildErrorCode::GenusMismatch);
  CHECK(build_error(spec_of(SchemeKind::AgC1, "hermitian:u=2", part(4, 4, 4, 2, 2, 1), 5)) ==
        BuildErrorCode::ThresholdExceedsPlaces);
  // hermitian:u=3 has W = <3,4>; neither 2 nor 5 is a pole number.
  CHECK(build_error(spec_of(SchemeKind::AgC2, "hermitian:u=3", part(4, 4, 5, 2, 5, 1), 20)) ==
        BuildErrorCode::SemigroupPreconditionFailed);
  // GF(16) has 16 affine points on the line.
  CHECK(build_error(spec_of(SchemeKind::RsMatDot, "rational:q=16", part(3, 3, 3, 1, 1, 3), 40)) ==
        BuildErrorCode::InsufficientPlaces);
  CHECK(build_error(spec_of(SchemeKind::RsPolyDot, "rational:q=11", part(6, 6, 6, 2, 2, 2), 8)) ==
        BuildErrorCode::ThresholdExceedsPlaces);
}

TEST_CASE("ag-c2 swaps roles when only n is a pole number") {
  const auto inst = build(spec_of(SchemeKind::AgC2, "hermitian:u=3", part(2, 2, 3, 2, 3, 1), 12));
  CHECK(inst.swapped);
  CHECK(inst.R == 3 + 6);
  check_round_trip(inst);
}

TEST_CASE("build matches closed-form thresholds") {
  const std::vector<std::string> curves = {"rational:q=11", "elliptic:q=7,a=1,b=3", "hermitian:u=2", "hermitian:u=3"};
  const std::vector<SchemeKind> ag = {SchemeKind::AgC1, SchemeKind::AgC2, SchemeKind::AgC3, SchemeKind::AgC4,
                                      SchemeKind::AgC5, SchemeKind::AgC6, SchemeKind::AgEntangled};
  int built = 0;
  for (const auto& c : curves)
    for (SchemeKind k : ag)
      for (int m = 1; m <= 2; ++m)
        for (int n = 1; n <= 2; ++n)
          for (int p = 1; p <= 2; ++p) {
            if (recovery_type(k) == RecoveryType::Polynomial && p != 1) continue;
            if (k == SchemeKind::AgC3 && (m != 1 || n != 1)) continue;
            SchemeSpec s = spec_of(k, c, part(2 * m, 2 * p, 2 * n, m, n, p), 1);
            s.N = std::max(1, closed_form_threshold(s).value_or(1));
            const auto closed = closed_form_threshold(s);
            CAPTURE(s.to_string());
            try {
              const auto inst = build(s);
              REQUIRE(closed.has_value());
              CHECK(inst.R == *closed);
              CHECK(inst.K <= inst.R);
              CHECK(verify_conditions(inst).passed());
              ++built;
            } catch (const BuildError& e) {
              CAPTURE(e.what());
              const bool ok = e.code() == BuildErrorCode::ThresholdExceedsPlaces ||
                              e.code() == BuildErrorCode::InsufficientPlaces ||
                              e.code() == BuildErrorCode::SemigroupPreconditionFailed;
              CHECK(ok);
            }
          }
  CHECK(built > 60);
}

TEST_CASE("round trip on small instances") {
  struct Case {
    SchemeKind kind;
    std::string curve;
    PartitionSpec pt;
    int N;
    PolyDotProfile profile = PolyDotProfile::New;
  };
  const std::vector<Case> cases = {
      {SchemeKind::RsPoly, "rational:q=11", part(6, 6, 6, 2, 3, 1), 8},
      {SchemeKind::RsMatDot, "rational:q=7", part(4, 4, 4, 1, 1, 2), 6},
      {SchemeKind::RsPolyDot, "rational:q=16", part(4, 4, 4, 2, 2, 2), 14, PolyDotProfile::New},
      {SchemeKind::RsPolyDot, "rational:q=16", part(4, 4, 4, 2, 2, 2), 14, PolyDotProfile::PolyDot},
      {SchemeKind::RsPolyDot, "rational:q=16", part(4, 4, 4, 2, 2, 2), 14, PolyDotProfile::Entangled},
      {SchemeKind::AgC1, "hermitian:u=2", part(4, 4, 4, 2, 2, 1), 6},
      {SchemeKind::AgC2, "hermitian:u=2", part(4, 4, 4, 2, 2, 1), 6},
      {SchemeKind::AgC3, "hermitian:u=2", part(4, 4, 4, 1, 1, 2), 6},
      {SchemeKind::AgC3, "elliptic:q=5,a=1,b=1", part(4, 4, 4, 1, 1, 2), 6},
      {SchemeKind::AgC4, "hermitian:u=3", part(4, 4, 4, 2, 1, 2), 24},
      {SchemeKind::AgC4, "hermitian:u=3", part(2, 4, 2, 1, 1, 2), 24},
      {SchemeKind::AgEntangled, "hermitian:u=3", part(4, 4, 2, 2, 1, 2), 24},
      {SchemeKind::AgC5, "hermitian:u=3", part(4, 4, 4, 2, 2, 1), 12},
      {SchemeKind::AgC6, "hermitian:u=3", part(4, 4, 4, 2, 2, 1), 12},
      {SchemeKind::AgC1, "hermitian:u=3", part(3, 2, 4, 3, 2, 1), 14},
  };
  for (const auto& c : cases) {
    const SchemeSpec s = spec_of(c.kind, c.curve, c.pt, c.N, c.profile);
    CAPTURE(s.to_string());
    const auto inst = build(s);
    check_round_trip(inst, 2, 60);
  }
}

TEST_CASE("trivial partition decodes to AB from any R results") {
  for (SchemeKind k : {SchemeKind::AgC1, SchemeKind::AgC3, SchemeKind::AgC4}) {
    const auto inst = build(spec_of(k, "hermitian:u=2", part(3, 3, 3, 1, 1, 1), 6));
    CHECK(verify_conditions(inst).passed());
    std::mt19937_64 rng(5);
    const Matrix A = Matrix::random(inst.field(), 3, 3, rng);
    const Matrix B = Matrix::random(inst.field(), 3, 3, rng);
    for (const auto& pl : encode(inst, A, B)) {
      if (k == SchemeKind::AgC1) {
        CHECK(pl.a == A);
        CHECK(pl.b == B);
      }
    }
    check_round_trip(inst, 1, 30);
  }
}

TEST_CASE("encode matches independent re-evaluation") {
  const auto inst = build(spec_of(SchemeKind::AgC3, "hermitian:u=2", part(2, 4, 2, 1, 1, 2), 6));
  const Field& F = inst.field();
  std::mt19937_64 rng(3);
  const Matrix A = Matrix::random(F, 2, 4, rng);
  const Matrix B = Matrix::random(F, 4, 2, rng);
  const auto pls = encode(inst, A, B);
  REQUIRE(pls.size() == 6);
  for (const auto& pl : pls) {
    Matrix a(F, 2, 2);
    for (int j = 0; j < 2; ++j)
      a.add_scaled(evaluate(inst.f_funcs[j], inst.eval_places[pl.worker]).value(), A.block(0, 2 * j, 2, 2));
    CHECK(a == pl.a);
    CHECK(worker_compute(pl) == matmul(pl.a, pl.b));
  }
  for (const auto& pl : encode(inst, Matrix(F, 2, 4), B)) CHECK(pl.a.is_zero());
  CHECK_THROWS_AS(encode(inst, Matrix(F, 3, 4), B), DimensionMismatch);
}

TEST_CASE("decode needs R results") {
  const auto inst = build(spec_of(SchemeKind::AgC3, "hermitian:u=2", part(2, 2, 2, 1, 1, 2), 6));
  std::mt19937_64 rng(4);
  const Matrix A = Matrix::random(inst.field(), 2, 2, rng);
  const Matrix B = Matrix::random(inst.field(), 2, 2, rng);
  auto res = all_results(inst, A, B);
  res.erase(0);
  res.erase(1);
  CHECK_THROWS_AS(decode(inst, res), InsufficientResults);
}

TEST_CASE("genus zero schemes reduce to monomial codes") {
  auto check_monomials = [](const SchemeInstance& inst, const std::vector<int>& fexp, const std::vector<int>& gexp) {
    const auto& places = inst.curve->affine_places();
    auto same = [&](const FunctionRep& f, int k) {
      const FunctionRep x = FunctionRep::monomial(inst.curve, k);
      for (const auto& pl : places)
        if (evaluate(f, pl).value() != evaluate(x, pl).value()) return false;
      return true;
    };
    for (std::size_t i = 0; i < fexp.size(); ++i) CHECK(same(inst.f_funcs[i], fexp[i]));
    for (std::size_t i = 0; i < gexp.size(); ++i) CHECK(same(inst.g_funcs[i], gexp[i]));
  };
  const auto c1 = build(spec_of(SchemeKind::AgC1, "rational:q=11", part(2, 2, 3, 2, 3, 1), 8));
  CHECK(c1.R == 6);
  check_monomials(c1, {0, 1}, {0, 2, 4});
  const auto c3 = build(spec_of(SchemeKind::AgC3, "rational:q=11", part(2, 3, 2, 1, 1, 3), 8));
  CHECK(c3.R == 5);
  check_monomials(c3, {0, 1, 2}, {2, 1, 0});
  const auto pd = build(spec_of(SchemeKind::RsPolyDot, "rational:q=16", part(2, 2, 2, 2, 2, 2), 14));
  CHECK(pd.R == 12);
  // alpha = 1, beta = mn = 4, theta = m = 2
  check_monomials(pd, {0, 4, 1, 5}, {4, 6, 0, 2});
  const auto c4 = build(spec_of(SchemeKind::AgC4, "rational:q=17", part(2, 2, 2, 2, 2, 2), 16));
  CHECK(c4.R == pd.R + 2 * 4 - 2 * 2);
}

TEST_CASE("verifier bookkeeping") {
  const auto c1 = build(spec_of(SchemeKind::AgC1, "hermitian:u=2", part(4, 4, 4, 2, 2, 1), 6));
  int lo = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      lo = std::min(lo, valuation_at(c1.f_funcs[i] * c1.g_funcs[j], Place::infinity()));
  CHECK(lo == -(2 * 2 - 1));

  const auto md = build(spec_of(SchemeKind::RsMatDot, "rational:q=7", part(3, 3, 3, 1, 1, 3), 6));
  for (int i = 0; i < 3; ++i) CHECK(md.f_exponents[i] + md.g_exponents[i] == 2);

  const auto c3 = build(spec_of(SchemeKind::AgC3, "hermitian:u=3", part(3, 3, 3, 1, 1, 3), 11));
  lo = 0;
  for (const auto& f : c3.f_funcs)
    for (const auto& g : c3.g_funcs) lo = std::min(lo, valuation_at(f * g, Place::infinity()));
  CHECK(lo == -2 * (3 - 1));

  const auto c4 = build(spec_of(SchemeKind::AgC4, "hermitian:u=3", part(4, 4, 4, 2, 1, 2), 24));
  lo = 0;
  for (const auto& f : c4.f_funcs)
    for (const auto& g : c4.g_funcs) lo = std::min(lo, valuation_at(f * g, Place::infinity()));
  CHECK(lo == -((2 * 2 - 1) * 2 - 1));
}

TEST_CASE("swapping two g functions is flagged") {
  const std::vector<SchemeSpec> specs = {
      spec_of(SchemeKind::RsPoly, "rational:q=11", part(6, 6, 6, 2, 3, 1), 8),
      spec_of(SchemeKind::AgC1, "hermitian:u=2", part(4, 4, 4, 2, 2, 1), 6),
      spec_of(SchemeKind::AgC3, "hermitian:u=2", part(4, 4, 4, 1, 1, 2), 6),
      spec_of(SchemeKind::AgC4, "hermitian:u=3", part(4, 4, 4, 2, 1, 2), 24),
      spec_of(SchemeKind::AgC6, "hermitian:u=3", part(4, 4, 4, 2, 2, 1), 12),
  };
  for (const auto& s : specs) {
    const auto inst = build(s);
    CAPTURE(s.to_string());
    CHECK(verify_conditions(inst).passed());
    CHECK_FALSE(verify_conditions(with_swapped_g(inst, 0, 1)).passed());
  }
}

TEST_CASE("nonspecial basis breaks polydot") {
  SchemeInstance inst = build(spec_of(SchemeKind::AgPolyDotNonspecial, "hermitian:u=3", part(2, 2, 2, 2, 1, 2), 12));
  CHECK_FALSE(verify_conditions(inst).passed());
}

TEST_CASE("cost ledgers match closed forms") {
  const auto c4 = build(spec_of(SchemeKind::AgC4, "hermitian:u=3", part(4, 4, 4, 2, 1, 2), 24));
  const CostLedger l = cost_report(c4);
  CHECK(l.worker_multiplications == 16);
  CHECK(l.upload == 24u * (4 * 4 / 4 + 4 * 4 / 2));
  CHECK(l.download == 20u * (4 * 4 / 2));
  const auto c3 = build(spec_of(SchemeKind::AgC3, "hermitian:u=2", part(4, 4, 4, 1, 1, 2), 6));
  CHECK(cost_report(c3).download == 4u * 4u * 5u);
  const auto triv = build(spec_of(SchemeKind::AgC1, "hermitian:u=2", part(3, 5, 2, 1, 1, 1), 6));
  CHECK(cost_report(triv).upload == 6u * (3 * 5 + 5 * 2));
  const CostLedger k = cost_report(triv);
  CHECK(k.decode_operations == static_cast<std::uint64_t>(triv.K) * triv.K * triv.R + 3u * 2u * triv.R);
}

TEST_CASE("bit-cost advisor") {
  const auto rat = Curve::rational(7);
  for (const auto& c : bit_cost_advisor(*rat, part(2, 2, 2, 2, 2, 1), 49).conditions)
    if (c.family != "polydot") CHECK(c.holds);
  const auto h2 = Curve::hermitian(2);
  for (const auto& c : bit_cost_advisor(*h2, part(2, 2, 2, 2, 2, 2), 4).conditions) CHECK_FALSE(c.holds);
  const auto h4 = Curve::hermitian(4);
  const auto rep = bit_cost_advisor(*h4, part(4, 4, 4, 4, 4, 1), 60);
  REQUIRE(rep.conditions.size() == 3);
  CHECK(rep.genus == 6);
  CHECK(rep.q == 16);
  CHECK(rep.conditions[0].bound == doctest::Approx(16.0 * std::log2(60.0 / 16.0) / 4.0));
  CHECK(rep.conditions[0].holds);
}
