#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "agdmm/error.hpp"
#include "agdmm/sim.hpp"

using namespace agdmm;

namespace {

SchemeInstance c3_instance() {
  return build(SchemeSpec::parse("kind=ag-c3;curve=hermitian:u=2;t=4;r=4;s=4;m=1;n=1;p=2;N=6;seed=7"));
}

std::pair<Matrix, Matrix> random_pair(const SchemeInstance& inst, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& P = inst.spec.part;
  Matrix A = Matrix::random(inst.field(), P.t, P.r, rng);
  Matrix B = Matrix::random(inst.field(), P.r, P.s, rng);
  return {std::move(A), std::move(B)};
}

}  // namespace

TEST_CASE("straggler model strings") {
  for (const char* s : {"adversarial:1,4", "adversarial:", "random:5,seed=9", "race:shift=1,rate=2,seed=4",
                        "race:shift=0.5,rate=1,seed=0,deadline=3"}) {
    CHECK(StragglerModel::parse(s).to_string() == s);
  }
  CHECK(StragglerModel::parse("adversarial:4,1,4").erased == std::vector<int>{1, 4});
  CHECK_THROWS_AS(StragglerModel::parse("race:rate=0"), ParseError);
  CHECK_THROWS_AS(StragglerModel::parse("race:speed=1"), ParseError);
  CHECK_THROWS_AS(StragglerModel::parse("flaky:1"), ParseError);
  CHECK_THROWS_AS(StragglerModel::parse("random:"), ParseError);
}

TEST_CASE("survivor draws") {
  const auto adv = draw_survivors(StragglerModel::adversarial({0, 2}), 6, 1);
  REQUIRE(adv.size() == 4);
  CHECK(adv[0].worker == 1);
  CHECK(adv[3].worker == 5);
  const auto rnd = draw_survivors(StragglerModel::random(4, 3), 10, 5);
  CHECK(rnd.size() == 4);
  CHECK(rnd.size() == draw_survivors(StragglerModel::random(4, 3), 10, 5).size());
  for (std::size_t i = 0; i < rnd.size(); ++i) CHECK(rnd[i].worker == draw_survivors(StragglerModel::random(4, 3), 10, 5)[i].worker);
  const auto race = draw_survivors(StragglerModel::delay_race(2.0, 1.0, 11), 8, 3);
  REQUIRE(race.size() == 8);
  for (std::size_t i = 1; i < race.size(); ++i) CHECK(race[i - 1].time <= race[i].time);
  for (const auto& w : race) CHECK(w.time >= 2.0);
  const auto cut = draw_survivors(StragglerModel::delay_race(2.0, 1.0, 11, race[3].time), 8, 3);
  CHECK(cut.size() == 4);
}

TEST_CASE("run_round decodes with N - R erasures") {
  const auto inst = c3_instance();
  const auto [A, B] = random_pair(inst, 1);
  const RunRecord rec = run_round(inst, A, B, StragglerModel::adversarial({2}), 1);
  CHECK(rec.decoded_equals_oracle);
  CHECK(rec.status == "decoded");
  CHECK(rec.used.size() == static_cast<std::size_t>(inst.R));
  CHECK(rec.survivors == std::vector<int>{0, 1, 3, 4, 5});
  CHECK(rec.makespan == 1.0);
  CHECK(rec.cost == cost_report(inst));
  CHECK_THROWS_AS(run_round(inst, A, B, StragglerModel::adversarial({0, 1}), 1), InsufficientSurvivors);
}

TEST_CASE("run_round is deterministic") {
  const auto inst = c3_instance();
  const auto [A, B] = random_pair(inst, 2);
  const auto model = StragglerModel::delay_race(1.0, 1.0, 42);
  const std::string a = to_json(run_round(inst, A, B, model, 8)).dump();
  const std::string b = to_json(run_round(inst, A, B, model, 8)).dump();
  CHECK(a == b);
  const auto rec = run_round(inst, A, B, model, 8);
  CHECK(rec.decoded_equals_oracle);
  CHECK(rec.makespan > 1.0);
  const auto j = to_json(rec);
  for (const char* key : {"scheme", "model", "seed", "survivors", "used", "status", "decoded_equals_oracle", "cost",
                          "makespan"})
    CHECK(j.contains(key));
  CHECK(to_json(run_round(inst, A, B, StragglerModel::random(5, 1), 3)).dump() ==
        to_json(run_round(inst, A, B, StragglerModel::random(5, 1), 3)).dump());
}

TEST_CASE("binomial and subset choice") {
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(24, 20) == 10626);
  CHECK(binomial(5, 7) == 0);
  CHECK(binomial(200, 100) == std::numeric_limits<std::uint64_t>::max());
  CHECK(choose_subsets(6, 5, 200, 1).size() == 6);
  const auto sampled = choose_subsets(24, 20, 200, 1);
  CHECK(sampled.size() == 200);
  for (const auto& s : sampled) {
    CHECK(s.size() == 20);
    CHECK(std::is_sorted(s.begin(), s.end()));
    CHECK(std::adjacent_find(s.begin(), s.end()) == s.end());
  }
  CHECK(choose_subsets(24, 20, 200, 1) == sampled);
}

TEST_CASE("threshold sweep") {
  const auto inst = c3_instance();
  const auto [A, B] = random_pair(inst, 3);
  const auto rows = threshold_sweep(inst, A, B, 50, 1);
  REQUIRE(rows.front().k == std::max(1, inst.K - 1));
  REQUIRE(rows.back().k == inst.N);
  for (const auto& r : rows) {
    if (r.k >= inst.R) CHECK(r.fraction == 1.0);
    if (r.k < inst.K) CHECK(r.successes == 0);
  }
  const std::string csv = sweep_csv(rows);
  CHECK(csv.rfind("k,subsets_tested,successes,fraction\n", 0) == 0);
  CHECK(csv == sweep_csv(threshold_sweep(inst, A, B, 50, 1)));
}

TEST_CASE("thresholds against one-point schemes") {
  const auto rows = compare_prior({Curve::hermitian(3), Curve::elliptic(5, 1, 1), Curve::rational(7)}, {2, 3},
                                  {{2, 2}, {3, 2}});
  auto find = [&](const std::string& curve, const std::string& scheme, const std::string& source) {
    for (const auto& r : rows)
      if (r.curve == curve && r.scheme == scheme && r.source == source) return r;
    FAIL("row missing: " << curve << " " << scheme << " " << source);
    return CompareRow{};
  };
  // hermitian:u=3: g = 3, c = 6, W = <3,4>.
  auto h = find("hermitian:u=3", "matdot p=2", "one-point optimal (approx.)");
  CHECK(h.ours == 3 + 6);
  CHECK(h.prior == 3 + 9);
  auto e = find("elliptic:q=5,a=1,b=1", "matdot p=3", "one-point optimal");
  CHECK(e.ours == 5 + 2);
  CHECK(e.prior == 5 + 2 + 2);
  CHECK(find("hermitian:u=3", "polynomial m=2 n=2 (ag-c1)", "one-point A").prior == 12 + 4);
  CHECK(find("hermitian:u=3", "polynomial m=2 n=2 (ag-c5)", "one-point B").ours == 3 + 3 * 2);
  CHECK(find("hermitian:u=3", "polynomial m=2 n=2 (ag-c6)", "one-point C").ours == 3 + 3 + 2);
  CHECK(find("hermitian:u=3", "polynomial m=3 n=2 (ag-c2)", "one-point B").ours == 3 + 6);
  for (const auto& r : rows) {
    if (r.curve.starts_with("rational")) CHECK(r.ours == r.prior);
    if (!r.curve.starts_with("rational")) CHECK(r.ours < r.prior);
  }
  const std::string csv = compare_csv(rows);
  CHECK(csv.rfind("curve,scheme,ours,prior,source\n", 0) == 0);
}
