#include "agdmm/acceptance.hpp"

#include <functional>
#include <random>
#include <sstream>

#include "agdmm/error.hpp"
#include "agdmm/sim.hpp"

namespace agdmm {

namespace {

struct Built {
  std::string label;
  SchemeInstance inst;
};

// Instances built by criteria 1-8, reused by 9-11.
struct Registry {
  std::vector<Built> built;
};

SchemeSpec make_spec(SchemeKind kind, const std::string& curve, PartitionSpec part, int N, std::uint64_t seed = 1,
                     PolyDotProfile profile = PolyDotProfile::New) {
  SchemeSpec s;
  s.kind = kind;
  s.curve = curve;
  s.part = part;
  s.N = N;
  s.seed = seed;
  s.profile = profile;
  return s;
}

std::pair<Matrix, Matrix> matrices(const SchemeInstance& inst, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& P = inst.spec.part;
  Matrix A = Matrix::random(inst.field(), P.t, P.r, rng);
  Matrix B = Matrix::random(inst.field(), P.r, P.s, rng);
  return {std::move(A), std::move(B)};
}

struct DecodeTally {
  std::uint64_t subsets = 0;
  std::uint64_t exact = 0;
  bool all() const { return subsets > 0 && subsets == exact; }
};

// R-subsets (exhaustive up to the cap, else sampled) over `pairs` seeded (A, B).
DecodeTally decode_subsets(const SchemeInstance& inst, int pairs, std::uint64_t cap, std::uint64_t seed) {
  DecodeTally t;
  const auto subs = choose_subsets(inst.N, inst.R, cap, seed);
  for (int pr = 0; pr < pairs; ++pr) {
    const auto [A, B] = matrices(inst, seed * 1000 + static_cast<std::uint64_t>(pr));
    const Matrix oracle = matmul(A, B);
    std::map<int, Matrix> all;
    for (const auto& pl : encode(inst, A, B)) all.emplace(pl.worker, worker_compute(pl));
    for (const auto& s : subs) {
      std::map<int, Matrix> chosen;
      for (int w : s) chosen.emplace(w, all.at(w));
      ++t.subsets;
      if (decode(inst, chosen) == oracle) ++t.exact;
    }
  }
  return t;
}

std::string tally(const DecodeTally& t) {
  return std::to_string(t.exact) + "/" + std::to_string(t.subsets) + " exact";
}

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      passed_ = false;
      failures_.push_back(what);
    }
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool passed() const { return passed_; }
  std::string detail() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < notes_.size(); ++i) os << (i ? "; " : "") << notes_[i];
    for (const auto& f : failures_) os << (os.tellp() > 0 ? "; " : "") << "FAILED " << f;
    return os.str();
  }

 private:
  bool passed_ = true;
  std::vector<std::string> notes_;
  std::vector<std::string> failures_;
};

// Builds, records the instance and returns it; build errors are reported as failures.
std::optional<SchemeInstance> try_build(Checker& ck, Registry& reg, const std::string& label, const SchemeSpec& s) {
  try {
    SchemeInstance inst = build(s);
    reg.built.push_back({label, inst});
    return inst;
  } catch (const BuildError& e) {
    ck.expect(false, label + ": " + e.what());
    return std::nullopt;
  }
}

void check_R(Checker& ck, const std::string& label, const SchemeInstance& inst, int R) {
  ck.expect(inst.R == R, label + " R=" + std::to_string(inst.R) + " expected " + std::to_string(R));
}

void check_decode(Checker& ck, const std::string& label, const SchemeInstance& inst, int pairs, std::uint64_t seed) {
  const DecodeTally t = decode_subsets(inst, pairs, static_cast<std::uint64_t>(kAcceptanceSampledSubsets), seed);
  ck.expect(t.all(), label + " decode " + tally(t));
  ck.note(label + " R=" + std::to_string(inst.R) + " N=" + std::to_string(inst.N) + " " + tally(t));
}

// Coefficients at exponents -(a+b)..a of member i are 1 at -i and 0 elsewhere.
bool gapped_shape(const std::vector<FunctionRep>& fs, int a) {
  const int top = static_cast<int>(fs.size()) - 1;
  for (int i = 0; i <= top; ++i) {
    const LaurentSeries s = expand_function(fs[i], Place::infinity(), a + 1 + kExpansionMargin);
    for (int e = -top; e <= a; ++e)
      if (s.coeff(e) != (e == -i ? 1u : 0u)) return false;
  }
  return true;
}

// Criteria -------------------------------------------------------------------

CriterionResult criterion1(Registry& reg) {
  Checker ck;
  const std::string curve = "rational:q=11";
  const PartitionSpec poly{6, 6, 6, 2, 3, 1}, matdot{6, 6, 6, 1, 1, 3}, polydot{6, 6, 6, 2, 2, 2};
  if (auto i = try_build(ck, reg, "rs-poly", make_spec(SchemeKind::RsPoly, curve, poly, 8))) {
    check_R(ck, "rs-poly", *i, 6);
    check_decode(ck, "rs-poly", *i, kAcceptanceMatrixPairs, 11);
  }
  if (auto i = try_build(ck, reg, "rs-matdot", make_spec(SchemeKind::RsMatDot, curve, matdot, 8))) {
    check_R(ck, "rs-matdot", *i, 5);
    check_decode(ck, "rs-matdot", *i, kAcceptanceMatrixPairs, 12);
  }
  const SchemeSpec pd = make_spec(SchemeKind::RsPolyDot, curve, polydot, 8, 1, PolyDotProfile::New);
  ck.note("rs-polydot(new) closed-form R=" + std::to_string(closed_form_threshold(pd).value_or(-1)));
  if (auto i = try_build(ck, reg, "rs-polydot(new) N=8", pd)) {
    check_R(ck, "rs-polydot(new)", *i, 12);
    check_decode(ck, "rs-polydot(new)", *i, kAcceptanceMatrixPairs, 13);
  }
  return {1, "Reed-Solomon thresholds on rational:q=11", ck.passed(), ck.detail()};
}

CriterionResult criterion2(Registry& reg) {
  Checker ck;
  if (auto i = try_build(ck, reg, "ag-c1", make_spec(SchemeKind::AgC1, "hermitian:u=2", {4, 4, 4, 2, 2, 1}, 6))) {
    check_R(ck, "ag-c1", *i, 6);
    ck.expect(i->eval_places.size() == 6, "ag-c1 admissible places");
    check_decode(ck, "ag-c1", *i, 1, 21);
  }
  return {2, "ag-c1 on hermitian:u=2, m=n=2", ck.passed(), ck.detail()};
}

CriterionResult criterion3(Registry& reg) {
  Checker ck;
  if (auto i = try_build(ck, reg, "ag-c2", make_spec(SchemeKind::AgC2, "hermitian:u=2", {4, 4, 4, 2, 2, 1}, 6))) {
    check_R(ck, "ag-c2", *i, 5);
    ck.expect(!i->swapped, "ag-c2 uses m in W(P)");
    check_decode(ck, "ag-c2", *i, 1, 31);
    ck.expect(binomial(6, 5) == 6, "six 5-subsets");
  }
  return {3, "ag-c2 on hermitian:u=2, m=n=2", ck.passed(), ck.detail()};
}

CriterionResult criterion4(Registry& reg) {
  Checker ck;
  if (auto i = try_build(ck, reg, "ag-c3 hermitian", make_spec(SchemeKind::AgC3, "hermitian:u=2", {4, 4, 4, 1, 1, 2}, 6))) {
    check_R(ck, "ag-c3 hermitian", *i, 5);
    check_decode(ck, "ag-c3 hermitian", *i, 1, 41);
  }
  if (auto i = try_build(ck, reg, "ag-c3 elliptic",
                         make_spec(SchemeKind::AgC3, "elliptic:q=5,a=1,b=1", {4, 4, 4, 1, 1, 2}, 5))) {
    check_R(ck, "ag-c3 elliptic", *i, 5);
    check_decode(ck, "ag-c3 elliptic", *i, 1, 42);
  }
  return {4, "ag-c3 on hermitian:u=2 and elliptic:q=5,a=1,b=1, p=2", ck.passed(), ck.detail()};
}

SchemeSpec c4_spec() { return make_spec(SchemeKind::AgC4, "hermitian:u=3", {4, 4, 4, 2, 1, 2}, 24); }

CriterionResult criterion5(Registry& reg) {
  Checker ck;
  if (auto i = try_build(ck, reg, "ag-c4", c4_spec())) {
    check_R(ck, "ag-c4", *i, 20);
    ck.expect(i->eval_places.size() == 24, "24 admissible places");
    check_decode(ck, "ag-c4", *i, 1, 51);
    const ConditionReport rep = verify_conditions(*i);
    ck.expect(rep.passed(), "ag-c4 conditions: " + rep.to_string());
    ck.note("conditions " + rep.to_string());
  }
  return {5, "ag-c4 on hermitian:u=3, (m,n,p)=(2,1,2)", ck.passed(), ck.detail()};
}

CriterionResult criterion6(Registry& reg) {
  Checker ck;
  const std::string curve = "hermitian:u=3";
  const PartitionSpec pt{4, 4, 4, 2, 2, 1};
  ck.expect(!SemigroupView(*Curve::parse(curve)).member(2), "2 is a gap of <3,4>");
  int r5 = -1, r6 = -1;
  if (auto i = try_build(ck, reg, "ag-c5", make_spec(SchemeKind::AgC5, curve, pt, 12))) {
    check_R(ck, "ag-c5", *i, 9);
    check_decode(ck, "ag-c5", *i, 1, 61);
    r5 = i->R;
  }
  if (auto i = try_build(ck, reg, "ag-c6", make_spec(SchemeKind::AgC6, curve, pt, 12))) {
    check_R(ck, "ag-c6", *i, 8);
    check_decode(ck, "ag-c6", *i, 1, 62);
    r6 = i->R;
  }
  int r1 = -1;
  if (auto i = try_build(ck, reg, "ag-c1 (u=3)", make_spec(SchemeKind::AgC1, curve, pt, 12))) r1 = i->R;
  ck.expect(r1 == 10, "C1 R=" + std::to_string(r1) + " expected 10");
  ck.expect(r6 < r5 && r5 < r1, "ordering C6 < C5 < C1");
  ck.note("C6=" + std::to_string(r6) + " < C5=" + std::to_string(r5) + " < C1=" + std::to_string(r1));
  return {6, "ag-c5 and ag-c6 on hermitian:u=3, m=n=2", ck.passed(), ck.detail()};
}

CriterionResult criterion7() {
  Checker ck;
  const std::vector<CurvePtr> curves = {Curve::hermitian(2), Curve::hermitian(3), Curve::hermitian(4),
                                        Curve::elliptic(5, 1, 1), Curve::elliptic(7, 1, 3), Curve::rational(7)};
  const std::vector<int> ps = {1, 2, 3, 5};
  const std::vector<std::pair<int, int>> mns = {{2, 2}, {2, 3}, {3, 2}, {4, 4}};
  const auto rows = compare_prior(curves, ps, mns);
  int checked = 0;
  for (const auto& c : curves) {
    // Independent semigroup scan from the pole-number predicate.
    const int g = c->genus();
    int cond = 0;
    for (int k = 0; k <= 2 * g + 1; ++k)
      if (!c->is_pole_number(k)) cond = k + 1;
    auto next_pole = [&](int k) {
      while (!c->is_pole_number(k)) ++k;
      return k;
    };
    auto find = [&](const std::string& scheme, const std::string& source) -> const CompareRow* {
      for (const auto& r : rows)
        if (r.curve == c->spec() && r.scheme == scheme && r.source == source) return &r;
      return nullptr;
    };
    auto expect_row = [&](const std::string& scheme, const std::string& source, int ours, int prior) {
      const CompareRow* r = find(scheme, source);
      ck.expect(r && r->ours == ours && r->prior == prior, c->spec() + " " + scheme + " " + source);
      ++checked;
    };
    for (int p : ps) {
      const std::string s = "matdot p=" + std::to_string(p);
      expect_row(s, "one-point matdot", 2 * p - 1 + 2 * g, 2 * cond + 2 * p - 1);
      if (c->kind() == CurveKind::Hermitian) expect_row(s, "one-point optimal (approx.)", 2 * p - 1 + 2 * g, 2 * p - 1 + 3 * g);
      if (c->kind() == CurveKind::Elliptic) expect_row(s, "one-point optimal", 2 * p - 1 + 2 * g, 2 * p - 1 + 2 * g + 2);
      if (c->kind() == CurveKind::Rational) expect_row(s, "one-point optimal", 2 * p - 1, 2 * p - 1);
    }
    for (const auto& [m, n] : mns) {
      const std::string tag = "polynomial m=" + std::to_string(m) + " n=" + std::to_string(n);
      if (c->is_pole_number(m)) {
        expect_row(tag + " (ag-c2)", "one-point A", g + m * n, 2 * cond + m * n);
        expect_row(tag + " (ag-c2)", "one-point B", g + m * n, cond + m * n);
        expect_row(tag + " (ag-c2)", "one-point C", g + m * n, cond + m * n);
      } else {
        const int mp = next_pole(m);
        int mi = 0;
        for (int i = 2; i <= n; ++i) mi = next_pole(mi + m);
        expect_row(tag + " (ag-c1)", "one-point A", 2 * g + m * n, 2 * cond + m * n);
        expect_row(tag + " (ag-c5)", "one-point B", g + mp * n, cond + mp * n);
        expect_row(tag + " (ag-c6)", "one-point C", g + mi + m, cond + mi + m);
      }
    }
  }
  ck.note(std::to_string(checked) + " rows checked of " + std::to_string(rows.size()));
  return {7, "Thresholds against one-point schemes", ck.passed(), ck.detail()};
}

CriterionResult criterion8(Registry& reg) {
  Checker ck;
  if (auto i = try_build(ck, reg, "ag-c3 GF(16)", make_spec(SchemeKind::AgC3, "hermitian:u=4", {3, 3, 3, 1, 1, 3}, 40))) {
    ck.expect(i->N > static_cast<int>(i->field().q()), "N exceeds q");
    check_decode(ck, "ag-c3 GF(16)", *i, 1, 81);
  }
  try {
    build(make_spec(SchemeKind::RsMatDot, "rational:q=16", {3, 3, 3, 1, 1, 3}, 40));
    ck.expect(false, "rs-matdot N=40 over GF(16) was accepted");
  } catch (const BuildError& e) {
    ck.note(std::string("rs-matdot rejected: ") + e.what());
  }
  return {8, "Code length beyond the field size", ck.passed(), ck.detail()};
}

CriterionResult criterion9(const Registry& reg) {
  Checker ck;
  int pairs = 0;
  for (const auto& c : {Curve::hermitian(2), Curve::hermitian(3), Curve::elliptic(5, 1, 1), Curve::elliptic(7, 1, 3)}) {
    std::mt19937_64 rng(900 + c->genus());
    const auto places = rational_places(*c);
    for (int t = 0; t < kAcceptanceValuationPairs; ++t) {
      const Divisor D = find_nonspecial_divisor(c, {}, 9000 + static_cast<std::uint64_t>(t));
      Divisor A;
      const int terms = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < terms; ++k) A.add(places[rng() % places.size()], 1 + static_cast<int>(rng() % 3));
      const int ell = riemann_roch_basis(c, D + A).dimension();
      ck.expect(ell == A.degree() + 1, c->spec() + " l(D+A)=" + std::to_string(ell) + " with deg A=" + std::to_string(A.degree()));
      ++pairs;
    }
  }
  int shapes = 0;
  for (const auto& b : reg.built) {
    if (b.inst.gapped.empty()) continue;
    const int a = b.inst.spec.kind == SchemeKind::AgC4 || b.inst.spec.kind == SchemeKind::AgEntangled ? b.inst.gap_window : 0;
    ck.expect(gapped_shape(b.inst.gapped, a), b.label + " gapped shape");
    ++shapes;
  }
  ck.note(std::to_string(pairs) + " dimension pairs; " + std::to_string(shapes) + " gapped bases");
  return {9, "Riemann-Roch dimensions and gapped bases", ck.passed(), ck.detail()};
}

CriterionResult criterion10(const Registry& reg) {
  Checker ck;
  for (const auto& b : reg.built) {
    const auto& P = b.inst.spec.part;
    const std::uint64_t t = P.t, r = P.r, s = P.s, m = P.m, n = P.n, p = P.p;
    const std::uint64_t N = b.inst.N, R = b.inst.R;
    const CostLedger l = cost_report(b.inst);
    ck.expect(l.upload == N * (t * r / (m * p) + r * s / (n * p)), b.label + " upload");
    ck.expect(l.download == R * (t * s / (m * n)), b.label + " download");
    ck.expect(l.worker_multiplications == (t / m) * (r / p) * (s / n), b.label + " worker multiplications");
  }
  ck.note(std::to_string(reg.built.size()) + " instances");
  return {10, "Cost ledgers", ck.passed(), ck.detail()};
}

CriterionResult criterion11(const Registry& reg) {
  Checker ck;
  int controls = 0;
  for (const auto& b : reg.built) {
    const ConditionReport rep = verify_conditions(b.inst);
    ck.expect(rep.passed(), b.label + " conditions: " + rep.to_string());
    if (b.inst.g_funcs.size() >= 2) {
      ck.expect(!verify_conditions(with_swapped_g(b.inst, 0, 1)).passed(), b.label + " corrupted instance not flagged");
      ++controls;
    }
  }
  ck.expect(controls > 0, "no negative control ran");
  ck.note(std::to_string(reg.built.size()) + " instances, " + std::to_string(controls) + " negative controls");
  return {11, "Condition verifier and negative control", ck.passed(), ck.detail()};
}

std::string criterion5_outputs() {
  const SchemeInstance inst = build(c4_spec());
  const auto [A, B] = matrices(inst, 1201);
  std::string out = sweep_csv(threshold_sweep(inst, A, B, kAcceptanceSampledSubsets, 1202));
  out += to_json(run_round(inst, A, B, StragglerModel::delay_race(1.0, 1.0, 1203), 1204)).dump();
  out += to_json(run_round(inst, A, B, StragglerModel::random(inst.R, 1205), 1206)).dump();
  return out;
}

CriterionResult criterion12() {
  Checker ck;
  const std::string a = criterion5_outputs();
  const std::string b = criterion5_outputs();
  ck.expect(a == b, "outputs differ between runs");
  ck.note(std::to_string(a.size()) + " bytes identical");
  return {12, "Determinism of criterion 5 outputs", ck.passed(), ck.detail()};
}

// Turns unexpected exceptions into a failed line.
CriterionResult guarded(int id, const std::string& title, const std::function<CriterionResult()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    return {id, title, false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

std::vector<CriterionResult> run_acceptance() {
  Registry reg;
  std::vector<CriterionResult> out;
  out.push_back(guarded(1, "Reed-Solomon schemes", [&] { return criterion1(reg); }));
  out.push_back(guarded(2, "ag-c1", [&] { return criterion2(reg); }));
  out.push_back(guarded(3, "ag-c2", [&] { return criterion3(reg); }));
  out.push_back(guarded(4, "ag-c3", [&] { return criterion4(reg); }));
  out.push_back(guarded(5, "ag-c4", [&] { return criterion5(reg); }));
  out.push_back(guarded(6, "ag-c5 and ag-c6", [&] { return criterion6(reg); }));
  out.push_back(guarded(7, "Comparison", [] { return criterion7(); }));
  out.push_back(guarded(8, "Field-size escape", [&] { return criterion8(reg); }));
  out.push_back(guarded(9, "Riemann-Roch bases", [&] { return criterion9(reg); }));
  out.push_back(guarded(10, "Cost ledgers", [&] { return criterion10(reg); }));
  out.push_back(guarded(11, "Verifier", [&] { return criterion11(reg); }));
  out.push_back(guarded(12, "Determinism", [] { return criterion12(); }));
  return out;
}

std::string format_line(const CriterionResult& r) {
  return std::string(r.passed ? "PASS" : "FAIL") + " " + (r.id < 10 ? " " : "") + std::to_string(r.id) + "  " + r.title +
         ": " + r.detail;
}

}  // namespace agdmm
