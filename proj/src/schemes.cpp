#include "agdmm/schemes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

namespace agdmm {

namespace {

struct KindName {
  SchemeKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {SchemeKind::RsPoly, "rs-poly"},
    {SchemeKind::RsMatDot, "rs-matdot"},
    {SchemeKind::RsPolyDot, "rs-polydot"},
    {SchemeKind::AgC1, "ag-c1"},
    {SchemeKind::AgC2, "ag-c2"},
    {SchemeKind::AgC3, "ag-c3"},
    {SchemeKind::AgC4, "ag-c4"},
    {SchemeKind::AgC5, "ag-c5"},
    {SchemeKind::AgC6, "ag-c6"},
    {SchemeKind::AgEntangled, "ag-entangled"},
    {SchemeKind::AgPolyDotNonspecial, "ag-polydot-nonspecial"},
};

[[noreturn]] void fail(BuildErrorCode code, const std::string& what) { throw BuildError(code, what); }

bool matdot_kind(SchemeKind k) { return k == SchemeKind::RsMatDot || k == SchemeKind::AgC3; }

bool polydot_m_case(int m, int n) { return m == 1 || (m >= n && n >= 2); }

// Exponents of f_(i,j), g_(k,w) and the targets for weights (alpha, beta, theta).
struct Design {
  std::vector<int> ef, eg, targets;
  bool m_case = true;

  int emax() const {
    int e = 0;
    for (int v : ef) e = std::max(e, v);
    for (int v : eg) e = std::max(e, v);
    return e;
  }
  int max_product() const { return *std::max_element(ef.begin(), ef.end()) + *std::max_element(eg.begin(), eg.end()); }
  int dmin() const { return targets.empty() ? 0 : *std::min_element(targets.begin(), targets.end()); }
};

Design weighted_design(int m, int n, int p, int alpha, int beta, int theta) {
  Design d;
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= p; ++j) d.ef.push_back((i - 1) * alpha + (j - 1) * beta);
  for (int k = 1; k <= p; ++k)
    for (int w = 1; w <= n; ++w) d.eg.push_back((p - k) * beta + (w - 1) * theta);
  for (int i = 1; i <= m; ++i)
    for (int w = 1; w <= n; ++w) d.targets.push_back((i - 1) * alpha + (p - 1) * beta + (w - 1) * theta);
  return d;
}

// Semigroup data needed by the polynomial kinds.
struct PolyParams {
  int m_prime = 0;
  std::vector<int> m_seq;
  bool swapped = false;
};

Design make_design(SchemeKind kind, PolyDotProfile profile, const PartitionSpec& P, const SemigroupView& W,
                   PolyParams& pp) {
  const int m = P.m, n = P.n, p = P.p;
  Design d;
  switch (kind) {
    case SchemeKind::RsPoly:
    case SchemeKind::AgC1:
      for (int i = 1; i <= m; ++i) d.ef.push_back(i - 1);
      for (int j = 1; j <= n; ++j) d.eg.push_back((j - 1) * m);
      return d;
    case SchemeKind::AgC2:
      if (W.member(m)) {
        for (int i = 1; i <= m; ++i) d.ef.push_back(i - 1);
        for (int j = 1; j <= n; ++j) d.eg.push_back((j - 1) * m);
      } else if (W.member(n)) {
        pp.swapped = true;
        for (int i = 1; i <= m; ++i) d.ef.push_back((i - 1) * n);
        for (int j = 1; j <= n; ++j) d.eg.push_back(j - 1);
      } else {
        fail(BuildErrorCode::SemigroupPreconditionFailed,
             "neither m = " + std::to_string(m) + " nor n = " + std::to_string(n) + " is a pole number at infinity (" +
                 W.describe() + ")");
      }
      return d;
    case SchemeKind::AgC5:
      pp.m_prime = W.m_prime(m);
      for (int i = 1; i <= m; ++i) d.ef.push_back(i - 1);
      for (int j = 1; j <= n; ++j) d.eg.push_back((j - 1) * pp.m_prime);
      return d;
    case SchemeKind::AgC6:
      pp.m_seq = W.m_sequence(m, n);
      for (int i = 1; i <= m; ++i) d.ef.push_back(i - 1);
      d.eg = pp.m_seq;
      return d;
    case SchemeKind::RsMatDot:
    case SchemeKind::AgC3:
      return weighted_design(1, 1, p, 0, 1, 0);
    case SchemeKind::RsPolyDot:
      switch (profile) {
        case PolyDotProfile::PolyDot: return weighted_design(m, n, p, 1, m, m * (2 * p - 1));
        case PolyDotProfile::Entangled: return weighted_design(m, n, p, p, 1, m * p);
        case PolyDotProfile::New: return weighted_design(m, n, p, 1, m * n, m);
      }
      break;
    case SchemeKind::AgC4:
    case SchemeKind::AgPolyDotNonspecial: {
      const bool mc = polydot_m_case(m, n);
      d = mc ? weighted_design(m, n, p, 1, m * n, m) : weighted_design(m, n, p, n, m * n, 1);
      d.m_case = mc;
      return d;
    }
    case SchemeKind::AgEntangled: {
      const bool mc = polydot_m_case(m, n);
      d = mc ? weighted_design(m, n, p, p, 1, m * p) : weighted_design(m, n, p, n * p, 1, p);
      d.m_case = mc;
      return d;
    }
  }
  throw std::logic_error("unhandled scheme kind");
}

// G = d_mult * D + q_mult * Q + p_coef * inf.
struct DivisorShape {
  int d_mult = 0;
  int q_mult = 0;
  int p_coef = 0;
  int degree(int g) const { return d_mult * g + q_mult + p_coef; }
};

DivisorShape divisor_shape(SchemeKind kind, const PartitionSpec& P, const Design& d, const PolyParams& pp, int g) {
  const int m = P.m, n = P.n;
  switch (kind) {
    case SchemeKind::RsPoly:
    case SchemeKind::RsMatDot:
    case SchemeKind::RsPolyDot: return {0, 0, d.max_product()};
    case SchemeKind::AgC1: return {2, 0, m * n - 1};
    case SchemeKind::AgC2: return {1, 0, m * n - 1};
    case SchemeKind::AgC3: return {2, 0, d.max_product()};
    case SchemeKind::AgC5: return {1, 0, pp.m_prime * n - 1};
    case SchemeKind::AgC6: return {1, 0, m + pp.m_seq.back() - 1};
    case SchemeKind::AgC4:
    case SchemeKind::AgEntangled: {
      const int a = d.emax() - d.dmin();
      return {0, 4 * g + 2 * a, d.max_product()};
    }
    case SchemeKind::AgPolyDotNonspecial: return {2, 0, d.max_product()};
  }
  throw std::logic_error("unhandled scheme kind");
}

void check_partition(const SchemeSpec& spec) {
  const auto& P = spec.part;
  if (P.t < 1 || P.r < 1 || P.s < 1 || P.m < 1 || P.n < 1 || P.p < 1)
    fail(BuildErrorCode::InvalidPartition, "dimensions and split counts must be positive");
  if (P.t % P.m) fail(BuildErrorCode::InvalidPartition, "m = " + std::to_string(P.m) + " does not divide t = " + std::to_string(P.t));
  if (P.r % P.p) fail(BuildErrorCode::InvalidPartition, "p = " + std::to_string(P.p) + " does not divide r = " + std::to_string(P.r));
  if (P.s % P.n) fail(BuildErrorCode::InvalidPartition, "n = " + std::to_string(P.n) + " does not divide s = " + std::to_string(P.s));
  if (spec.N < 1) fail(BuildErrorCode::InvalidPartition, "N must be positive");
  if (recovery_type(spec.kind) == RecoveryType::Polynomial && P.p != 1)
    fail(BuildErrorCode::InvalidPartition, to_string(spec.kind) + " splits A by rows and B by columns only; needs p = 1");
  if (matdot_kind(spec.kind) && (P.m != 1 || P.n != 1))
    fail(BuildErrorCode::InvalidPartition, to_string(spec.kind) + " splits the inner dimension only; needs m = n = 1");
}

Matrix evaluation_table(const std::vector<FunctionRep>& fs, const std::vector<Place>& places) {
  const Field& f = fs.front().curve().field();
  Matrix m(f, fs.size(), places.size());
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = 0; j < places.size(); ++j) m(i, j) = evaluate(fs[i], places[j]).value();
  return m;
}

std::vector<Place> admissible_places(const Curve& curve, const Divisor& G, const std::vector<const FunctionRep*>& fs) {
  std::set<Elem> bad_x, bad_y;
  for (const auto& p : G.support())
    if (!p.at_infinity) bad_x.insert(p.x);
  for (const auto* f : fs)
    for (const auto& [s, e] : f->denominator()) (s.var == ShiftForm::Var::X ? bad_x : bad_y).insert(s.value);
  std::vector<Place> out;
  for (const auto& p : curve.affine_places())
    if (!bad_x.contains(p.x) && !bad_y.contains(p.y)) out.push_back(p);
  return out;
}

std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

int parse_int(std::string_view key, std::string_view v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ParseError("scheme spec: " + std::string(key) + " expects an integer, got '" + std::string(v) + "'");
  return out;
}

}  // namespace

std::string to_string(SchemeKind kind) {
  for (const auto& k : kKindNames)
    if (k.kind == kind) return k.name;
  return "unknown";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  for (const auto& k : kKindNames)
    if (name == k.name) return k.kind;
  throw ParseError("unknown scheme kind '" + std::string(name) + "'");
}

std::string to_string(PolyDotProfile profile) {
  switch (profile) {
    case PolyDotProfile::PolyDot: return "polydot";
    case PolyDotProfile::Entangled: return "entangled";
    case PolyDotProfile::New: return "new";
  }
  return "unknown";
}

PolyDotProfile parse_profile(std::string_view name) {
  if (name == "polydot") return PolyDotProfile::PolyDot;
  if (name == "entangled") return PolyDotProfile::Entangled;
  if (name == "new") return PolyDotProfile::New;
  throw ParseError("unknown PolyDot profile '" + std::string(name) + "'");
}

bool is_rs(SchemeKind kind) noexcept {
  return kind == SchemeKind::RsPoly || kind == SchemeKind::RsMatDot || kind == SchemeKind::RsPolyDot;
}

RecoveryType recovery_type(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::RsPoly:
    case SchemeKind::AgC1:
    case SchemeKind::AgC2:
    case SchemeKind::AgC5:
    case SchemeKind::AgC6: return RecoveryType::Polynomial;
    default: return RecoveryType::Coefficient;
  }
}

SchemeSpec SchemeSpec::parse(std::string_view text) {
  SchemeSpec spec;
  bool have_kind = false, have_curve = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    pos = end + 1;
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("scheme spec: expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const std::string_view val = item.substr(eq + 1);
    if (key == "kind") {
      spec.kind = parse_scheme_kind(val);
      have_kind = true;
    } else if (key == "profile") {
      spec.profile = parse_profile(val);
    } else if (key == "curve") {
      spec.curve = std::string(val);
      have_curve = true;
    } else if (key == "t") {
      spec.part.t = parse_int(key, val);
    } else if (key == "r") {
      spec.part.r = parse_int(key, val);
    } else if (key == "s") {
      spec.part.s = parse_int(key, val);
    } else if (key == "m") {
      spec.part.m = parse_int(key, val);
    } else if (key == "n") {
      spec.part.n = parse_int(key, val);
    } else if (key == "p") {
      spec.part.p = parse_int(key, val);
    } else if (key == "N") {
      spec.N = parse_int(key, val);
    } else if (key == "seed") {
      std::uint64_t s = 0;
      const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), s);
      if (ec != std::errc{} || ptr != val.data() + val.size()) throw ParseError("scheme spec: bad seed '" + std::string(val) + "'");
      spec.seed = s;
    } else {
      throw ParseError("scheme spec: unknown key '" + std::string(key) + "'");
    }
  }
  if (!have_kind) throw ParseError("scheme spec: missing kind");
  if (!have_curve) throw ParseError("scheme spec: missing curve");
  return spec;
}

std::string SchemeSpec::to_string() const {
  std::ostringstream os;
  os << "kind=" << agdmm::to_string(kind);
  if (kind == SchemeKind::RsPolyDot) os << ";profile=" << agdmm::to_string(profile);
  os << ";curve=" << curve << ";t=" << part.t << ";r=" << part.r << ";s=" << part.s << ";m=" << part.m
     << ";n=" << part.n << ";p=" << part.p << ";N=" << N << ";seed=" << seed;
  return os.str();
}

// ---------------------------------------------------------------------------

std::optional<int> closed_form_threshold(const SchemeSpec& spec) {
  const CurvePtr curve = Curve::parse(spec.curve);
  const int g = curve->genus();
  const int m = spec.part.m, n = spec.part.n, p = spec.part.p;
  const SemigroupView W(*curve);
  const bool mc = polydot_m_case(m, n);
  switch (spec.kind) {
    case SchemeKind::RsPoly: return m * n;
    case SchemeKind::RsMatDot: return 2 * p - 1;
    case SchemeKind::RsPolyDot:
      return spec.profile == PolyDotProfile::Entangled ? p * m * n + p - 1 : (2 * p - 1) * m * n;
    case SchemeKind::AgC1: return 2 * g + m * n;
    case SchemeKind::AgC2:
      if (!W.member(m) && !W.member(n)) return std::nullopt;
      return g + m * n;
    case SchemeKind::AgC3: return 2 * g + 2 * p - 1;
    case SchemeKind::AgC4: return 4 * g + (2 * p - 1) * m * n + 2 * m * n - 2 * (mc ? m : n);
    case SchemeKind::AgC5: return g + W.m_prime(m) * n;
    case SchemeKind::AgC6: return g + W.m_sequence(m, n).back() + m;
    case SchemeKind::AgEntangled: return 4 * g + 3 * n * m * p - 2 * (mc ? m : n) * p + p - 1;
    case SchemeKind::AgPolyDotNonspecial: return 2 * g + (2 * p - 1) * m * n;
  }
  return std::nullopt;
}

SchemeInstance build(SchemeKind kind, const CurvePtr& curve, const PartitionSpec& part, int N, std::uint64_t seed,
                     PolyDotProfile profile) {
  SchemeSpec spec;
  spec.kind = kind;
  spec.profile = profile;
  spec.curve = curve->spec();
  spec.part = part;
  spec.N = N;
  spec.seed = seed;
  return build(spec);
}

SchemeInstance build(const SchemeSpec& spec) {
  check_partition(spec);
  const CurvePtr curve = Curve::parse(spec.curve);
  const int g = curve->genus();
  const auto& P = spec.part;
  if (is_rs(spec.kind) && g != 0)
    fail(BuildErrorCode::GenusMismatch, to_string(spec.kind) + " needs a genus-0 curve, " + curve->spec() + " has genus " +
                                            std::to_string(g));

  const SemigroupView W(*curve);
  PolyParams pp;
  const Design design = make_design(spec.kind, spec.profile, P, W, pp);
  const DivisorShape shape = divisor_shape(spec.kind, P, design, pp, g);
  const int R = shape.degree(g) + 1;
  if (R > spec.N)
    fail(BuildErrorCode::ThresholdExceedsPlaces, "recovery threshold R = " + std::to_string(R) + " exceeds N = " +
                                                     std::to_string(spec.N));

  SchemeInstance inst;
  inst.spec = spec;
  inst.curve = curve;
  inst.recovery = recovery_type(spec.kind);
  inst.swapped = pp.swapped;
  inst.m_case = design.m_case;
  inst.f_exponents = design.ef;
  inst.g_exponents = design.eg;
  inst.targets = design.targets;
  inst.R = R;
  inst.N = spec.N;

  const auto aff = curve->affine_places();
  if (shape.d_mult > 0) inst.D = find_nonspecial_divisor(curve, {}, spec.seed);
  if (spec.kind == SchemeKind::AgC4 || spec.kind == SchemeKind::AgEntangled) {
    if (aff.empty()) fail(BuildErrorCode::InsufficientPlaces, "no affine place available for Q");
    inst.Q = aff.front();
  }
  inst.G = shape.d_mult * inst.D + Divisor::single(Place::infinity(), shape.p_coef);
  if (inst.Q && shape.q_mult > 0) inst.G += Divisor::single(*inst.Q, shape.q_mult);

  // Function families.
  auto pick = [](const std::vector<FunctionRep>& fam, const std::vector<int>& idx) {
    std::vector<FunctionRep> out;
    for (int i : idx) out.push_back(fam.at(static_cast<std::size_t>(i)));
    return out;
  };
  auto monomials = [&](const std::vector<int>& ks) {
    std::vector<FunctionRep> out;
    for (int k : ks) out.push_back(FunctionRep::monomial(curve, k));
    return out;
  };
  switch (spec.kind) {
    case SchemeKind::RsPoly:
    case SchemeKind::RsMatDot:
    case SchemeKind::RsPolyDot:
      inst.f_funcs = monomials(design.ef);
      inst.g_funcs = monomials(design.eg);
      break;
    case SchemeKind::AgC1: {
      inst.gapped = gapped_basis(curve, inst.D, P.n == 1 ? P.m - 1 : (P.n - 1) * P.m).members;
      inst.f_funcs = pick(inst.gapped, design.ef);
      inst.g_funcs = pick(inst.gapped, design.eg);
      break;
    }
    case SchemeKind::AgC2:
      if (pp.swapped) {
        inst.gapped = gapped_basis(curve, inst.D, P.n - 1).members;
        inst.f_funcs = monomials(design.ef);
        inst.g_funcs = pick(inst.gapped, design.eg);
      } else {
        inst.gapped = gapped_basis(curve, inst.D, P.m - 1).members;
        inst.f_funcs = pick(inst.gapped, design.ef);
        inst.g_funcs = monomials(design.eg);
      }
      break;
    case SchemeKind::AgC5:
    case SchemeKind::AgC6:
      inst.gapped = gapped_basis(curve, inst.D, P.m - 1).members;
      inst.f_funcs = pick(inst.gapped, design.ef);
      inst.g_funcs = monomials(design.eg);
      break;
    case SchemeKind::AgC3:
    case SchemeKind::AgPolyDotNonspecial:
      inst.gapped = gapped_basis(curve, inst.D, design.emax()).members;
      inst.f_funcs = pick(inst.gapped, design.ef);
      inst.g_funcs = pick(inst.gapped, design.eg);
      break;
    case SchemeKind::AgC4:
    case SchemeKind::AgEntangled: {
      const int a = design.emax() - design.dmin();
      inst.gap_window = a;
      inst.gapped = two_point_gapped_basis(curve, *inst.Q, a, design.emax() - a);
      inst.f_funcs = pick(inst.gapped, design.ef);
      inst.g_funcs = pick(inst.gapped, design.eg);
      break;
    }
  }

  // Code basis of L(G).
  if (inst.recovery == RecoveryType::Polynomial) {
    const RRBasis L = riemann_roch_basis(curve, inst.G, 1);
    std::vector<FunctionRep> products;
    for (int j = 0; j < P.n; ++j)
      for (int i = 0; i < P.m; ++i) products.push_back(inst.f_funcs[i] * inst.g_funcs[j]);
    BasisExtension ext;
    try {
      ext = extend_to_basis(products, L);
    } catch (const DependentInput& e) {
      fail(BuildErrorCode::ConditionViolated, std::string("products f_i g_j do not extend to a basis: ") + e.what());
    }
    inst.code_basis = std::move(ext.basis);
    for (int k = 0; k < P.m * P.n; ++k) inst.recovery_index.push_back(k);
  } else {
    const RRBasis L = riemann_roch_basis(curve, inst.G, -design.dmin() + 1);
    inst.code_basis = L.members;
    Matrix coeffs(curve->field(), L.members.size(), design.targets.size());
    for (std::size_t k = 0; k < L.members.size(); ++k)
      for (std::size_t t = 0; t < design.targets.size(); ++t) coeffs(k, t) = L.expansions_at_P[k].coeff(-design.targets[t]);
    inst.recovery_coeffs = std::move(coeffs);
  }
  inst.K = static_cast<int>(inst.code_basis.size());
  if (inst.K > inst.R) throw std::logic_error("code dimension exceeds the recovery threshold");

  // Evaluation places.
  std::vector<const FunctionRep*> all;
  for (const auto& f : inst.f_funcs) all.push_back(&f);
  for (const auto& f : inst.g_funcs) all.push_back(&f);
  for (const auto& f : inst.code_basis) all.push_back(&f);
  std::vector<Place> places = admissible_places(*curve, inst.G + inst.D, all);
  if (static_cast<int>(places.size()) < spec.N)
    fail(BuildErrorCode::InsufficientPlaces, curve->spec() + " has " + std::to_string(places.size()) +
                                                 " admissible evaluation places, N = " + std::to_string(spec.N));
  places.resize(static_cast<std::size_t>(spec.N));
  inst.eval_places = std::move(places);
  inst.basis_eval = evaluation_table(inst.code_basis, inst.eval_places);
  inst.f_eval = evaluation_table(inst.f_funcs, inst.eval_places);
  inst.g_eval = evaluation_table(inst.g_funcs, inst.eval_places);

  if (spec.kind != SchemeKind::AgPolyDotNonspecial) {
    const ConditionReport report = verify_conditions(inst);
    if (!report.passed()) fail(BuildErrorCode::ConditionViolated, report.to_string());
  }
  return inst;
}

// ---------------------------------------------------------------------------

std::string ConditionReport::to_string() const {
  if (passed()) return "passed (" + std::to_string(checks) + " checks)";
  std::ostringstream os;
  os << violations.size() << " violation(s) in " << checks << " checks";
  for (const auto& v : violations) os << "\n  " << v;
  return os.str();
}

ConditionReport verify_conditions(const SchemeInstance& inst) {
  ConditionReport rep;
  const auto& P = inst.spec.part;
  const int m = P.m, n = P.n, p = P.p;
  const bool poly = inst.recovery == RecoveryType::Polynomial;
  auto check = [&](bool ok, const std::string& what) {
    ++rep.checks;
    if (!ok) rep.violations.push_back(what);
  };
  auto fname = [&](std::size_t idx) {
    return "f_(" + std::to_string(idx / p + 1) + "," + std::to_string(idx % p + 1) + ")";
  };
  auto gname = [&](std::size_t idx) {
    return "g_(" + std::to_string(idx / n + 1) + "," + std::to_string(idx % n + 1) + ")";
  };

  // Designed exponents.
  if (poly) {
    std::set<int> sums;
    for (int e1 : inst.f_exponents)
      for (int e2 : inst.g_exponents) sums.insert(e1 + e2);
    check(static_cast<int>(sums.size()) == m * n, "designed product exponents are not pairwise distinct");
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k)
          for (int w = 0; w < n; ++w) {
            const int s = inst.f_exponents[i * p + j] + inst.g_exponents[k * n + w];
            for (int ti = 0; ti < m; ++ti)
              for (int tw = 0; tw < n; ++tw) {
                const bool diag = i == ti && j == k && w == tw;
                if ((s == inst.targets[ti * n + tw]) != diag)
                  check(false, "designed exponent of " + fname(i * p + j) + "*" + gname(k * n + w) +
                                   (diag ? " misses" : " hits") + " target C_(" + std::to_string(ti + 1) + "," +
                                   std::to_string(tw + 1) + ")");
              }
            ++rep.checks;
          }
  }

  // Expansions at infinity.
  int window = 0;
  if (!poly) {
    const int emax = std::max(*std::max_element(inst.f_exponents.begin(), inst.f_exponents.end()),
                              *std::max_element(inst.g_exponents.begin(), inst.g_exponents.end()));
    window = std::max(0, emax - *std::min_element(inst.targets.begin(), inst.targets.end()));
  }
  const int prec = window + 1 + kExpansionMargin;
  std::vector<LaurentSeries> sf, sg;
  for (std::size_t i = 0; i < inst.f_funcs.size(); ++i) {
    sf.push_back(expand_function(inst.f_funcs[i], Place::infinity(), prec));
    check(!sf.back().is_zero() && sf.back().lead() == -inst.f_exponents[i],
          fname(i) + " has valuation " + (sf.back().is_zero() ? std::string("?") : std::to_string(sf.back().lead())) +
              " at infinity, designed " + std::to_string(-inst.f_exponents[i]));
  }
  for (std::size_t i = 0; i < inst.g_funcs.size(); ++i) {
    sg.push_back(expand_function(inst.g_funcs[i], Place::infinity(), prec));
    check(!sg.back().is_zero() && sg.back().lead() == -inst.g_exponents[i],
          gname(i) + " has valuation " + (sg.back().is_zero() ? std::string("?") : std::to_string(sg.back().lead())) +
              " at infinity, designed " + std::to_string(-inst.g_exponents[i]));
  }

  const int pole_budget = inst.G.coefficient(Place::infinity());
  if (poly) {
    std::map<int, int> seen;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) {
        const LaurentSeries prod = sf[i] * sg[j];
        const int v = prod.valuation();
        check(seen.emplace(v, i + j * m).second,
              "nu(f_" + std::to_string(i + 1) + " g_" + std::to_string(j + 1) + ") = " + std::to_string(v) +
                  " repeats another product valuation");
        check(v >= -pole_budget, "nu(f_" + std::to_string(i + 1) + " g_" + std::to_string(j + 1) + ") = " +
                                     std::to_string(v) + " exceeds the pole budget of G");
      }
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j)
        for (int k = 0; k < p; ++k)
          for (int w = 0; w < n; ++w) {
            const LaurentSeries prod = sf[i * p + j] * sg[k * n + w];
            const std::string name = fname(i * p + j) + "*" + gname(k * n + w);
            const int v = prod.valuation();
            check(v >= -pole_budget, "nu(" + name + ") = " + std::to_string(v) + " exceeds the pole budget of G");
            for (int ti = 0; ti < m; ++ti)
              for (int tw = 0; tw < n; ++tw) {
                const int d = inst.targets[ti * n + tw];
                const bool diag = i == ti && j == k && w == tw;
                const std::string cname = "C_(" + std::to_string(ti + 1) + "," + std::to_string(tw + 1) + ")";
                check((v == -d) == diag, "nu(" + name + ") = " + std::to_string(v) +
                                             (diag ? " differs from " : " equals ") + "the exponent of " + cname);
                check(prod.coeff(-d) == (diag ? 1u : 0u),
                      name + " has coefficient " + std::to_string(prod.coeff(-d)) + " at t^" + std::to_string(-d) +
                          " (" + cname + ")");
              }
          }
  }
  return rep;
}

SchemeInstance with_swapped_g(const SchemeInstance& inst, std::size_t a, std::size_t b) {
  SchemeInstance out = inst;
  std::swap(out.g_funcs.at(a), out.g_funcs.at(b));
  for (std::size_t c = 0; c < out.g_eval.cols(); ++c) std::swap(out.g_eval(a, c), out.g_eval(b, c));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Payload> encode(const SchemeInstance& inst, const Matrix& A, const Matrix& B) {
  const auto& P = inst.spec.part;
  if (&A.field() != &inst.field() || &B.field() != &inst.field()) throw FieldMismatch();
  if (A.rows() != static_cast<std::size_t>(P.t) || A.cols() != static_cast<std::size_t>(P.r))
    throw DimensionMismatch("A must be " + std::to_string(P.t) + "x" + std::to_string(P.r));
  if (B.rows() != static_cast<std::size_t>(P.r) || B.cols() != static_cast<std::size_t>(P.s))
    throw DimensionMismatch("B must be " + std::to_string(P.r) + "x" + std::to_string(P.s));
  const std::size_t ar = P.t / P.m, ac = P.r / P.p, br = P.r / P.p, bc = P.s / P.n;
  std::vector<Matrix> ablocks, bblocks;
  for (int i = 0; i < P.m; ++i)
    for (int j = 0; j < P.p; ++j) ablocks.push_back(A.block(i * ar, j * ac, ar, ac));
  for (int k = 0; k < P.p; ++k)
    for (int w = 0; w < P.n; ++w) bblocks.push_back(B.block(k * br, w * bc, br, bc));
  std::vector<Payload> out;
  for (int wk = 0; wk < inst.N; ++wk) {
    Payload pl{wk, Matrix(inst.field(), ar, ac), Matrix(inst.field(), br, bc)};
    for (std::size_t b = 0; b < ablocks.size(); ++b) pl.a.add_scaled(inst.f_eval(b, wk), ablocks[b]);
    for (std::size_t b = 0; b < bblocks.size(); ++b) pl.b.add_scaled(inst.g_eval(b, wk), bblocks[b]);
    out.push_back(std::move(pl));
  }
  return out;
}

Matrix worker_compute(const Payload& payload) { return matmul(payload.a, payload.b); }

std::optional<Matrix> try_decode(const SchemeInstance& inst, const std::map<int, Matrix>& results) {
  const Field& f = inst.field();
  const auto& P = inst.spec.part;
  const std::size_t rows = inst.block_rows(), cols = inst.block_cols(), entries = rows * cols;
  const std::size_t K = static_cast<std::size_t>(inst.K);
  if (results.size() < K || K == 0) return std::nullopt;
  Matrix E(f, results.size(), K);
  Matrix H(f, results.size(), entries);
  std::size_t r = 0;
  for (const auto& [idx, h] : results) {
    if (idx < 0 || idx >= inst.N) throw std::out_of_range("worker index " + std::to_string(idx) + " out of range");
    if (h.rows() != rows || h.cols() != cols) throw DimensionMismatch("worker result has the wrong shape");
    for (std::size_t k = 0; k < K; ++k) E(r, k) = inst.basis_eval(k, idx);
    for (std::size_t e = 0; e < entries; ++e) H(r, e) = h(e / cols, e % cols);
    ++r;
  }
  const LinearSolution sol = solve_linear(E, H);
  if (!sol.consistent() || sol.rank < K) return std::nullopt;
  const Matrix& X = *sol.solution;

  Matrix C(f, P.t, P.s);
  for (int i = 0; i < P.m; ++i)
    for (int w = 0; w < P.n; ++w) {
      Matrix blk(f, rows, cols);
      if (inst.recovery == RecoveryType::Polynomial) {
        const std::size_t k = static_cast<std::size_t>(inst.recovery_index[i + w * P.m]);
        for (std::size_t e = 0; e < entries; ++e) blk(e / cols, e % cols) = X(k, e);
      } else {
        for (std::size_t k = 0; k < K; ++k) {
          const Elem c = (*inst.recovery_coeffs)(k, i * P.n + w);
          if (c == 0) continue;
          for (std::size_t e = 0; e < entries; ++e)
            blk(e / cols, e % cols) = f.add(blk(e / cols, e % cols), f.mul(c, X(k, e)));
        }
      }
      C.set_block(i * rows, w * cols, blk);
    }
  return C;
}

Matrix decode(const SchemeInstance& inst, const std::map<int, Matrix>& results) {
  if (static_cast<int>(results.size()) < inst.R)
    throw InsufficientResults("decoding needs " + std::to_string(inst.R) + " results, got " +
                              std::to_string(results.size()));
  std::map<int, Matrix> first;
  for (const auto& [idx, h] : results) {
    if (static_cast<int>(first.size()) == inst.R) break;
    first.emplace(idx, h);
  }
  auto out = try_decode(inst, first);
  if (!out) throw SingularSystem("evaluation system of rank below K = " + std::to_string(inst.K));
  return *out;
}

CostLedger cost_report(const SchemeInstance& inst) {
  const auto& P = inst.spec.part;
  const std::uint64_t t = u64(P.t), r = u64(P.r), s = u64(P.s), m = u64(P.m), n = u64(P.n), p = u64(P.p);
  const std::uint64_t N = u64(inst.N), R = u64(inst.R), K = u64(inst.K);
  const std::uint64_t entries = (t / m) * (s / n);
  CostLedger c;
  c.upload = N * (t * r / (m * p) + r * s / (n * p));
  c.download = R * entries;
  c.worker_multiplications = (t / m) * (r / p) * (s / n);
  if (inst.recovery == RecoveryType::Polynomial)
    c.decode_operations = K * K * R + t * s * R;
  else
    c.decode_operations = K * K * R + entries * K * R + m * n * entries * K;
  return c;
}

BitCostReport bit_cost_advisor(const Curve& curve, const PartitionSpec& part, int N) {
  BitCostReport rep;
  rep.genus = curve.genus();
  rep.q = curve.field().q();
  rep.N = N;
  const double lq = std::log2(static_cast<double>(rep.q));
  const double ratio = std::log2(static_cast<double>(N) / rep.q) / lq;
  const double m = part.m, n = part.n, p = part.p;
  auto add = [&](const char* fam, double bound) {
    rep.conditions.push_back({fam, bound, static_cast<double>(rep.genus) < bound});
  };
  add("polynomial", m * n * ratio);
  add("matdot", (2 * p - 1) * ratio / 2);
  add("polydot", (2 * p - 1) * m * n * (ratio / 4 - 1 / (4 * p - 2)));
  return rep;
}

}  // namespace agdmm
