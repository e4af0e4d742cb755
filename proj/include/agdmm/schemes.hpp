#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agdmm/rr.hpp"

namespace agdmm {

enum class SchemeKind {
  RsPoly,
  RsMatDot,
  RsPolyDot,
  AgC1,
  AgC2,
  AgC3,
  AgC4,
  AgC5,
  AgC6,
  AgEntangled,
  /// PolyDot design on a non-special-divisor basis. Violates the gap window; diagnostic only.
  AgPolyDotNonspecial,
};

enum class PolyDotProfile { PolyDot, Entangled, New };

/// Polynomial kinds read products straight off basis coordinates; Coefficient
/// kinds read them from expansion coefficients at infinity.
enum class RecoveryType { Polynomial, Coefficient };

std::string to_string(SchemeKind kind);
SchemeKind parse_scheme_kind(std::string_view name);
std::string to_string(PolyDotProfile profile);
PolyDotProfile parse_profile(std::string_view name);
bool is_rs(SchemeKind kind) noexcept;
RecoveryType recovery_type(SchemeKind kind) noexcept;

/// A is split into m x p blocks of size t/m x r/p, B into p x n blocks of size r/p x s/n.
struct PartitionSpec {
  int t = 1, r = 1, s = 1;
  int m = 1, n = 1, p = 1;

  friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;
};

/// `kind=ag-c3;curve=hermitian:u=2;t=4;r=4;s=4;m=1;n=1;p=2;N=6;seed=7`
struct SchemeSpec {
  SchemeKind kind = SchemeKind::RsPoly;
  PolyDotProfile profile = PolyDotProfile::New;  // rs-polydot only
  std::string curve = "rational:q=7";
  PartitionSpec part;
  int N = 1;
  std::uint64_t seed = 0;

  static SchemeSpec parse(std::string_view text);
  std::string to_string() const;
  friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

struct SchemeInstance {
  SchemeSpec spec;
  CurvePtr curve;
  RecoveryType recovery = RecoveryType::Polynomial;

  Divisor D;              // non-special divisor, when used
  std::optional<Place> Q;  // second designated place, two-point kinds
  bool swapped = false;   // ag-c2 with the roles of m and n exchanged
  bool m_case = true;     // two-point kinds: which branch of the exponent design

  /// f_(i,j) at (i-1)*p + (j-1); g_(k,w) at (k-1)*n + (w-1).
  std::vector<FunctionRep> f_funcs;
  std::vector<FunctionRep> g_funcs;
  /// Designed pole orders at infinity of f_funcs and g_funcs.
  std::vector<int> f_exponents;
  std::vector<int> g_exponents;
  /// Coefficient kinds: C_(i,w) sits at t^-targets[(i-1)*n + (w-1)].
  std::vector<int> targets;

  /// The gapped family the functions were drawn from (empty for RS and one-point parts).
  std::vector<FunctionRep> gapped;
  /// Zero window of the gapped family: coefficients at exponents 1..gap_window vanish.
  int gap_window = 0;

  Divisor G;
  int R = 0;
  int K = 0;
  int N = 0;
  std::vector<FunctionRep> code_basis;
  std::vector<Place> eval_places;
  Matrix basis_eval;  // K x N
  Matrix f_eval;      // mp x N
  Matrix g_eval;      // pn x N
  /// Polynomial kinds: basis position holding A_i B_j at (i-1) + (j-1)m.
  std::vector<int> recovery_index;
  /// Coefficient kinds: K x mn table of basis coefficients at the targets.
  std::optional<Matrix> recovery_coeffs;

  const Field& field() const { return curve->field(); }
  int block_rows() const { return spec.part.t / spec.part.m; }
  int block_cols() const { return spec.part.s / spec.part.n; }
};

/// Builds and verifies an instance. Throws BuildError.
SchemeInstance build(const SchemeSpec& spec);
SchemeInstance build(SchemeKind kind, const CurvePtr& curve, const PartitionSpec& part, int N, std::uint64_t seed,
                     PolyDotProfile profile = PolyDotProfile::New);

/// Closed-form recovery threshold for the kind, or nullopt when the kind does not apply.
std::optional<int> closed_form_threshold(const SchemeSpec& spec);

struct ConditionReport {
  std::vector<std::string> violations;
  int checks = 0;
  bool passed() const noexcept { return violations.empty(); }
  std::string to_string() const;
};

ConditionReport verify_conditions(const SchemeInstance& inst);

/// Copy of `inst` with g functions a and b exchanged (tables included, exponents kept).
SchemeInstance with_swapped_g(const SchemeInstance& inst, std::size_t a, std::size_t b);

struct Payload {
  int worker = 0;
  Matrix a;
  Matrix b;
};

std::vector<Payload> encode(const SchemeInstance& inst, const Matrix& A, const Matrix& B);
Matrix worker_compute(const Payload& payload);
/// Uses the R lowest-indexed results. Throws InsufficientResults or SingularSystem.
Matrix decode(const SchemeInstance& inst, const std::map<int, Matrix>& results);
/// Decodes from any number of results; nullopt if they do not determine h.
std::optional<Matrix> try_decode(const SchemeInstance& inst, const std::map<int, Matrix>& results);

struct CostLedger {
  std::uint64_t upload = 0;
  std::uint64_t download = 0;
  std::uint64_t worker_multiplications = 0;
  std::uint64_t decode_operations = 0;

  friend bool operator==(const CostLedger&, const CostLedger&) = default;
};

CostLedger cost_report(const SchemeInstance& inst);

struct BitCostCondition {
  std::string family;  // polynomial, matdot, polydot
  double bound = 0;    // g must be below this
  bool holds = false;
};

struct BitCostReport {
  int genus = 0;
  std::uint32_t q = 0;
  int N = 0;
  std::vector<BitCostCondition> conditions;
};

/// Genus conditions under which AG download bit-cost beats RS over GF(N').
BitCostReport bit_cost_advisor(const Curve& curve, const PartitionSpec& part, int N);

}  // namespace agdmm
