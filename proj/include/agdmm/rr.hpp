#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "agdmm/curve.hpp"

namespace agdmm {

/// Expansions stored with bases reach O(t^(a + 1 + kExpansionMargin)), a = gap width.
inline constexpr int kExpansionMargin = 4;
/// Number of sampled candidates before find_nonspecial_divisor gives up.
inline constexpr int kNonspecialSearchBudget = 256;

struct RRBasis {
  Divisor divisor;
  std::vector<FunctionRep> members;
  /// Expansions of the members at infinity.
  std::vector<LaurentSeries> expansions_at_P;

  int dimension() const noexcept { return static_cast<int>(members.size()); }
};

/**
 * Basis of L(G) for G supported on rational places.
 *
 * Affine poles are cleared by u = prod (x - c)^(e_c) over the x-fibers of the
 * positive affine part; L(G) is then u^-1 times the subspace of L(M * inf)
 * cut out by vanishing conditions at the fiber points. Members have pairwise
 * distinct pole orders at infinity.
 */
RRBasis riemann_roch_basis(const CurvePtr& curve, const Divisor& G, int expansion_prec = 1 + kExpansionMargin);

/// Effective D of degree g with l(D) = 1, on g affine places with distinct x-coordinates.
Divisor find_nonspecial_divisor(const CurvePtr& curve, const std::vector<Place>& exclusions, std::uint64_t seed,
                                int budget = kNonspecialSearchBudget);

/**
 * Basis f_0 = 1, f_1, ..., f_v of L(D + v * inf) whose expansions at infinity
 * are t^-i + (terms of positive degree). D must be non-special and avoid infinity.
 */
RRBasis gapped_basis(const CurvePtr& curve, const Divisor& D, int v, int expansion_prec = 1 + kExpansionMargin);

/**
 * Functions f_0, ..., f_(a+b) in L((2g + a) Q + (a + b) inf) with expansions at
 * infinity t^-i + (terms of degree > a). Q must be an affine rational place.
 */
std::vector<FunctionRep> two_point_gapped_basis(const CurvePtr& curve, const Place& Q, int a, int b);

/// Weierstrass semigroup of the place at infinity.
class SemigroupView {
 public:
  explicit SemigroupView(const Curve& curve);

  int genus() const noexcept { return genus_; }
  const std::vector<int>& gaps() const noexcept { return gaps_; }
  int conductor() const noexcept { return conductor_; }
  bool member(int k) const noexcept;
  std::vector<int> pole_numbers(int bound) const;
  /// Smallest pole number >= m.
  int m_prime(int m) const;
  /// m_1 = 0, m_i = smallest pole number >= m_(i-1) + m.
  std::vector<int> m_sequence(int m, int n) const;
  std::string describe() const;

 private:
  int genus_;
  std::vector<int> gaps_;
  std::vector<int> generators_;
  int conductor_;
};

SemigroupView semigroup(const Curve& curve);

struct BasisExtension {
  std::vector<FunctionRep> basis;
  /// Position in `basis` of each input function (always 0..k-1).
  std::vector<int> index_map;
  /// For each basis member, the ambient index it was taken from, or -1 for inputs.
  std::vector<int> ambient_source;
};

/// Completes independent members of L(G) to a basis, keeping them first and in order.
BasisExtension extend_to_basis(const std::vector<FunctionRep>& independent, const RRBasis& ambient);

/// Coordinates of functions over a common denominator, one row per function.
Matrix numerator_matrix(const std::vector<FunctionRep>& fs);

}  // namespace agdmm
