#pragma once

#include <string>
#include <vector>

namespace agdmm {

/// Pinned sizes of the acceptance suite. Every comparison is exact.
inline constexpr int kAcceptanceMatrixPairs = 5;
inline constexpr int kAcceptanceSampledSubsets = 200;
inline constexpr int kAcceptanceValuationPairs = 20;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
};

/// Runs criteria 1..12 in order.
std::vector<CriterionResult> run_acceptance();

/// `PASS  3  title: detail`
std::string format_line(const CriterionResult& r);

}  // namespace agdmm
