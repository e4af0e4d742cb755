#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "agdmm/schemes.hpp"

namespace agdmm {

/// Plain `key = value` experiment file; `#` starts a comment. Unknown keys are rejected.
struct ExperimentConfig {
  std::string scheme;            // scheme spec string
  std::string a_file, b_file;    // matrix files; random when empty
  std::uint64_t matrix_seed = 1;
  std::string model = "adversarial:";
  std::uint64_t seed = 1;
  int trials = 200;
  std::string out;               // stdout when empty
  std::string format;            // json or csv; empty picks the command default

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::string& path);
  std::string to_text() const;
};

/// A and B from the configured files, or seeded random matrices sized by the scheme.
std::pair<Matrix, Matrix> load_matrices(const ExperimentConfig& cfg, const SchemeInstance& inst);

}  // namespace agdmm
