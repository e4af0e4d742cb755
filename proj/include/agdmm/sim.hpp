#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "agdmm/schemes.hpp"

namespace agdmm {

/// Cap on exhaustive subset enumeration; larger families are sampled.
inline constexpr std::uint64_t kExhaustiveSubsetCap = 200;

struct StragglerModel {
  enum class Kind { Adversarial, Random, DelayRace };

  Kind kind = Kind::Adversarial;
  std::vector<int> erased;  // Adversarial
  int survivors = 0;        // Random
  double shift = 1.0;       // DelayRace: completion = shift + Exp(rate)
  double rate = 1.0;
  /// DelayRace: workers finishing after this time are stragglers. Unlimited when <= 0.
  double deadline = 0.0;
  std::uint64_t seed = 0;

  static StragglerModel adversarial(std::vector<int> erased);
  static StragglerModel random(int survivors, std::uint64_t seed);
  static StragglerModel delay_race(double shift, double rate, std::uint64_t seed, double deadline = 0.0);

  /// `adversarial:0,3,5`, `adversarial:`, `random:7,seed=3`, `race:shift=1,rate=2,seed=4[,deadline=3]`.
  static StragglerModel parse(std::string_view text);
  std::string to_string() const;
};

struct WorkerTiming {
  int worker = 0;
  double time = 0.0;
};

/// Surviving workers and their completion times, sorted by (time, index).
std::vector<WorkerTiming> draw_survivors(const StragglerModel& model, int N, std::uint64_t seed);

struct RunRecord {
  std::string scheme;
  std::string model;
  std::uint64_t seed = 0;
  std::vector<int> survivors;
  std::vector<int> used;
  std::string status;  // decoded, mismatch
  bool decoded_equals_oracle = false;
  CostLedger cost;
  double makespan = 0.0;
};

nlohmann::ordered_json to_json(const RunRecord& r);

/// One master/worker round. Throws InsufficientSurvivors when fewer than R workers survive.
RunRecord run_round(const SchemeInstance& inst, const Matrix& A, const Matrix& B, const StragglerModel& model,
                    std::uint64_t seed);

struct SweepRow {
  int k = 0;
  std::uint64_t subsets_tested = 0;
  std::uint64_t successes = 0;
  double fraction = 0.0;
};

/// Success rate of decoding from k-subsets, k = max(1, K - 1) .. N.
std::vector<SweepRow> threshold_sweep(const SchemeInstance& inst, const Matrix& A, const Matrix& B, int trials,
                                      std::uint64_t seed);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct CompareRow {
  std::string curve;
  std::string scheme;
  int ours = 0;
  int prior = 0;
  std::string source;
};

/// Our thresholds beside the earlier one-point constructions for each curve.
std::vector<CompareRow> compare_prior(const std::vector<CurvePtr>& curves, const std::vector<int>& p_values,
                                      const std::vector<std::pair<int, int>>& mn_values);
std::string compare_csv(const std::vector<CompareRow>& rows);

/// Binomial coefficient saturated at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// Exhaustive k-subsets of 0..N-1 when at most `cap`, else `cap` sorted samples from `rng_seed`.
std::vector<std::vector<int>> choose_subsets(int N, int k, std::uint64_t cap, std::uint64_t rng_seed);

}  // namespace agdmm
