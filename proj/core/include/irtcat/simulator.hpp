#pragma once

// Seeded Monte Carlo harness: runs populations of simulated examinees
// through full adaptive sessions and aggregates item exposure.

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "irtcat/item.hpp"
#include "irtcat/session.hpp"

namespace irtcat {

struct ExamineeModel {
  enum class Kind { Coin, Irt };

  Kind kind = Kind::Coin;
  /// Irt only.
  double true_theta = 0.0;
  /// Coin only.
  double p_correct = 0.5;

  static ExamineeModel coin(double p = 0.5) { return {Kind::Coin, 0.0, p}; }
  static ExamineeModel irt(double theta) { return {Kind::Irt, theta, 0.5}; }
};

/// Coin: Bernoulli(p_correct). Irt: Bernoulli(icc(item, true_theta)).
int simulate_answer(const ExamineeModel& model, const ItemParameters& item, Rng& rng);

/// Seeds derived from (master seed, session index, stream). Stream 0 drives
/// the session's selection, stream 1 the examinee's answers, so every
/// strategy faces the same answer stream for a given index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream);

/// Runs one complete session to termination.
TestSession run_session(const ItemBank& bank, const TerminationConfig& config, const SelectionStrategy& strategy,
                        const ExamineeModel& model, std::uint64_t master_seed, std::uint64_t index);

struct ExposureReport {
  /// Every bank item, including items never administered.
  std::map<ItemId, int> counts;
  int n_examinees = 0;
  SelectionStrategy strategy;
  std::uint64_t seed = 0;
  int total_administered = 0;
  /// Population standard deviation of `counts`.
  double sigma = 0.0;
  std::map<FinishReason, int> finish_reasons;
};

ExposureReport run_exposure_experiment(const ItemBank& bank, int n_examinees, const SelectionStrategy& strategy,
                                       const ExamineeModel& model, const TerminationConfig& config,
                                       std::uint64_t seed);

/// Population standard deviation.
double population_sigma(const std::map<ItemId, int>& counts);

/// (theta, test information) pairs over an ascending, non-empty grid.
std::vector<std::pair<double, double>> sample_test_information(const std::vector<ItemParameters>& items,
                                                               const std::vector<double>& theta_grid);

/// lo, lo + step, ... up to hi inclusive (within rounding).
std::vector<double> make_grid(double lo, double hi, double step);

/// Synthetic 171-item bank: a = 1, b on the five tutor levels, c from the
/// option structure of each item.
ItemBank make_reference_bank();

}  // namespace irtcat
