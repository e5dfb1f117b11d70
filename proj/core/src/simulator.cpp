#include "irtcat/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "irtcat/calibration.hpp"

namespace irtcat {

int simulate_answer(const ExamineeModel& model, const ItemParameters& item, Rng& rng) {
  const double p = model.kind == ExamineeModel::Kind::Coin ? model.p_correct : icc(item, model.true_theta);
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("answer probability must lie in [0, 1]");
  return std::bernoulli_distribution(p)(rng) ? 1 : 0;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

TestSession run_session(const ItemBank& bank, const TerminationConfig& config, const SelectionStrategy& strategy,
                        const ExamineeModel& model, std::uint64_t master_seed, std::uint64_t index) {
  auto session = start_session(bank, config, strategy, derive_seed(master_seed, index, 0),
                               "sim-" + std::to_string(index), "examinee-" + std::to_string(index));
  Rng answers(derive_seed(master_seed, index, 1));
  while (session.pending) {
    const Item* item = bank.find(*session.pending);
    submit_answer(session, bank, item->id, simulate_answer(model, item->params, answers));
  }
  return session;
}

double population_sigma(const std::map<ItemId, int>& counts) {
  if (counts.empty()) return 0.0;
  double mean = 0.0;
  for (const auto& [_, c] : counts) mean += c;
  mean /= static_cast<double>(counts.size());
  double ss = 0.0;
  for (const auto& [_, c] : counts) ss += (c - mean) * (c - mean);
  return std::sqrt(ss / static_cast<double>(counts.size()));
}

ExposureReport run_exposure_experiment(const ItemBank& bank, int n_examinees, const SelectionStrategy& strategy,
                                       const ExamineeModel& model, const TerminationConfig& config,
                                       std::uint64_t seed) {
  if (n_examinees < 1) throw std::invalid_argument("need at least one examinee");
  ExposureReport report;
  report.n_examinees = n_examinees;
  report.strategy = strategy;
  report.seed = seed;
  for (const auto& item : bank.items) report.counts[item.id] = 0;

  for (int i = 0; i < n_examinees; ++i) {
    const auto session = run_session(bank, config, strategy, model, seed, static_cast<std::uint64_t>(i));
    for (const auto& a : session.administered) ++report.counts[a.id];
    report.total_administered += static_cast<int>(session.administered.size());
    ++report.finish_reasons[*session.finish_reason];
  }
  report.sigma = population_sigma(report.counts);
  return report;
}

std::vector<std::pair<double, double>> sample_test_information(const std::vector<ItemParameters>& items,
                                                               const std::vector<double>& theta_grid) {
  if (theta_grid.empty()) throw std::invalid_argument("theta grid must not be empty");
  std::vector<std::pair<double, double>> curve;
  curve.reserve(theta_grid.size());
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    if (i > 0 && !(theta_grid[i] > theta_grid[i - 1])) throw std::invalid_argument("theta grid must be ascending");
    curve.emplace_back(theta_grid[i], test_information(items, theta_grid[i]));
  }
  return curve;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("grid needs lo <= hi and a positive step");
  }
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

ItemBank make_reference_bank() {
  struct Block {
    int level;
    int n_options;
    int n_correct;
    int count;
  };
  // 26 distinct (b, c) pairs over 171 items. At theta = 0.5 the two most
  // informative pairs hold one item each and the third holds thirteen.
  static constexpr Block kBlocks[] = {
      {1, 5, 2, 9},  {1, 4, 2, 6}, {1, 5, 1, 9},  {1, 4, 1, 6}, {1, 2, 1, 5},
      {2, 5, 2, 10}, {2, 4, 2, 5}, {2, 5, 1, 9},  {2, 4, 1, 6}, {2, 2, 1, 4},
      {3, 6, 2, 1},  {3, 5, 2, 1}, {3, 4, 2, 13}, {3, 5, 1, 8}, {3, 4, 1, 6}, {3, 3, 1, 3}, {3, 2, 1, 2},
      {4, 5, 2, 10}, {4, 4, 2, 6}, {4, 5, 1, 8},  {4, 4, 1, 6}, {4, 2, 1, 4},
      {5, 5, 2, 12}, {5, 5, 1, 10}, {5, 4, 1, 8}, {5, 2, 1, 4},
  };
  static constexpr const char* kTopics[] = {"recursion", "pointers", "sorting", "complexity"};

  ItemBank bank;
  ItemId next_id = 1;
  for (const auto& block : kBlocks) {
    for (int i = 0; i < block.count; ++i) {
      Item item;
      item.id = next_id++;
      item.stem = "Reference item " + std::to_string(item.id) + " (level " + std::to_string(block.level) + ")";
      for (int o = 0; o < block.n_options; ++o) item.options.push_back(std::string("Option ") + char('A' + o));
      const int first = static_cast<int>(item.id % static_cast<ItemId>(block.n_options));
      for (int k = 0; k < block.n_correct; ++k) item.correct_options.push_back((first + k) % block.n_options);
      std::sort(item.correct_options.begin(), item.correct_options.end());
      item.level = block.level;
      item.topic = kTopics[item.id % 4];
      item.params = {1.0, level_to_b(block.level), guessing_from_structure(block.n_options, block.n_correct),
                     bank.D};
      bank.items.push_back(std::move(item));
    }
  }
  return bank;
}

}  // namespace irtcat
