// irtcat: offline utilities around the adaptive testing engine.
//
//   irtcat simulate exposure --bank B --n N --strategy best|topk|cluster --seed S --out F
//   irtcat simulate tif --bank B --grid -3:3:0.01 --out F
//   irtcat bank validate FILE
//   irtcat bank reference --out F
//   irtcat calibrate --bank B --log L --out F

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "irtcat/bank_store.hpp"
#include "irtcat/calibration.hpp"
#include "irtcat/serialization.hpp"
#include "irtcat/simulator.hpp"

namespace {

using namespace irtcat;

// "-" writes to stdout.
void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

ItemBank load_or_die(const std::string& path) {
  auto loaded = load_bank(path);
  for (const auto& warning : loaded.warnings) std::cerr << describe(warning) << '\n';
  return std::move(loaded.bank);
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream in(spec);
  std::string field;
  while (std::getline(in, field, ':')) {
    std::size_t used = 0;
    parts.push_back(std::stod(field, &used));
    if (used != field.size()) throw std::invalid_argument("bad grid field '" + field + "'");
  }
  if (parts.size() != 3) throw std::invalid_argument("grid must be lo:hi:step");
  return make_grid(parts[0], parts[1], parts[2]);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive testing engine utilities"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiments");
  simulate->require_subcommand(1);

  std::string bank_path;
  std::string out_path = "-";
  int n_examinees = 100;
  std::string strategy_name = "cluster";
  std::uint64_t seed = 1;
  std::size_t k = 10;
  std::string model_name = "coin";
  double p_correct = 0.5;
  double true_theta = 0.0;
  TerminationConfig termination;
  double se_threshold = 0.0;

  auto* exposure = simulate->add_subcommand("exposure", "Item exposure over a simulated population");
  exposure->add_option("--bank", bank_path, "Item bank file")->required()->check(CLI::ExistingFile);
  exposure->add_option("--n", n_examinees, "Number of simulated examinees")->check(CLI::PositiveNumber);
  exposure->add_option("--strategy", strategy_name, "best, topk or cluster")
      ->check(CLI::IsMember({"best", "topk", "cluster"}));
  exposure->add_option("--seed", seed, "Master seed");
  exposure->add_option("--out", out_path, "Output file (- for stdout)");
  exposure->add_option("--k", k, "Randomization pool size")->check(CLI::PositiveNumber);
  exposure->add_option("--model", model_name, "Examinee model: coin or irt")->check(CLI::IsMember({"coin", "irt"}));
  exposure->add_option("--p", p_correct, "Coin model probability of a correct answer")->check(CLI::Range(0.0, 1.0));
  exposure->add_option("--theta", true_theta, "True ability of irt examinees");
  exposure->add_option("--max-items", termination.max_items, "Adaptive item cap");
  exposure->add_option("--min-items", termination.min_items, "Minimum items before the SE rule");
  exposure->add_option("--se-threshold", se_threshold, "Stop once SE falls to this value");
  exposure->add_option("--theta-guard", termination.theta_guard, "Out-of-range bound on theta");

  std::string grid_spec = "-3:3:0.01";
  auto* tif = simulate->add_subcommand("tif", "Test information curve of a bank");
  tif->add_option("--bank", bank_path, "Item bank file")->required()->check(CLI::ExistingFile);
  tif->add_option("--grid", grid_spec, "lo:hi:step");
  tif->add_option("--out", out_path, "Output file (- for stdout)");

  auto* bank_cmd = app.add_subcommand("bank", "Item bank maintenance");
  bank_cmd->require_subcommand(1);
  std::string bank_file;
  auto* validate = bank_cmd->add_subcommand("validate", "Check a bank file");
  validate->add_option("file", bank_file, "Item bank file")->required();
  auto* reference = bank_cmd->add_subcommand("reference", "Write the synthetic 171-item reference bank");
  reference->add_option("--out", out_path, "Output file (- for stdout)");

  std::string log_path;
  auto* calibrate = app.add_subcommand("calibrate", "Estimate item difficulty from a response log");
  calibrate->add_option("--bank", bank_path, "Item bank file")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--log", log_path, "Response log (CSV)")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--out", out_path, "Output file (- for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*exposure) {
      const auto bank = load_or_die(bank_path);
      SelectionStrategy strategy;
      strategy.kind = parse_strategy_kind(strategy_name);
      strategy.k = k;
      if (se_threshold > 0) termination.se_threshold = se_threshold;
      if (auto problem = check_config(termination); !problem.empty()) throw std::invalid_argument(problem);
      const auto model = model_name == "coin" ? ExamineeModel::coin(p_correct) : ExamineeModel::irt(true_theta);
      const auto report = run_exposure_experiment(bank, n_examinees, strategy, model, termination, seed);
      write_output(out_path, to_json(report).dump(2) + "\n");
    } else if (*tif) {
      const auto bank = load_or_die(bank_path);
      std::vector<ItemParameters> params;
      for (const auto& item : bank.items) {
        if (item.active) params.push_back(item.params);
      }
      std::ostringstream out;
      out << std::setprecision(std::numeric_limits<double>::max_digits10) << "theta,information\n";
      for (const auto& [theta, info] : sample_test_information(params, parse_grid(grid_spec))) {
        out << theta << ',' << info << '\n';
      }
      write_output(out_path, out.str());
    } else if (*validate) {
      const auto loaded = load_bank(bank_file);
      for (const auto& warning : loaded.warnings) std::cout << describe(warning) << '\n';
      std::cout << bank_file << ": " << loaded.bank.items.size() << " items, " << loaded.warnings.size()
                << " warnings\n";
    } else if (*reference) {
      write_output(out_path, serialize_bank(make_reference_bank()));
    } else if (*calibrate) {
      const auto bank = load_or_die(bank_path);
      std::ifstream log_in(log_path);
      const auto estimation = estimate_difficulty(first_answers(parse_response_log(log_in)));
      std::map<ItemId, int> levels;
      for (const auto& item : bank.items) levels[item.id] = item.level;
      const json doc{{"estimation", to_json(estimation)},
                     {"comparison", to_json(calibration_report(levels, estimation.estimates))}};
      write_output(out_path, doc.dump(2) + "\n");
    }
  } catch (const BankValidationError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
