#pragma once

// Three-parameter logistic (3PL) item response kernel.
//
// Everything here is a pure function of its arguments. The 1PL and 2PL
// models are parameter restrictions of the 3PL (c = 0, and additionally
// a = 1 for the 1PL), so they need no separate code path.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace irtcat {

inline constexpr double kDefaultScale = 1.7;
inline constexpr double kPracticalThetaMin = -3.0;
inline constexpr double kPracticalThetaMax = 3.0;

/// Discrimination `a`, difficulty `b`, pseudo-guessing `c` and the logistic
/// scale factor `D`.
struct ItemParameters {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double D = kDefaultScale;

  friend bool operator==(const ItemParameters&, const ItemParameters&) = default;
};

/// Returns an empty string when `p` satisfies a > 0, 0 <= c < 1, D > 0 and a
/// finite b; otherwise a description of the first violated constraint.
std::string check_parameters(const ItemParameters& p);

/// True when b lies inside the practical ability range [-3, 3].
bool in_practical_range(const ItemParameters& p);

/// Probability of a correct response, c + (1 - c) / (1 + exp(-D a (theta - b))).
double icc(const ItemParameters& p, double theta);

/// dP/dtheta = D a (P - c)(1 - P) / (1 - c).
double icc_derivative(const ItemParameters& p, double theta);

/// P'^2 / (P (1 - P)).
double item_information(const ItemParameters& p, double theta);

/// Sum of item information; zero for an empty test.
double test_information(std::span<const ItemParameters> items, double theta);

/// 1 / sqrt(i_rr), or nullopt when i_rr == 0. Throws std::invalid_argument
/// for negative (or NaN) input.
std::optional<double> standard_error(double i_rr);

/// Score residual (u - P) P' / (P (1 - P)) of one dichotomous response.
double score_contribution(const ItemParameters& p, int u, double theta);

/// Log-likelihood of a response pattern at theta.
struct Response {
  ItemParameters params;
  int u = 0;
};

double log_likelihood(std::span<const Response> responses, double theta);

struct EstimationOptions {
  double tolerance = 1e-4;
  int max_iterations = 50;
  /// Iterates with |theta| above this bound are declared divergent.
  double divergence_bound = 4.0;
};

struct EstimationResult {
  double theta = 0.0;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;
  std::optional<double> standard_error;
};

/// Iterative maximum-likelihood ability estimate:
///   theta_{n+1} = theta_n + sum S_i(theta_n) / sum I_i(theta_n)
/// starting from `theta0`. Stops when |step| < tolerance (converged), when
/// max_iterations updates were made, or when an iterate leaves
/// [-divergence_bound, divergence_bound] (diverged; theta is clamped to the
/// bound). All-correct and all-incorrect patterns always diverge.
///
/// Throws std::invalid_argument for empty responses, u outside {0, 1} or bad
/// options, and DegenerateInformationError if the information sum vanishes.
EstimationResult estimate_ability(std::span<const Response> responses, double theta0,
                                  const EstimationOptions& options = {});

}  // namespace irtcat
