#include "irtcat/irt.hpp"

#include <cmath>
#include <stdexcept>

#include "irtcat/errors.hpp"

namespace irtcat {

namespace {

// Logistic term L = 1/(1+e^-z) and its complement Q = 1 - L, each computed
// without cancellation so that 1 - P stays accurate when P is close to 1.
struct Logistic {
  double l;
  double q;
};

Logistic logistic(const ItemParameters& p, double theta) {
  const double z = p.D * p.a * (theta - p.b);
  if (z >= 0) {
    const double e = std::exp(-z);
    return {1.0 / (1.0 + e), e / (1.0 + e)};
  }
  const double e = std::exp(z);
  return {e / (1.0 + e), 1.0 / (1.0 + e)};
}

}  // namespace

std::string check_parameters(const ItemParameters& p) {
  if (!(p.a > 0) || !std::isfinite(p.a)) return "discrimination a must be a positive finite number";
  if (!std::isfinite(p.b)) return "difficulty b must be finite";
  if (!(p.c >= 0 && p.c < 1)) return "guessing c must lie in [0, 1)";
  if (!(p.D > 0) || !std::isfinite(p.D)) return "scale D must be a positive finite number";
  return {};
}

bool in_practical_range(const ItemParameters& p) {
  return p.b >= kPracticalThetaMin && p.b <= kPracticalThetaMax;
}

double icc(const ItemParameters& p, double theta) {
  return p.c + (1.0 - p.c) * logistic(p, theta).l;
}

double icc_derivative(const ItemParameters& p, double theta) {
  // (P - c)(1 - P)/(1 - c) = (1 - c) L Q
  const auto [l, q] = logistic(p, theta);
  return p.D * p.a * (1.0 - p.c) * l * q;
}

double item_information(const ItemParameters& p, double theta) {
  // P'^2 / (P (1-P)) with 1 - P = (1-c) Q reduces to D^2 a^2 (1-c) L^2 Q / P.
  const auto [l, q] = logistic(p, theta);
  const double prob = p.c + (1.0 - p.c) * l;
  const double da = p.D * p.a;
  return da * da * (1.0 - p.c) * l * l * q / prob;
}

double test_information(std::span<const ItemParameters> items, double theta) {
  double total = 0.0;
  for (const auto& p : items) total += item_information(p, theta);
  return total;
}

std::optional<double> standard_error(double i_rr) {
  if (!(i_rr >= 0)) throw std::invalid_argument("test information must be nonnegative");
  if (i_rr == 0) return std::nullopt;
  return 1.0 / std::sqrt(i_rr);
}

double score_contribution(const ItemParameters& p, int u, double theta) {
  // P'/(P(1-P)) = D a L / P
  const auto [l, q] = logistic(p, theta);
  const double prob = p.c + (1.0 - p.c) * l;
  const double weight = p.D * p.a * l / prob;
  if (u == 1) return (1.0 - p.c) * q * weight;
  if (u == 0) return -prob * weight;
  throw std::invalid_argument("response must be 0 or 1");
}

double log_likelihood(std::span<const Response> responses, double theta) {
  double total = 0.0;
  for (const auto& r : responses) {
    const auto [l, q] = logistic(r.params, theta);
    total += r.u == 1 ? std::log(r.params.c + (1.0 - r.params.c) * l)
                      : std::log((1.0 - r.params.c) * q);
  }
  return total;
}

EstimationResult estimate_ability(std::span<const Response> responses, double theta0,
                                  const EstimationOptions& options) {
  if (responses.empty()) throw std::invalid_argument("cannot estimate ability from no responses");
  if (!(options.tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  if (options.max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(options.divergence_bound > 0)) throw std::invalid_argument("divergence bound must be positive");
  if (!std::isfinite(theta0)) throw std::invalid_argument("initial theta must be finite");
  for (const auto& r : responses) {
    if (r.u != 0 && r.u != 1) throw std::invalid_argument("response must be 0 or 1");
  }

  EstimationResult result;
  double theta = theta0;
  while (result.iterations < options.max_iterations) {
    double score = 0.0;
    double info = 0.0;
    for (const auto& r : responses) {
      score += score_contribution(r.params, r.u, theta);
      info += item_information(r.params, theta);
    }
    if (!(info > 0)) throw DegenerateInformationError("test information vanished during estimation");

    const double step = score / info;
    theta += step;
    ++result.iterations;

    if (!std::isfinite(theta) || std::abs(theta) > options.divergence_bound) {
      result.diverged = true;
      theta = std::signbit(theta) ? -options.divergence_bound : options.divergence_bound;
      break;
    }
    if (std::abs(step) < options.tolerance) {
      result.converged = true;
      break;
    }
  }

  result.theta = theta;
  double info = 0.0;
  for (const auto& r : responses) info += item_information(r.params, theta);
  result.standard_error = standard_error(info);
  return result;
}

}  // namespace irtcat
