#include "coinflip/stats.hpp"

#include <algorithm>
#include <cmath>

#include "coinflip/error.hpp"

namespace coinflip::stats {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}
}  // namespace

double chernoff_lower_tail(std::uint64_t n, double p, double delta) {
  require(n >= 1, "chernoff_lower_tail: n must be >= 1");
  require(p >= 0 && p <= 1, "chernoff_lower_tail: p outside [0, 1]");
  require(delta > 0 && delta < 1, "chernoff_lower_tail: delta outside (0, 1)");
  const double mu = static_cast<double>(n) * p;
  return std::exp(-delta * delta * mu / 2);
}

double reverse_markov(double mean, double p) {
  require(mean >= 0 && mean <= 1, "reverse_markov: mean outside [0, 1]");
  require(p >= 0 && p < mean, "reverse_markov: need 0 <= p < mean");
  return (mean - p) / (1 - p);
}

double azuma_bound(double mu, double eta, std::uint64_t steps) {
  require(mu > 0 && mu < 1, "azuma_bound: mu outside (0, 1)");
  require(eta > 0 && eta < 1, "azuma_bound: eta outside (0, 1)");
  return std::exp(-eta * eta * mu * static_cast<double>(steps) / 2);
}

std::uint64_t sample_size(double eps, double confidence) {
  require(eps > 0 && eps < 1, "sample_size: eps outside (0, 1)");
  require(confidence > 0 && confidence < 1, "sample_size: confidence outside (0, 1)");
  const double n = std::log(2 / (1 - confidence)) / (2 * eps * eps);
  auto out = static_cast<std::uint64_t>(std::ceil(n));
  // ceil of a rounded quotient can land one short; step until the bound holds.
  while (2 * std::exp(-2 * static_cast<double>(out) * eps * eps) > 1 - confidence) ++out;
  while (out > 1 && 2 * std::exp(-2 * static_cast<double>(out - 1) * eps * eps) <= 1 - confidence) --out;
  return std::max<std::uint64_t>(out, 1);
}

double hoeffding_halfwidth(std::uint64_t n, double confidence) {
  require(n >= 1, "hoeffding_halfwidth: n must be >= 1");
  require(confidence > 0 && confidence < 1, "hoeffding_halfwidth: confidence outside (0, 1)");
  return std::sqrt(std::log(2 / (1 - confidence)) / (2 * static_cast<double>(n)));
}

double iterated_log2(double x, int k) {
  for (int i = 0; i < k; ++i) x = std::max(1.0, std::log2(std::max(x, 1.0)));
  return x;
}

}  // namespace coinflip::stats
