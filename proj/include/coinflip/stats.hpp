#pragma once

#include <cstdint>

namespace coinflip::stats {

// Pr[X <= (1 - delta) mu] <= exp(-delta^2 mu / 2) for X ~ Bin(n, p), mu = n p.
// Requires n >= 1, p in [0, 1], delta in (0, 1).
double chernoff_lower_tail(std::uint64_t n, double p, double delta);

// For X in [0, 1] and 0 <= p < E[X]: Pr[X > p] >= (E[X] - p) / (1 - p).
double reverse_markov(double mean, double p);

// Submartingale with increments in [0, 1] and conditional mean >= mu:
// Pr[Z_steps < (1 - eta) steps mu] < exp(-eta^2 mu steps / 2).
double azuma_bound(double mu, double eta, std::uint64_t steps);

// Smallest n with 2 exp(-2 n eps^2) <= 1 - confidence.
std::uint64_t sample_size(double eps, double confidence);

// Two-sided Hoeffding half-width for n Bernoulli trials at the given confidence:
// sqrt(ln(2 / (1 - confidence)) / (2 n)).
double hoeffding_halfwidth(std::uint64_t n, double confidence);

inline constexpr double kDefaultConfidence = 1.0 - 1e-6;

// log2 applied k times, each intermediate value floored at 1.
double iterated_log2(double x, int k);

}  // namespace coinflip::stats
