#include "arbor/common/rng.hpp"

#include <cmath>
#include <numbers>

namespace arbor {

std::uint64_t Rng::index(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % n;
}

namespace {

double box_muller(double u1, double u2) {
  // u1 in (0, 1] so the log is finite.
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return box_muller(u1, u2);
}

double hash_normal(std::uint64_t seed, std::uint64_t counter) { return hash_normal_pair(seed, counter).first; }

std::pair<double, double> hash_normal_pair(std::uint64_t seed, std::uint64_t counter) {
  const double u1 = 1.0 - hash_uniform(seed, 2 * counter);
  const double u2 = hash_uniform(seed, 2 * counter + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace arbor
