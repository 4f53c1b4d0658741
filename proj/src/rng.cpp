#include "mnstm/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mnstm {

double Rng::uniform() {
  // 53-bit mantissa, shifted into the open interval.
  const std::uint64_t bits = engine_() >> 11;
  double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  return u;
}

double Rng::normal() {
  // Box-Muller; the sine branch is discarded to keep the stream simple.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

double Rng::exponential() { return -std::log(uniform()); }

double Rng::log_gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("Rng::log_gamma: shape must be positive");
  }
  if (shape < 1.0) {
    const double u = uniform();
    return std::log(gamma(shape + 1.0)) + std::log(u) / shape;
  }
  return std::log(gamma(shape));
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("Rng::gamma: shape must be positive");
  }
  // Marsaglia-Tsang squeeze for shape >= 1; boosted by U^{1/shape} below 1.
  if (shape < 1.0) {
    const double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

}  // namespace mnstm
