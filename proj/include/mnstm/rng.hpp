#pragma once

#include <cstdint>
#include <random>

namespace mnstm {

// Deterministic random source. All distributions are implemented locally on
// top of mt19937_64 so that a given seed reproduces the same stream
// regardless of standard-library internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0, 1), never returning 0 or 1.
  double uniform();

  double normal();

  // Gamma(shape, scale 1), shape > 0.
  double gamma(double shape);

  // log of a Gamma(shape, 1) draw; stays finite for arbitrarily small
  // shapes where the draw itself would underflow.
  double log_gamma(double shape);

  double exponential();

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mnstm
