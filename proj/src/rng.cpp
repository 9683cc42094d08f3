#include "slim/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace slim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(splitmix64(stream_id)),
                    static_cast<std::uint32_t>(splitmix64(stream_id) >> 32)};
  gen_.seed(seq);
}

double RngStream::uniform() {
  double u;
  do {
    u = std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
  } while (u <= 0.0 || u >= 1.0);
  return u;
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller, cache the second draw
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

double RngStream::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
    throw std::invalid_argument("gamma: shape and rate must be positive and finite");
  double g = std::gamma_distribution<double>(shape, 1.0 / rate)(gen_);
  // draws can underflow to zero when the scale is tiny; keep them positive
  if (g <= 0.0) g = std::numeric_limits<double>::min();
  return g;
}

double RngStream::beta(double a, double b) {
  double x = gamma(a, 1.0);
  double y = gamma(b, 1.0);
  return x / (x + y);
}

double RngStream::exponential(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be positive");
  return -std::log(uniform()) / rate;
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

int RngStream::uniform_int(int n) {
  if (n < 1) throw std::invalid_argument("uniform_int: n must be >= 1");
  return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(gen_));
}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(seed_, splitmix64(stream_id_ ^ splitmix64(id + 1)));
}

}  // namespace slim
