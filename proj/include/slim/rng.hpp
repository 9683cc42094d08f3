#pragma once

#include <cstdint>
#include <random>

namespace slim {

// Deterministic random stream. Identical (seed, stream_id) pairs yield
// bitwise-identical draw sequences, which is what the chain reproducibility
// contract relies on. One stream per chain; substreams for workers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  double uniform();  // (0, 1)
  double normal();   // N(0, 1)
  double gamma(double shape, double rate);
  double beta(double a, double b);
  double exponential(double rate);
  bool bernoulli(double p);
  int uniform_int(int n);  // uniform over {0, ..., n-1}, n >= 1

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // Independent stream derived from this one's identity.
  RngStream substream(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace slim
