#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "slim/distributions.hpp"
#include "slim/rng.hpp"

using namespace slim;

namespace {

// Kolmogorov-Smirnov distance of a sample against a closed-form cdf.
double ks_distance(std::vector<double> x, double (*cdf)(double)) {
  std::sort(x.begin(), x.end());
  double d = 0.0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

double laplace_cdf(double x) {
  // unit rate: density 0.5 exp(-|x|)
  return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
}

double cauchy_cdf(double x) { return 0.5 + std::atan(x) / M_PI; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool same_c = true, same_d = true;
  for (int i = 0; i < 100; ++i) {
    double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u > 0.0);
    CHECK(u < 1.0);
    same_c = same_c && u == c.uniform();
    same_d = same_d && u == d.uniform();
  }
  CHECK_FALSE(same_c);
  CHECK_FALSE(same_d);

  RngStream s1 = a.substream(1), s1b = b.substream(1), s2 = a.substream(2);
  bool same = true;
  for (int i = 0; i < 100; ++i) {
    double u = s1.uniform();
    CHECK(u == s1b.uniform());
    same = same && u == s2.uniform();
  }
  CHECK_FALSE(same);
}

TEST_CASE("basic draw moments") {
  RngStream rng(1);
  const int N = 200000;
  double sn = 0, sn2 = 0, sg = 0, sg2 = 0, sb = 0, se = 0;
  for (int i = 0; i < N; ++i) {
    double z = rng.normal();
    sn += z;
    sn2 += z * z;
    double g = rng.gamma(3.0, 2.0);
    sg += g;
    sg2 += g * g;
    sb += rng.beta(2.0, 5.0);
    se += rng.exponential(4.0);
  }
  CHECK(std::abs(sn / N) < 0.01);
  CHECK(std::abs(sn2 / N - 1.0) < 0.02);
  CHECK(std::abs(sg / N - 1.5) < 0.02);                      // shape/rate
  CHECK(std::abs(sg2 / N - sg / N * sg / N - 0.75) < 0.03);  // shape/rate^2
  CHECK(std::abs(sb / N - 2.0 / 7.0) < 0.01);
  CHECK(std::abs(se / N - 0.25) < 0.01);
}

TEST_CASE("gamma rejects bad parameters and never returns zero") {
  RngStream rng(2);
  CHECK_THROWS(rng.gamma(0.0, 1.0));
  CHECK_THROWS(rng.gamma(1.0, 0.0));
  CHECK_THROWS(rng.gamma(-1.0, 1.0));
  CHECK_THROWS(rng.gamma(1.0, std::numeric_limits<double>::infinity()));
  CHECK_THROWS(rng.gamma(std::nan(""), 1.0));
  for (int i = 0; i < 1000; ++i) CHECK(rng.gamma(0.01, 1e12) > 0.0);
}

TEST_CASE("bernoulli and uniform_int") {
  RngStream rng(3);
  int ones = 0;
  for (int i = 0; i < 100000; ++i) ones += rng.bernoulli(0.3);
  CHECK(std::abs(ones / 100000.0 - 0.3) < 0.01);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    int k = rng.uniform_int(5);
    REQUIRE(k >= 0);
    REQUIRE(k < 5);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c / 50000.0 - 0.2) < 0.01);
  CHECK(rng.uniform_int(1) == 0);
}

TEST_CASE("inverse gaussian moments") {
  RngStream rng(4);
  const double mu = 1.7, lam = 3.1;
  const int N = 400000;
  double s = 0, s2 = 0;
  for (int i = 0; i < N; ++i) {
    double x = sample_inverse_gaussian(mu, lam, rng);
    CHECK(x > 0.0);
    s += x;
    s2 += x * x;
  }
  double mean = s / N, var = s2 / N - mean * mean;
  CHECK(std::abs(mean - mu) < 0.01);
  CHECK(std::abs(var - mu * mu * mu / lam) < 0.05);
  CHECK_THROWS(sample_inverse_gaussian(-1.0, 1.0, rng));
}

TEST_CASE("heavy-tailed draws match their closed-form cdfs") {
  RngStream rng(5);
  const int N = 100000;
  std::vector<double> lap(N), cau(N);
  for (int i = 0; i < N; ++i) {
    lap[i] = sample_heavy_tailed(SignalKind::laplace(1.0), rng);
    cau[i] = sample_heavy_tailed(SignalKind::cauchy(), rng);
  }
  CHECK(ks_distance(lap, laplace_cdf) < 0.01);
  CHECK(ks_distance(cau, cauchy_cdf) < 0.01);
}

TEST_CASE("laplace rate scales the draw") {
  RngStream rng(6);
  const int N = 200000;
  double s = 0;
  for (int i = 0; i < N; ++i) s += std::abs(sample_heavy_tailed(SignalKind::laplace(2.5), rng));
  CHECK(std::abs(s / N - 1.0 / 2.5) < 0.01);  // E|x| = 1/lambda
}

TEST_CASE("conditional mixing scales match their inverse laws") {
  RngStream rng(7);
  const int N = 200000;
  SignalKind lap = SignalKind::laplace(1.4);
  SignalKind st = SignalKind::student_t(3.0, 1.0);
  const double z = 0.8;
  double s_lap = 0, s_st = 0;
  for (int i = 0; i < N; ++i) {
    s_lap += 1.0 / draw_conditional_mixing_scale(lap, z, rng);
    s_st += 1.0 / draw_conditional_mixing_scale(st, z, rng);
  }
  // Laplace: 1/ups ~ IG(lambda/|z|, lambda^2), mean lambda/|z|
  CHECK(std::abs(s_lap / N - lap.lambda / z) < 0.02);
  // Student-t: 1/ups ~ Gamma((theta+1)/2, theta/2 + z^2/2)
  double mean = (st.theta + 1.0) / 2.0 / (st.theta / 2.0 + z * z / 2.0);
  CHECK(std::abs(s_st / N - mean) < 0.02);
  // degenerate z stays finite via the clamps
  double u = draw_conditional_mixing_scale(lap, 0.0, rng);
  CHECK(u >= 1e-12);
  CHECK(u <= 1e12);
}

TEST_CASE("prior mixing scale means") {
  RngStream rng(8);
  const int N = 200000;
  double s = 0;
  SignalKind lap = SignalKind::laplace(2.0);
  for (int i = 0; i < N; ++i) s += draw_prior_mixing_scale(lap, rng);
  CHECK(std::abs(s / N - 0.5) < 0.01);  // Exponential(rate lambda^2 / 2)
  SignalKind st = SignalKind::student_t(4.0);
  s = 0;
  for (int i = 0; i < N; ++i) s += draw_prior_mixing_scale(st, rng);
  CHECK(std::abs(s / N - 2.0) < 0.05);  // InvGamma(2, 2) mean = 2
}

TEST_CASE("generalized gaussian is unit variance and recovers the gaussian") {
  RngStream rng(9);
  const int N = 100000;
  for (double shape : {0.5, 1.0, 1.5, 2.0}) {
    double s = 0, s2 = 0;
    for (int i = 0; i < N; ++i) {
      double x = sample_generalized_gaussian(shape, rng);
      s += x;
      s2 += x * x;
    }
    CHECK(std::abs(s / N) < 0.05);
    CHECK(std::abs(s2 / N - 1.0) < 0.05);
  }
  std::vector<double> g(N);
  for (int i = 0; i < N; ++i) g[i] = sample_generalized_gaussian(2.0, rng);
  CHECK(ks_distance(g, normal_cdf) < 0.01);
  CHECK_THROWS(sample_generalized_gaussian(0.4, rng));
  CHECK_THROWS(sample_generalized_gaussian(2.1, rng));
}

TEST_CASE("random gg shapes avoid the gaussian neighborhood") {
  RngStream rng(10);
  bool low = false, high = false;
  for (int i = 0; i < 5000; ++i) {
    double s = random_gg_shape(rng);
    CHECK(((s >= 0.5 && s <= 0.8) || (s >= 1.2 && s < 2.0)));
    low = low || s <= 0.8;
    high = high || s >= 1.2;
  }
  CHECK(low);
  CHECK(high);
}

TEST_CASE("gaussian log densities agree across implementations") {
  RngStream rng(11);
  const int d = 5;
  Eigen::VectorXd x(d), mean(d), var(d);
  for (int i = 0; i < d; ++i) {
    x[i] = rng.normal();
    mean[i] = rng.normal();
    var[i] = 0.5 + rng.uniform();
  }
  Eigen::MatrixXd cov = var.asDiagonal();
  CHECK(log_gaussian_diag(x, mean, var) ==
        doctest::Approx(log_gaussian_full(x, mean, cov)).epsilon(1e-10));

  // dense case against an explicit inverse
  Eigen::MatrixXd A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) A(i, j) = rng.normal();
  Eigen::MatrixXd S = A * A.transpose() + Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd r = x - mean;
  double direct = -0.5 * d * std::log(2.0 * M_PI) - 0.5 * std::log(S.determinant()) -
                  0.5 * r.dot(S.inverse() * r);
  CHECK(log_gaussian_full(x, mean, S) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("cholesky jitter rescues a semidefinite matrix") {
  Eigen::MatrixXd S(2, 2);
  S << 1.0, 1.0, 1.0, 1.0;  // rank one
  auto llt = cholesky_with_jitter(S);
  CHECK(llt.info() == Eigen::Success);
  Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS(cholesky_with_jitter(neg));
}
