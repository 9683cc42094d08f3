#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "slim/distributions.hpp"
#include "slim/model_comparison.hpp"

using namespace slim;

TEST_CASE("log_sum_exp is stable and exact on known inputs") {
  CHECK(log_sum_exp({0.0}) == doctest::Approx(0.0));
  CHECK(log_sum_exp({std::log(2.0), std::log(3.0)}) == doctest::Approx(std::log(5.0)));
  CHECK(log_sum_exp({1000.0, 1000.0}) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(log_sum_exp({-1e9, 0.0}) == doctest::Approx(0.0));
  CHECK_THROWS(log_sum_exp({}));
}

TEST_CASE("predictive density collapses to the exact Gaussian when loadings vanish") {
  // with C = 0 every mixture component has Sigma = Psi, so the log-sum-exp
  // average equals the diagonal Gaussian exactly
  RngStream gen(3), rng(5);
  const int d = 3, N = 20;
  Dataset test;
  test.values.resize(d, N);
  for (int i = 0; i < d; ++i)
    for (int n = 0; n < N; ++n) test.values(i, n) = gen.normal();
  test.names = {"a", "b", "c"};
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(d, 2);
  Eigen::VectorXd psi(d);
  psi << 0.5, 1.0, 2.0;
  Hyperparameters hp;
  hp.n_rep = 7;
  std::vector<SignalKind> kinds(2, SignalKind::laplace(1.0));
  double got = predictive_log_density(test, C, psi, kinds, hp, rng);
  double want = 0.0;
  for (int n = 0; n < N; ++n)
    for (int i = 0; i < d; ++i)
      want += -0.5 * std::log(2.0 * M_PI * psi[i]) -
              0.5 * test.values(i, n) * test.values(i, n) / psi[i];
  CHECK(got == doctest::Approx(want).epsilon(1e-10));
  CHECK_THROWS(predictive_log_density(test, C, psi, {SignalKind::laplace(1.0)}, hp, rng));
}

TEST_CASE("predictive density approaches the scale-mixture marginal") {
  // d = 1, C = 1, psi small: the predictive approximates the unit-variance
  // Laplace marginal; check against the closed-form density at a few points
  RngStream rng(11);
  Dataset test;
  test.values.resize(1, 1);
  test.names = {"x"};
  Eigen::MatrixXd C = Eigen::MatrixXd::Ones(1, 1);
  Eigen::VectorXd psi = Eigen::VectorXd::Constant(1, 1e-6);
  Hyperparameters hp;
  hp.n_rep = 20000;
  double lam = std::sqrt(2.0);
  std::vector<SignalKind> kinds{SignalKind::laplace(lam)};
  for (double x : {0.5, 1.0, 2.0}) {
    test.values(0, 0) = x;
    double got = predictive_log_density(test, C, psi, kinds, hp, rng);
    double want = std::log(0.5 * lam) - lam * std::abs(x);
    CHECK(got == doctest::Approx(want).epsilon(0.05));
  }
}

TEST_CASE("DAG predictive density reduces to the regression Gaussian") {
  RngStream gen(7), rng(9);
  const int d = 2, N = 15;
  Dataset test;
  test.values.resize(d, N);
  for (int i = 0; i < d; ++i)
    for (int n = 0; n < N; ++n) test.values(i, n) = gen.normal();
  test.names = {"a", "b"};
  DagSample draw;
  draw.B = Eigen::MatrixXd::Zero(d, d);
  draw.B(1, 0) = 1.5;
  draw.c_d = Eigen::VectorXd::Zero(d);  // no signal variance: Sigma = Psi
  draw.C_l = Eigen::MatrixXd(d, 0);
  draw.psi = Eigen::VectorXd::Constant(d, 0.7);
  draw.lambda = Eigen::VectorXd::Ones(d);
  Hyperparameters hp;
  hp.n_rep = 5;
  double got = predictive_log_density_dag(test, draw, hp, rng);
  double want = 0.0;
  for (int n = 0; n < N; ++n) {
    Eigen::VectorXd r = test.values.col(n) - draw.B * test.values.col(n);
    for (int i = 0; i < d; ++i)
      want += -0.5 * std::log(2.0 * M_PI * 0.7) - 0.5 * r[i] * r[i] / 0.7;
  }
  CHECK(got == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("missing-value likelihood equals the direct per-entry evaluation") {
  RngStream gen(13);
  const int d = 3, K = 2, N = 25;
  Dataset data;
  data.values.resize(d, N);
  for (int i = 0; i < d; ++i)
    for (int n = 0; n < N; ++n) data.values(i, n) = gen.normal();
  data.names = {"a", "b", "c"};
  Eigen::MatrixXd C(d, K), Z(K, N);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < K; ++j) C(i, j) = gen.normal();
  for (int j = 0; j < K; ++j)
    for (int n = 0; n < N; ++n) Z(j, n) = gen.normal();
  Eigen::VectorXd psi(d);
  psi << 0.3, 1.0, 2.5;
  data.mask = Eigen::MatrixXd::Ones(d, N);
  for (int i = 0; i < d; ++i)
    for (int n = 0; n < N; ++n)
      if (gen.bernoulli(0.3)) (*data.mask)(i, n) = 0.0;

  Eigen::MatrixXd M = C * Z;
  double want = 0.0;
  for (int i = 0; i < d; ++i)
    for (int n = 0; n < N; ++n)
      if ((*data.mask)(i, n) == 0.0) {
        double r = data.values(i, n) - M(i, n);
        want += -0.5 * std::log(2.0 * M_PI * psi[i]) - 0.5 * r * r / psi[i];
      }
  CHECK(missing_value_log_density(data, C, Z, psi) == doctest::Approx(want).epsilon(1e-12));

  data.mask = Eigen::MatrixXd::Ones(d, N);
  CHECK(missing_value_log_density(data, C, Z, psi) == 0.0);  // nothing held out
  data.mask.reset();
  CHECK_THROWS(missing_value_log_density(data, C, Z, psi));
}

TEST_CASE("model comparison selects by median and pairs the ratio per sweep") {
  std::vector<double> fm{1.0, 2.0, 3.0};
  std::vector<double> dag{4.0, 2.5, 6.0};
  ComparisonReport rep = compare_models({{"fm", fm}, {"dag", dag}});
  CHECK(rep.selected == "dag");
  CHECK(rep.selected_index == 1);
  CHECK(!rep.tie);
  CHECK(rep.medians[0] == 2.0);
  CHECK(rep.medians[1] == 4.0);
  CHECK(rep.ratio_median == doctest::Approx(2.0));
  REQUIRE(rep.ratio_samples.size() == 3);
  CHECK(rep.ratio_samples[0] == doctest::Approx(3.0));
  CHECK(rep.ratio_samples[1] == doctest::Approx(0.5));
  CHECK(rep.ratio_samples[2] == doctest::Approx(3.0));

  // mismatched lengths fall back to the difference of medians
  ComparisonReport rep2 = compare_models({{"fm", {1.0, 3.0}}, {"dag", {2.0}}});
  REQUIRE(rep2.ratio_samples.size() == 1);
  CHECK(rep2.ratio_samples[0] == doctest::Approx(0.0));

  // ties select the first label
  ComparisonReport rep3 = compare_models({{"fm", {5.0}}, {"dag", {5.0}}});
  CHECK(rep3.selected == "fm");
  CHECK(rep3.tie);

  CHECK_THROWS(compare_models({{"fm", fm}}));
  CHECK_THROWS(compare_models({{"fm", fm}, {"dag", {}}}));
}
