#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>

#include "biostate/gmm.hpp"
#include "biostate/seedgen.hpp"
#include "oracles.hpp"

using namespace biostate;

TEST_CASE("M=1 reduces to the closed form: column means, floored variances") {
  const auto z = oracles::random_matrix(25, 3, 6);
  GmmConfig config;
  config.components = 1;
  const auto model = fit_gmm(z, config);
  REQUIRE(model.weights.size() == 1);
  CHECK(model.weights[0] == Approx(1.0).margin(1e-12));
  const auto mu = column_means(z);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(model.means(0, j) == Approx(mu[j]).margin(1e-9));
    double var = 0.0;
    for (std::size_t i = 0; i < z.rows; ++i)
      var += (z(i, j) - mu[j]) * (z(i, j) - mu[j]);
    var /= static_cast<double>(z.rows);
    CHECK(model.variances(0, j) == Approx(std::max(var, 0.1)).margin(1e-9));
  }
  CHECK(model.converged);
}

TEST_CASE("the reg_covar floor engages on tighter-than-reg data") {
  Matrix z(10, 1);
  Rng rng(4);
  for (double& v : z.data) v = 0.01 * rng.next_normal();  // variance ~1e-4 << 0.1
  GmmConfig config;
  config.components = 1;
  const auto model = fit_gmm(z, config);
  CHECK(model.variances(0, 0) == 0.1);
}

TEST_CASE("too few observations for the requested mixture") {
  const auto z = oracles::random_matrix(3, 2, 1);
  GmmConfig config;
  config.components = 4;
  CHECK_THROWS_MATCHES(fit_gmm(z, config), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::TooFewObservations;
                       }));
}

TEST_CASE("density of the standard normal at its peak") {
  GmmModel model;
  model.weights = {1.0};
  model.means = Matrix(1, 1);
  model.variances = Matrix(1, 1, 1.0);
  const std::vector<double> x{0.0};
  CHECK(model.density(x) == Approx(0.3989422804014327).margin(1e-12));
  CHECK(model.density(x) == Approx(0.39894).margin(5e-6));
  const std::vector<double> bad{0.0, 0.0};
  CHECK_THROWS_MATCHES(model.density(bad), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::ShapeMismatch;
                       }));
}

TEST_CASE("symmetric two-component density at the midpoint") {
  const double a = 1.7;
  GmmModel sym;
  sym.weights = {0.5, 0.5};
  sym.means = Matrix(2, 1);
  sym.means(0, 0) = -a;
  sym.means(1, 0) = a;
  sym.variances = Matrix(2, 1, 0.8);

  GmmModel single;
  single.weights = {1.0};
  single.means = Matrix(1, 1, a);
  single.variances = Matrix(1, 1, 0.8);

  const std::vector<double> origin{0.0};
  CHECK(sym.density(origin) == Approx(single.density(origin)).margin(1e-15));
}

TEST_CASE("1-D densities integrate to one") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(seed + 70);
    const std::size_t m = 1 + rng.next_index(4);
    GmmModel model;
    model.means = Matrix(m, 1);
    model.variances = Matrix(m, 1);
    double total = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      model.weights.push_back(0.1 + rng.next_double());
      total += model.weights.back();
      model.means(c, 0) = rng.next_double() * 10.0 - 5.0;
      model.variances(c, 0) = 0.1 + rng.next_double() * 3.0;
    }
    for (double& w : model.weights) w /= total;
    const double mass = oracles::simpson(
        [&](double x) {
          const std::vector<double> point{x};
          return model.density(point);
        },
        -20.0, 20.0, 4000);
    CHECK(mass == Approx(1.0).margin(1e-3));
  }
}

TEST_CASE("EM log-likelihood trace is nondecreasing") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    GmmConfig config;
    config.components = 1 + rng.next_index(5);
    config.seed = seed;
    const auto z = oracles::random_matrix(10 + rng.next_index(30), 1 + rng.next_index(4), seed + 50);
    if (z.rows < config.components) continue;
    std::vector<double> trace;
    fit_gmm(z, config, &trace);
    REQUIRE(!trace.empty());
    for (std::size_t t = 1; t < trace.size(); ++t)
      CHECK(trace[t] >= trace[t - 1] - 1e-9);
  }
}

TEST_CASE("weights stay on the simplex and variances keep the floor") {
  const auto z = oracles::random_matrix(40, 3, 12);
  GmmConfig config;
  config.components = 3;
  config.seed = 4;
  const auto model = fit_gmm(z, config);
  double sum = 0.0;
  for (double w : model.weights) {
    CHECK(w >= 0.0);
    sum += w;
  }
  CHECK(sum == Approx(1.0).margin(1e-9));
  for (double v : model.variances.data) CHECK(v >= config.reg_covar - 1e-12);
}

TEST_CASE("planted 1-D mixture is recovered") {
  Rng rng(1234);
  const double mean0 = 0.0, mean1 = 6.0;  // 6 sigma apart at unit variance
  const double w0 = 0.4;
  Matrix z(1000, 1);
  for (std::size_t i = 0; i < z.rows; ++i) {
    const bool first = rng.next_double() < w0;
    z(i, 0) = (first ? mean0 : mean1) + rng.next_normal();
  }
  GmmConfig config;
  config.components = 2;
  config.seed = 7;
  const auto model = fit_gmm(z, config);
  std::size_t lo = model.means(0, 0) < model.means(1, 0) ? 0 : 1;
  CHECK(std::abs(model.means(lo, 0) - mean0) < 0.1);
  CHECK(std::abs(model.means(1 - lo, 0) - mean1) < 0.1);
  CHECK(std::abs(model.weights[lo] - w0) < 0.05);
}

TEST_CASE("sampling is deterministic and labeled") {
  GmmModel model;
  model.weights = {0.3, 0.7};
  model.means = Matrix(2, 2);
  model.means(1, 0) = 4.0;
  model.variances = Matrix(2, 2, 0.5);
  const auto a = sample_gmm(model, 50, 99);
  const auto b = sample_gmm(model, 50, 99);
  CHECK(a.rows == b.rows);
  CHECK(a.components == b.components);
  for (std::size_t l : a.components) CHECK(l < 2);

  const auto single = sample_gmm(model, 1, 3);
  CHECK(single.rows.rows == 1);
  CHECK(single.components.size() == 1);
}

TEST_CASE("sample mean obeys the CLT envelope at the variance floor") {
  GmmModel model;
  model.weights = {1.0};
  model.means = Matrix(1, 2);
  model.means(0, 0) = 1.5;
  model.means(0, 1) = -2.0;
  model.variances = Matrix(1, 2, 0.1);  // reg floor only
  const std::size_t count = 20000;
  const auto sample = sample_gmm(model, count, 5);
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < count; ++i) mean += sample.rows(i, j);
    mean /= static_cast<double>(count);
    const double bound = 3.0 * std::sqrt(0.1) / std::sqrt(static_cast<double>(count));
    CHECK(std::abs(mean - model.means(0, j)) <= bound);
  }
}

TEST_CASE("M=5 on the 15x32 synthetic seed converges without singular covariances") {
  const auto seed = generate_seed(SeedSpec::default_spec(0));
  GmmConfig config;  // M=5, reg_covar=0.1
  const auto model = fit_gmm(seed.panel, config);
  CHECK(model.converged);
  for (double v : model.variances.data) {
    CHECK(v >= 0.1);
    CHECK(std::isfinite(v));
  }
  const auto sample = sample_gmm(model, 275, 1);
  CHECK(sample.rows.rows == 275);
}

TEST_CASE("caller-provided init labels are honored and validated") {
  const auto z = oracles::random_matrix(12, 2, 44);
  GmmConfig config;
  config.components = 2;
  std::vector<std::size_t> labels(12);
  for (std::size_t i = 0; i < 12; ++i) labels[i] = i % 2;
  const auto model = fit_gmm(z, config, nullptr, labels);
  CHECK(model.weights[0] == Approx(0.5).margin(0.25));

  std::vector<std::size_t> short_labels(5, 0);
  CHECK_THROWS_MATCHES(fit_gmm(z, config, nullptr, short_labels), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::ShapeMismatch;
                       }));
  std::vector<std::size_t> one_sided(12, 0);
  CHECK_THROWS_MATCHES(fit_gmm(z, config, nullptr, one_sided), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::BadArgument;
                       }));
}

TEST_CASE("ratio gate thresholds") {
  CHECK(check_ratio(15, 32) == RatioCheck::Insufficient);
  CHECK(check_ratio(290, 32) == RatioCheck::Ok5to1);
  CHECK(check_ratio(320, 32) == RatioCheck::Ok10to1);
  CHECK(check_ratio(159, 32) == RatioCheck::Insufficient);
  CHECK(check_ratio(160, 32) == RatioCheck::Ok5to1);
}

TEST_CASE("augment_cohort appends synthetic rows with provenance") {
  const auto seed_panel = oracles::panel_from(oracles::random_matrix(15, 4, 3));
  GmmConfig config;
  config.components = 5;
  config.seed = 0;
  const auto model = fit_gmm(seed_panel, config);
  const auto cohort = augment_cohort(seed_panel, model, 275, 1);
  CHECK(cohort.panel.subject_count() == 290);
  CHECK(cohort.provenance.size() == 290);
  CHECK(std::count(cohort.provenance.begin(), cohort.provenance.end(), "seed") == 15);
  CHECK(std::count(cohort.provenance.begin(), cohort.provenance.end(), "synthetic") == 275);
  CHECK(cohort.panel.subjects[15] == "syn_001");
  for (std::size_t c : cohort.component) CHECK(c < 5);
}
