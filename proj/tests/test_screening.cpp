#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "biostate/screening.hpp"
#include "oracles.hpp"

using namespace biostate;

TEST_CASE("euclidean distance basics") {
  const std::vector<double> origin2{0, 0}, p{3, 4};
  CHECK(euclidean_distance(origin2, p) == 5.0);
  CHECK(euclidean_distance(p, p) == 0.0);
  const std::vector<double> ones{1, 1, 1, 1}, zeros{0, 0, 0, 0};
  CHECK(euclidean_distance(ones, zeros) == 2.0);
  CHECK_THROWS_MATCHES(euclidean_distance(origin2, zeros), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::ShapeMismatch;
                       }));
}

TEST_CASE("euclidean distance is a metric on random triples") {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(5), b(5), c(5);
    for (int j = 0; j < 5; ++j) {
      a[j] = rng.next_double() * 10 - 5;
      b[j] = rng.next_double() * 10 - 5;
      c[j] = rng.next_double() * 10 - 5;
    }
    const double ab = euclidean_distance(a, b);
    const double ba = euclidean_distance(b, a);
    const double ac = euclidean_distance(a, c);
    const double cb = euclidean_distance(c, b);
    CHECK(std::abs(ab - ba) < 1e-9);
    CHECK(ab >= 0.0);
    CHECK(ab <= ac + cb + 1e-9);
  }
  const std::vector<double> x{1.5, -2.0};
  CHECK(euclidean_distance(x, x) == 0.0);
}

TEST_CASE("a single extreme z entry is flagged at threshold 25") {
  Matrix z(23, 4);
  z(0, 1) = 30.0;  // everyone else at the origin
  const auto panel = oracles::panel_from(z);
  const auto report = screen(panel, 25.0);
  REQUIRE(report.flagged.size() == 1);
  CHECK(report.flagged[0] == panel.subjects[0]);
  CHECK(report.retained.size() == 22);
  // centroid pull: the outlier sits at 30 * 22/23 from the global centroid
  CHECK(report.distances[0] == Approx(30.0 * 22.0 / 23.0).margin(1e-9));
}

TEST_CASE("all-zero panel flags nobody") {
  const auto panel = oracles::panel_from(Matrix(6, 3));
  const auto report = screen(panel, 25.0);
  CHECK(report.flagged.empty());
  CHECK(report.retained.size() == 6);
  for (double d : report.distances) CHECK(d == 0.0);
}

TEST_CASE("two-subject 1-D panel at +-1 both flagged at threshold 0.5") {
  Matrix z(2, 1);
  z(0, 0) = -1.0;
  z(1, 0) = 1.0;
  const auto report = screen(oracles::panel_from(z), 0.5);
  CHECK(report.flagged.size() == 2);
  CHECK(report.distances[0] == Approx(1.0));
  CHECK(report.distances[1] == Approx(1.0));
}

TEST_CASE("screen is monotone in the threshold") {
  const auto z = oracles::random_matrix(30, 6, 21, 4.0);
  const auto panel = oracles::panel_from(z);
  std::size_t previous = panel.subject_count() + 1;
  for (double threshold : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const auto report = screen(panel, threshold);
    CHECK(report.flagged.size() <= previous);
    previous = report.flagged.size();
    for (const auto& id : report.flagged) {
      for (std::size_t i = 0; i < panel.subjects.size(); ++i)
        if (panel.subjects[i] == id) CHECK(report.distances[i] > threshold);
    }
  }
}

TEST_CASE("distances are invariant under column permutation") {
  const auto z = oracles::random_matrix(12, 5, 77);
  Matrix permuted(z.rows, z.cols);
  const std::size_t perm[5] = {3, 0, 4, 1, 2};
  for (std::size_t i = 0; i < z.rows; ++i)
    for (std::size_t j = 0; j < z.cols; ++j) permuted(i, perm[j]) = z(i, j);
  const auto r1 = screen(oracles::panel_from(z), 1.0);
  const auto r2 = screen(oracles::panel_from(permuted), 1.0);
  for (std::size_t i = 0; i < r1.distances.size(); ++i)
    CHECK(r1.distances[i] == Approx(r2.distances[i]).margin(1e-9));
}

TEST_CASE("exclude keeps order, params, and errors on stale reports") {
  Matrix z(5, 2);
  z(2, 0) = 40.0;
  const auto panel = oracles::panel_from(z);
  const auto report = screen(panel, 25.0);
  const auto kept = exclude(panel, report);
  REQUIRE(kept.subject_count() == 4);
  CHECK(kept.subjects == std::vector<std::string>{"s1", "s2", "s4", "s5"});
  CHECK(kept.params == panel.params);

  const auto no_flags = screen(oracles::panel_from(Matrix(3, 2)), 25.0);
  const auto other = oracles::panel_from(Matrix(3, 2));
  CHECK(exclude(other, no_flags).subjects == other.subjects);

  CHECK_THROWS_MATCHES(exclude(panel, no_flags), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::StaleReport;
                       }));
}

TEST_CASE("a 22-subject panel with two extreme subjects retains 20") {
  Matrix z(22, 6);
  Rng rng(6);
  for (double& v : z.data) v = rng.next_normal();
  for (std::size_t j = 0; j < 6; ++j) {
    z(4, j) = 18.0;   // ~44 units out
    z(11, j) = -15.0; // ~37 units out
  }
  const auto panel = oracles::panel_from(z);
  const auto report = screen(panel, 25.0);
  REQUIRE(report.flagged.size() == 2);
  const auto kept = exclude(panel, report);
  CHECK(kept.subject_count() == 20);
}

TEST_CASE("excluding everyone surfaces EmptyPanel downstream") {
  Matrix z(3, 1);
  z(0, 0) = -50.0;
  z(1, 0) = 0.0;
  z(2, 0) = 50.0;
  const auto panel = oracles::panel_from(z);
  const auto report = screen(panel, 5.0);
  REQUIRE(report.retained.size() < 2);
  const auto kept = exclude(panel, report);
  CHECK_THROWS_MATCHES(ward_linkage(kept), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::EmptyPanel;
                       }));
}
