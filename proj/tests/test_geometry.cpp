#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geostat/errors.hpp"
#include "geostat/geometry.hpp"

using namespace geostat;

TEST_CASE("euclidean distance examples") {
  CHECK(euclidean_distance({0, 0}, {0, 0}) == 0.0);
  CHECK(euclidean_distance({0, 0}, {3, 4}) == 5.0);
  CHECK(euclidean_distance({0.1, 0.2}, {0.4, 0.6}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("haversine examples") {
  CHECK(haversine_gcd({10, 20}, {10, 20}, 6371.0) == 0.0);
  CHECK(haversine_gcd({0, 0}, {180, 0}, 1.0) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  const double quarter = std::numbers::pi * 6371.0 / 2.0;  // 10007.543...
  CHECK(haversine_gcd({0, 0}, {90, 0}, 6371.0) == doctest::Approx(quarter).epsilon(1e-14));
  CHECK(quarter == doctest::Approx(10007.543398).epsilon(1e-9));
}

TEST_CASE("haversine rejects out-of-range coordinates") {
  CHECK_THROWS_AS(haversine_gcd({181, 0}, {0, 0}, 1.0), DomainError);
  CHECK_THROWS_AS(haversine_gcd({0, 0}, {0, -90.5}, 1.0), DomainError);
  CHECK_THROWS_AS(haversine_gcd({0, 0}, {0, 0}, 0.0), DomainError);
}

TEST_CASE("metric properties on random pairs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lon(-180, 180), lat(-90, 90);
  for (int i = 0; i < 2000; ++i) {
    const Location a{lon(rng), lat(rng)}, b{lon(rng), lat(rng)};
    const double g = haversine_gcd(a, b, 2.5);
    CHECK(g >= 0.0);
    CHECK(g <= std::numbers::pi * 2.5 + 1e-12);
    CHECK(g == haversine_gcd(b, a, 2.5));
    CHECK(haversine_gcd(a, a, 2.5) == 0.0);
    CHECK(euclidean_distance(a, b) == euclidean_distance(b, a));
  }
}

TEST_CASE("location set validation") {
  CHECK_THROWS_AS(LocationSet({}), DomainError);
  CHECK_THROWS_AS(LocationSet({{0, 0}, {1, 1}, {0, 0}}), DomainError);
  CHECK_THROWS_AS(LocationSet({{0, 0}, {0, 5e-13}}), DomainError);
  CHECK_NOTHROW(LocationSet({{0, 0}, {0, 1e-11}}));
  CHECK_THROWS_AS(LocationSet({{NAN, 0}}), DomainError);
  CHECK_THROWS_AS(LocationSet({{200, 0}}, Metric::great_circle()), DomainError);
  CHECK_NOTHROW(LocationSet({{200, 0}}));
}

TEST_CASE("distance matrix") {
  const LocationSet one({{0.3, 0.4}});
  auto d1 = distance_matrix(one, one);
  CHECK(d1.rows == 1);
  CHECK(d1(0, 0) == 0.0);

  const LocationSet two({{0, 0}, {1, 0}});
  auto d2 = distance_matrix(two, two);
  CHECK(d2(0, 0) == 0.0);
  CHECK(d2(0, 1) == 1.0);
  CHECK(d2(1, 0) == 1.0);
  CHECK(d2(1, 1) == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Location> pa(5), pb(3);
  for (auto& p : pa) p = {u(rng), u(rng)};
  for (auto& p : pb) p = {u(rng), u(rng)};
  const LocationSet a(pa), b(pb);
  auto d = distance_matrix(a, b);
  REQUIRE(d.rows == 5);
  REQUIRE(d.cols == 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(d(i, j) == euclidean_distance(pa[i], pb[j]));

  auto daa = distance_matrix(a, a);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(daa(i, i) == 0.0);
    for (std::size_t j = 0; j < 5; ++j) CHECK(daa(i, j) == daa(j, i));
  }

  const LocationSet g({{0, 0}}, Metric::great_circle());
  CHECK_THROWS_AS(distance_matrix(a, g), ShapeMismatch);
}

TEST_CASE("generate_locations") {
  const auto one = generate_locations(1, 3);
  REQUIRE(one.size() == 1);
  CHECK(one[0].c1 > 0.0);
  CHECK(one[0].c1 < 1.0);
  CHECK(one[0].c2 > 0.0);
  CHECK(one[0].c2 < 1.0);

  const auto a = generate_locations(400, 7);
  const auto b = generate_locations(400, 7);
  REQUIRE(a.size() == 400);
  for (std::size_t i = 0; i < 400; ++i) CHECK(a[i] == b[i]);
  CHECK(a.metric().kind == MetricKind::Euclidean);

  // Jitter of at most 0.4 cell widths keeps neighbours >= 0.2 / g apart.
  double min_d = INFINITY;
  for (std::size_t i = 0; i < 400; ++i) {
    CHECK(a[i].c1 > 0.0);
    CHECK(a[i].c1 < 1.0);
    CHECK(a[i].c2 > 0.0);
    CHECK(a[i].c2 < 1.0);
    for (std::size_t j = i + 1; j < 400; ++j) min_d = std::min(min_d, euclidean_distance(a[i], a[j]));
  }
  CHECK(min_d >= 0.01);

  const auto c = generate_locations(400, 8);
  bool differs = false;
  for (std::size_t i = 0; i < 400; ++i) differs |= !(a[i] == c[i]);
  CHECK(differs);

  CHECK(generate_locations(10, 1).size() == 10);  // non-square n
  CHECK_THROWS_AS(generate_locations(0, 1), DomainError);
}

TEST_CASE("subset selection keeps order and metric") {
  const LocationSet s({{0, 0}, {1, 0}, {2, 0}}, Metric::great_circle(10.0));
  const std::vector<std::size_t> idx{2, 0};
  const auto sub = s.select(idx);
  REQUIRE(sub.size() == 2);
  CHECK(sub[0].c1 == 2.0);
  CHECK(sub[1].c1 == 0.0);
  CHECK(sub.metric() == s.metric());
}
