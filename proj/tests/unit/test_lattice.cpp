#include <doctest.h>

#include "error.hpp"
#include "lattice.hpp"
#include "support.hpp"

using namespace spknn;

TEST_CASE("make_lattice 1-d coordinates") {
  const std::vector<std::size_t> shape{2};
  const auto s = make_lattice(shape);
  REQUIRE(s.size() == 2);
  CHECK(s[0][0] == 0.5);
  CHECK(s[1][0] == 1.0);
}

TEST_CASE("make_lattice 2x2 row-major") {
  const std::vector<std::size_t> shape{2, 2};
  const auto s = make_lattice(shape);
  REQUIRE(s.size() == 4);
  CHECK(s[0][0] == 0.5);
  CHECK(s[0][1] == 0.5);
  CHECK(s[1][0] == 0.5);
  CHECK(s[1][1] == 1.0);
  CHECK(s[3][0] == 1.0);
  CHECK(s[3][1] == 1.0);
  REQUIRE(s.shape().has_value());
  CHECK(*s.shape() == shape);
}

TEST_CASE("make_lattice 25x25 has 625 sites in (0,1]") {
  const std::vector<std::size_t> shape{25, 25};
  const auto s = make_lattice(shape);
  CHECK(s.size() == 625);
  for (double c : s.flat()) {
    CHECK(c > 0.0);
    CHECK(c <= 1.0);
  }
}

TEST_CASE("make_lattice rejects empty axes") {
  const std::vector<std::size_t> bad{3, 0};
  CHECK_THROWS_AS(make_lattice(bad), Error);
  CHECK_THROWS_AS(make_lattice(std::vector<std::size_t>{}), Error);
}

TEST_CASE("site_distance basics") {
  const double a[] = {0, 0}, b[] = {3, 4};
  CHECK(site_distance(a, b) == 5.0);
  CHECK(site_distance(a, a) == 0.0);
  const double c[] = {1, 2, 3};
  try {
    site_distance(a, c);
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("site_distance matches re-summation and is a metric") {
  Rng rng(11);
  for (int it = 0; it < 2000; ++it) {
    const std::size_t dim = testutil::uniform_int(rng, 1, 5);
    const auto a = testutil::uniform_vec(rng, dim, -10, 10);
    const auto b = testutil::uniform_vec(rng, dim, -10, 10);
    const auto c = testutil::uniform_vec(rng, dim, -10, 10);
    const double ab = site_distance(a, b), ba = site_distance(b, a);
    CHECK(ab == doctest::Approx(testutil::dist(a.data(), b.data(), dim)).epsilon(1e-14));
    CHECK(ab >= 0.0);
    CHECK(ab == ba);
    CHECK(ab <= site_distance(a, c) + site_distance(c, b) + 1e-12);
  }
}

TEST_CASE("SiteSet checks lattice cardinality") {
  CHECK_THROWS_AS(SiteSet(2, {0.5, 0.5, 1.0, 1.0}, std::vector<std::size_t>{2, 2}), Error);
  CHECK_NOTHROW(SiteSet(1, {0.5, 1.0}, std::vector<std::size_t>{2}));
}

TEST_CASE("SiteSet subset keeps order") {
  const auto s = make_lattice(std::vector<std::size_t>{4});
  const std::vector<std::size_t> idx{3, 1};
  const auto sub = s.subset(idx);
  REQUIRE(sub.size() == 2);
  CHECK(sub[0][0] == 1.0);
  CHECK(sub[1][0] == 0.5);
}
