#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "swarmtopo/geometry.hpp"

using namespace swarmtopo::geometry;
using testutil::square;

TEST_CASE("segment distance") {
  CHECK(segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
  CHECK(segment_distance({3, 4}, {0, 0}, {0, 0}) == doctest::Approx(5.0));
  CHECK(segment_distance({2, 1}, {-1, 0}, {1, 0}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("orientation is normalized") {
  const Polygon cw{{{0, 0}, {0, 10}, {10, 10}, {10, 0}}};
  const Region r({cw, Polygon{{{4, 4}, {6, 4}, {6, 6}, {4, 6}}}});
  CHECK(signed_area(std::get<Polygon>(r.curve(0))) > 0.0);
  CHECK(signed_area(std::get<Polygon>(r.curve(1))) < 0.0);
  CHECK(region_area(r) == doctest::Approx(96.0));
}

TEST_CASE("structural checks at construction") {
  CHECK_THROWS_AS(Region({}), GeometryError);
  CHECK_THROWS_AS(Region({Polygon{{{0, 0}, {1, 0}}}}), GeometryError);
  CHECK_THROWS_AS(Region({Circle{{0, 0}, -1.0}}), GeometryError);
  CHECK_THROWS_AS(Region({Polygon{{{0, 0}, {NAN, 0}, {1, 1}}}}), GeometryError);
}

TEST_CASE("area and containment with a circular hole") {
  const Region r({square(0, 10), Circle{{5, 5}, 2.0}});
  CHECK(region_area(r) == doctest::Approx(100.0 - 4.0 * std::numbers::pi));
  CHECK(contains(r, {1, 1}));
  CHECK_FALSE(contains(r, {5, 5}));
  CHECK(contains(r, {10, 5}));  // on the outer boundary
  CHECK(contains(r, {7, 5}));   // on the hole
  CHECK_FALSE(contains(r, {11, 5}));
}

TEST_CASE("validation") {
  SUBCASE("square passes") {
    const auto rep = validate_region(testutil::square_region(10));
    CHECK(rep.d_min == doctest::Approx(10.0));
    CHECK(rep.k == 1);
    CHECK(rep.area == doctest::Approx(100.0));
  }
  SUBCASE("thin strip") {
    CHECK_THROWS_AS(validate_region(Region({Polygon{{{0, 0}, {10, 0}, {10, 1}, {0, 1}}}})), FeatureSizeViolation);
  }
  SUBCASE("sharp corner") {
    const double h = 50.0 * std::tan(80.0 * std::numbers::pi / 180.0);
    CHECK_THROWS_AS(validate_region(Region({Polygon{{{0, 0}, {100, 0}, {50, h}}}})), AngleViolation);
  }
  SUBCASE("hole too close to the outer curve") {
    CHECK_THROWS_AS(validate_region(Region({square(0, 10), Circle{{5, 1.5}, 1.0}})), FeatureSizeViolation);
  }
  SUBCASE("hole outside") {
    CHECK_THROWS_AS(validate_region(Region({square(0, 10), Circle{{20, 20}, 1.0}})), TopologyViolation);
  }
}

TEST_CASE("uniform sampling is deterministic and inside") {
  const Region r({square(0, 10), Circle{{5, 5}, 2.0}});
  const auto a = sample_uniform(r, 2000, 7);
  const auto b = sample_uniform(r, 2000, 7);
  const auto c = sample_uniform(r, 2000, 8);
  CHECK(a.size() == 2000);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (const auto& p : a) CHECK(contains(r, p));
}

TEST_CASE("boundary distance reports two curves") {
  const Region r({square(0, 10), Circle{{5, 5}, 1.0}});
  const auto d = boundary_distance(r, {5, 8});
  CHECK(d.distance == doctest::Approx(2.0));
  CHECK(d.curve_index == 0);
  REQUIRE(d.second_curve_index);
  CHECK(*d.second_curve_index == 1);
  CHECK(d.second_distance == doctest::Approx(2.0));
  CHECK(curve_distance(Circle{{0, 0}, 1.0}, {3, 4}) == doctest::Approx(4.0));
}

TEST_CASE("inradius") {
  CHECK(inradius_oracle(testutil::square_region(10), 0.1).thickness == doctest::Approx(5.0).epsilon(1e-3));
  const Region ring({Circle{{10, 10}, 10.0}, Circle{{10, 10}, 4.0}});
  CHECK(inradius_oracle(ring, 0.1).thickness == doctest::Approx(3.0).epsilon(1e-3));
}

TEST_CASE("turning angles and feature size") {
  const auto sq = square(0, 4);
  double total = 0.0;
  for (double a : turning_angles(sq)) {
    CHECK(a == doctest::Approx(std::numbers::pi / 2));
    total += a;
  }
  CHECK(total == doctest::Approx(2 * std::numbers::pi));
  CHECK(perimeter(sq) == doctest::Approx(16.0));
  CHECK(polygon_feature_size(sq) == doctest::Approx(4.0));
  const Polygon ell{{{0, 0}, {10, 0}, {10, 4}, {4, 4}, {4, 10}, {0, 10}}};
  CHECK(polygon_feature_size(ell) == doctest::Approx(4.0));
  double ell_total = 0.0;
  for (double a : turning_angles(ell)) ell_total += a;
  CHECK(ell_total == doctest::Approx(2 * std::numbers::pi));
}

TEST_CASE("band areas of a square in closed form") {
  const auto b = band_areas_closed_form(square(0, 10), 1.0);
  CHECK(b.outer_band == doctest::Approx(36.0));
  CHECK(b.inner_band == doctest::Approx(40.0 + std::numbers::pi));
}

TEST_CASE("band areas of a reflex polygon agree with Monte Carlo") {
  const Polygon ell{{{0, 0}, {10, 0}, {10, 4}, {4, 4}, {4, 10}, {0, 10}}};
  const auto cf = band_areas_closed_form(ell, 1.0);
  const auto mc = band_areas_oracle(ell, 1.0, 400'000, 3);
  CHECK(std::fabs(cf.outer_band - mc.areas.outer_band) < 4 * mc.std_error.outer_band + 1e-9);
  CHECK(std::fabs(cf.inner_band - mc.areas.inner_band) < 4 * mc.std_error.inner_band + 1e-9);
}

TEST_CASE("visibility fraction") {
  CHECK(visibility_fraction(0.0) == doctest::Approx(0.5));
  CHECK(visibility_fraction(1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(visibility_fraction(2.0), DomainError);
  CHECK_THROWS_AS(invert_visibility(0.4), DomainError);
  for (double t : {0.05, 0.3, 0.5, 0.8, 0.99}) {
    CHECK(invert_visibility(visibility_fraction(t)) == doctest::Approx(t).epsilon(1e-7));
  }
  double prev = 0.0;
  for (double t = 0.0; t <= 1.0; t += 0.01) {
    CHECK(visibility_fraction(t) >= prev);
    prev = visibility_fraction(t);
  }
}

TEST_CASE("region JSON round trip") {
  const Region r({square(0, 10), Circle{{5, 5}, 1.5}});
  const auto back = parse_region_json(region_to_json(r));
  REQUIRE(back.boundary_count() == 2);
  CHECK(std::get<Polygon>(back.curve(0)).vertices == std::get<Polygon>(r.curve(0)).vertices);
  CHECK(std::get<Circle>(back.curve(1)).radius == doctest::Approx(1.5));
}

TEST_CASE("radius unit scales lengths") {
  const auto r = parse_region_json(
      R"({"radius_unit": 2.0, "curves": [{"type": "polygon", "vertices": [[0,0],[20,0],[20,20],[0,20]]}]})");
  CHECK(region_area(r) == doctest::Approx(100.0));
}

TEST_CASE("malformed region documents") {
  CHECK_THROWS_AS(parse_region_json("{"), swarmtopo::Error);
  CHECK_THROWS_AS(parse_region_json(R"({"curves": []})"), swarmtopo::Error);
  CHECK_THROWS_AS(load_region_file("/nonexistent/region.json"), swarmtopo::IoError);
}
