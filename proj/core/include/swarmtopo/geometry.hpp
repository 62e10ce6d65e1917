#pragma once

// Planar regions with polygonal and circular boundary curves, uniform
// deployment sampling, and the exact ground-truth oracles used to score the
// coordinate-free algorithms. All lengths are in units of the communication
// radius R.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "swarmtopo/error.hpp"

namespace swarmtopo::geometry {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point, Point) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Distance from p to the closed segment [a, b].
double segment_distance(Point p, Point a, Point b);

struct Polygon {
  std::vector<Point> vertices;
};

struct Circle {
  Point center;
  double radius = 0.0;
};

using BoundaryCurve = std::variant<Polygon, Circle>;

struct Box {
  Point lo;
  Point hi;

  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double area() const { return width() * height(); }
};

class GeometryError : public Error {
 public:
  explicit GeometryError(const std::string& what) : Error(ErrorFamily::geometry, what) {}
};
class FeatureSizeViolation : public GeometryError {
  using GeometryError::GeometryError;
};
class AngleViolation : public GeometryError {
  using GeometryError::GeometryError;
};
class TopologyViolation : public GeometryError {
  using GeometryError::GeometryError;
};
class NonConvergence : public GeometryError {
  using GeometryError::GeometryError;
};
class OutsideRegion : public GeometryError {
  using GeometryError::GeometryError;
};
class DomainError : public GeometryError {
  using GeometryError::GeometryError;
};

/// A region bounded by one outer curve (index 0) and zero or more holes.
///
/// Construction checks structure only (vertex counts, finite coordinates,
/// positive radii) and normalizes orientation: the outer polygon runs
/// counter-clockwise and hole polygons clockwise, so the region interior is
/// always on the left of a traversal. Feature size, angles and nesting are
/// checked by validate_region().
class Region {
 public:
  explicit Region(std::vector<BoundaryCurve> curves);

  const std::vector<BoundaryCurve>& curves() const { return curves_; }
  const BoundaryCurve& curve(std::size_t i) const { return curves_.at(i); }
  std::size_t boundary_count() const { return curves_.size(); }
  const Box& bounding_box() const { return box_; }

 private:
  std::vector<BoundaryCurve> curves_;
  Box box_;
};

struct FeatureReport {
  double d_min = 0.0;
  double min_angle = 0.0;
  double max_angle = 0.0;
  double area = 0.0;
  std::size_t k = 0;
};

inline constexpr double kDefaultMinAngle = std::numbers::pi / 3.0;
inline constexpr double kMinFeatureSize = 2.0;

FeatureReport validate_region(const Region& region, double min_angle = kDefaultMinAngle);

double region_area(const Region& region);

/// Closed-interior membership; points on any boundary curve count as inside.
bool contains(const Region& region, Point p);

/// n i.i.d. uniform points by rejection from the bounding box, drawn from
/// CounterRng(seed). Throws NonConvergence if the acceptance rate drops
/// below 1%.
std::vector<Point> sample_uniform(const Region& region, std::size_t n, std::uint64_t seed);

/// Distance from p to a single boundary curve.
double curve_distance(const BoundaryCurve& curve, Point p);

struct BoundaryDistance {
  double distance = 0.0;
  std::size_t curve_index = 0;
  double second_distance = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> second_curve_index;
};

/// Nearest and second-nearest (distinct) boundary curve of an interior point.
BoundaryDistance boundary_distance(const Region& region, Point p);

struct Inradius {
  double thickness = 0.0;
  Point argmax;
};

/// Largest inscribed disk radius: grid scan plus golden-section polish.
Inradius inradius_oracle(const Region& region, double grid_step);

struct BandAreas {
  double outer_band = 0.0;  ///< inside the curve, within R of it
  double inner_band = 0.0;  ///< outside the curve, within R of it
};

struct BandAreaEstimate {
  BandAreas areas;
  BandAreas std_error;
};

/// Signed turning angle at each vertex of a counter-clockwise copy of the
/// polygon; positive at convex corners. Sums to 2*pi.
std::vector<double> turning_angles(const Polygon& polygon);

double perimeter(const Polygon& polygon);
double signed_area(const Polygon& polygon);

/// Smallest distance between a corner and a non-adjacent edge.
double polygon_feature_size(const Polygon& polygon);

/// Closed-form areas of the two R-bands around a simple closed polygon whose
/// feature size is at least 2R. Edge strips are corrected at every corner by
/// the circular sector of a gap or the kite of an overlap:
///   outer_band = R*l - sum_{phi>0} R^2 tan(phi/2) + sum_{phi<0} R^2 |phi|/2
///   inner_band = R*l + sum_{phi>0} R^2 phi/2     - sum_{phi<0} R^2 tan(|phi|/2)
BandAreas band_areas_closed_form(const Polygon& polygon, double radius);

/// Monte Carlo estimate of the same two bands over the R-inflated bounding box.
BandAreaEstimate band_areas_oracle(const Polygon& polygon, double radius, std::size_t samples,
                                   std::uint64_t seed);

/// Fraction of a unit disk centred at distance t from an infinite straight
/// boundary that lies on the region side.
double visibility_fraction(double t);

/// Inverse of visibility_fraction on [0.5, 1]; accurate to 1e-9.
double invert_visibility(double r);

/// Region document: {"radius_unit": 1.0, "curves": [...]}. Lengths are
/// divided by radius_unit.
Region parse_region_json(const std::string& text);
Region load_region_file(const std::string& path);
std::string region_to_json(const Region& region);

}  // namespace swarmtopo::geometry
