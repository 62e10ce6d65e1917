#include "swarmtopo/geometry.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "swarmtopo/rng.hpp"

namespace swarmtopo::geometry {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOnBoundaryEps = 1e-12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

std::string curve_label(std::size_t i) {
  return i == 0 ? std::string("curve 0 (outer)") : "curve " + std::to_string(i);
}

// Even-odd crossing test against the polygon's interior.
bool inside_polygon(const Polygon& poly, Point p) {
  const auto& v = poly.vertices;
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const Point a = v[i];
    const Point b = v[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool inside_curve(const BoundaryCurve& curve, Point p) {
  return std::visit(Overloaded{
                        [&](const Polygon& poly) { return inside_polygon(poly, p); },
                        [&](const Circle& c) { return distance(p, c.center) < c.radius; },
                    },
                    curve);
}

// Orientation of three points: >0 for a left turn.
double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

bool on_segment(Point a, Point b, Point p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point a, Point b, Point c, Point d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) {
    return true;
  }
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double polygon_boundary_distance(const Polygon& poly, Point p) {
  const auto& v = poly.vertices;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    best = std::min(best, segment_distance(p, v[i], v[(i + 1) % v.size()]));
  }
  return best;
}

double max_vertex_distance(const Polygon& poly, Point p) {
  double best = 0.0;
  for (const Point v : poly.vertices) best = std::max(best, distance(v, p));
  return best;
}

bool polygons_intersect(const Polygon& a, const Polygon& b) {
  const auto& va = a.vertices;
  const auto& vb = b.vertices;
  for (std::size_t i = 0; i < va.size(); ++i) {
    for (std::size_t j = 0; j < vb.size(); ++j) {
      if (segments_intersect(va[i], va[(i + 1) % va.size()], vb[j], vb[(j + 1) % vb.size()])) {
        return true;
      }
    }
  }
  return false;
}

// Distance between two boundary curves; zero when they touch or cross.
double curve_to_curve(const BoundaryCurve& a, const BoundaryCurve& b) {
  return std::visit(
      Overloaded{
          [](const Polygon& pa, const Polygon& pb) {
            if (polygons_intersect(pa, pb)) return 0.0;
            double best = std::numeric_limits<double>::infinity();
            for (const Point v : pa.vertices) best = std::min(best, polygon_boundary_distance(pb, v));
            for (const Point v : pb.vertices) best = std::min(best, polygon_boundary_distance(pa, v));
            return best;
          },
          [](const Polygon& pa, const Circle& cb) {
            const double lo = polygon_boundary_distance(pa, cb.center);
            const double hi = max_vertex_distance(pa, cb.center);
            if (lo <= cb.radius && cb.radius <= hi) return 0.0;
            return std::min(std::abs(lo - cb.radius), std::abs(hi - cb.radius));
          },
          [](const Circle& ca, const Polygon& pb) {
            const double lo = polygon_boundary_distance(pb, ca.center);
            const double hi = max_vertex_distance(pb, ca.center);
            if (lo <= ca.radius && ca.radius <= hi) return 0.0;
            return std::min(std::abs(lo - ca.radius), std::abs(hi - ca.radius));
          },
          [](const Circle& ca, const Circle& cb) {
            const double d = distance(ca.center, cb.center);
            if (d >= ca.radius + cb.radius) return d - ca.radius - cb.radius;
            if (d <= std::abs(ca.radius - cb.radius)) return std::abs(ca.radius - cb.radius) - d;
            return 0.0;
          },
      },
      a, b);
}

Point representative_point(const BoundaryCurve& curve) {
  return std::visit(Overloaded{
                        [](const Polygon& poly) { return poly.vertices.front(); },
                        [](const Circle& c) { return Point{c.center.x + c.radius, c.center.y}; },
                    },
                    curve);
}

double curve_area(const BoundaryCurve& curve) {
  return std::visit(Overloaded{
                        [](const Polygon& poly) { return std::abs(signed_area(poly)); },
                        [](const Circle& c) { return kPi * c.radius * c.radius; },
                    },
                    curve);
}

Box curve_box(const BoundaryCurve& curve) {
  return std::visit(Overloaded{
                        [](const Polygon& poly) {
                          Box box{poly.vertices.front(), poly.vertices.front()};
                          for (const Point v : poly.vertices) {
                            box.lo.x = std::min(box.lo.x, v.x);
                            box.lo.y = std::min(box.lo.y, v.y);
                            box.hi.x = std::max(box.hi.x, v.x);
                            box.hi.y = std::max(box.hi.y, v.y);
                          }
                          return box;
                        },
                        [](const Circle& c) {
                          return Box{{c.center.x - c.radius, c.center.y - c.radius},
                                     {c.center.x + c.radius, c.center.y + c.radius}};
                        },
                    },
                    curve);
}

// Interior angles of the region at the corners of one polygonal curve.
// Curves are oriented with the region on the left, so the interior angle is
// pi minus the signed turn.
std::vector<double> region_corner_angles(const Polygon& poly) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point in = v[i] - v[(i + n - 1) % n];
    const Point out_dir = v[(i + 1) % n] - v[i];
    const double turn = std::atan2(cross(in, out_dir), dot(in, out_dir));
    out[i] = kPi - turn;
  }
  return out;
}

Polygon counter_clockwise(const Polygon& poly) {
  Polygon out = poly;
  if (signed_area(out) < 0) std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

}  // namespace

double segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double signed_area(const Polygon& polygon) {
  const auto& v = polygon.vertices;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) twice += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * twice;
}

double perimeter(const Polygon& polygon) {
  const auto& v = polygon.vertices;
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += distance(v[i], v[(i + 1) % v.size()]);
  return total;
}

std::vector<double> turning_angles(const Polygon& polygon) {
  const Polygon ccw = counter_clockwise(polygon);
  std::vector<double> out = region_corner_angles(ccw);
  for (double& a : out) a = kPi - a;
  return out;
}

double polygon_feature_size(const Polygon& polygon) {
  const auto& v = polygon.vertices;
  const std::size_t n = v.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t e = 0; e < n; ++e) {
      // Edge e runs from vertex e to e+1; it is adjacent to corners e and e+1.
      if (e == c || (e + 1) % n == c) continue;
      best = std::min(best, segment_distance(v[c], v[e], v[(e + 1) % n]));
    }
  }
  return best;
}

Region::Region(std::vector<BoundaryCurve> curves) : curves_(std::move(curves)) {
  if (curves_.empty()) throw TopologyViolation("region has no boundary curves");
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    std::visit(Overloaded{
                   [&](Polygon& poly) {
                     if (poly.vertices.size() < 3) {
                       throw TopologyViolation(curve_label(i) + ": polygon needs at least 3 vertices");
                     }
                     for (std::size_t j = 0; j < poly.vertices.size(); ++j) {
                       if (!finite(poly.vertices[j])) {
                         throw TopologyViolation(curve_label(i) + ": vertex " + std::to_string(j) +
                                                 " is not finite");
                       }
                     }
                     const double area = signed_area(poly);
                     if (area == 0.0) throw TopologyViolation(curve_label(i) + ": polygon has zero area");
                     const bool want_ccw = (i == 0);
                     if ((area > 0) != want_ccw) std::reverse(poly.vertices.begin(), poly.vertices.end());
                   },
                   [&](Circle& c) {
                     if (!finite(c.center) || !std::isfinite(c.radius) || c.radius <= 0.0) {
                       throw TopologyViolation(curve_label(i) + ": circle needs a finite positive radius");
                     }
                   },
               },
               curves_[i]);
  }
  box_ = curve_box(curves_.front());
}

FeatureReport validate_region(const Region& region, double min_angle) {
  const auto& curves = region.curves();
  FeatureReport report;
  report.k = curves.size();

  // Simplicity of each polygon.
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto* poly = std::get_if<Polygon>(&curves[c]);
    if (poly == nullptr) continue;
    const auto& v = poly->vertices;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == v[(i + 1) % n]) {
        throw TopologyViolation(curve_label(c) + ": repeated vertex " + std::to_string(i));
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        if (j == i + 1 || (j + 1) % n == i) continue;
        if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
          throw TopologyViolation(curve_label(c) + ": edges " + std::to_string(i) + " and " +
                                  std::to_string(j) + " intersect");
        }
      }
    }
  }

  // Curves must be pairwise disjoint; holes inside the outer curve and not
  // nested in each other. The interior is then connected.
  double d_min = std::numeric_limits<double>::infinity();
  std::string d_min_where;
  for (std::size_t a = 0; a < curves.size(); ++a) {
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      const double d = curve_to_curve(curves[a], curves[b]);
      if (d <= 0.0) {
        throw TopologyViolation(curve_label(a) + " and " + curve_label(b) + " touch or cross");
      }
      if (d < d_min) {
        d_min = d;
        d_min_where = curve_label(a) + " to " + curve_label(b);
      }
    }
  }
  for (std::size_t h = 1; h < curves.size(); ++h) {
    if (!inside_curve(curves[0], representative_point(curves[h]))) {
      throw TopologyViolation(curve_label(h) + " lies outside the outer curve");
    }
    for (std::size_t g = 1; g < curves.size(); ++g) {
      if (g != h && inside_curve(curves[g], representative_point(curves[h]))) {
        throw TopologyViolation(curve_label(h) + " is nested inside " + curve_label(g));
      }
    }
  }

  // Feature size within each curve.
  for (std::size_t c = 0; c < curves.size(); ++c) {
    std::visit(Overloaded{
                   [&](const Polygon& poly) {
                     const auto& v = poly.vertices;
                     const std::size_t n = v.size();
                     for (std::size_t i = 0; i < n; ++i) {
                       for (std::size_t e = 0; e < n; ++e) {
                         if (e == i || (e + 1) % n == i) continue;
                         const double d = segment_distance(v[i], v[e], v[(e + 1) % n]);
                         if (d < d_min) {
                           d_min = d;
                           d_min_where = curve_label(c) + " vertex " + std::to_string(i) + " to edge " +
                                         std::to_string(e);
                         }
                       }
                     }
                   },
                   [&](const Circle& circle) {
                     if (2.0 * circle.radius < d_min) {
                       d_min = 2.0 * circle.radius;
                       d_min_where = curve_label(c) + " diameter";
                     }
                   },
               },
               curves[c]);
  }
  report.d_min = d_min;
  if (d_min < kMinFeatureSize) {
    std::ostringstream msg;
    msg << "feature size " << d_min << "R below 2R at " << d_min_where;
    throw FeatureSizeViolation(msg.str());
  }

  // Corner angles, measured on the region side.
  report.min_angle = kPi;
  report.max_angle = kPi;
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto* poly = std::get_if<Polygon>(&curves[c]);
    if (poly == nullptr) continue;
    const auto angles = region_corner_angles(*poly);
    for (std::size_t i = 0; i < angles.size(); ++i) {
      report.min_angle = std::min(report.min_angle, angles[i]);
      report.max_angle = std::max(report.max_angle, angles[i]);
      if (angles[i] < min_angle || angles[i] > 2.0 * kPi - min_angle) {
        std::ostringstream msg;
        msg << curve_label(c) << " vertex " << i << ": angle " << angles[i] << " rad outside ["
            << min_angle << ", " << 2.0 * kPi - min_angle << "]";
        throw AngleViolation(msg.str());
      }
    }
  }

  report.area = region_area(region);
  if (report.area <= 0.0) throw TopologyViolation("region has non-positive area");
  return report;
}

double region_area(const Region& region) {
  const auto& curves = region.curves();
  double area = curve_area(curves.front());
  for (std::size_t i = 1; i < curves.size(); ++i) area -= curve_area(curves[i]);
  return area;
}

double curve_distance(const BoundaryCurve& curve, Point p) {
  return std::visit(Overloaded{
                        [&](const Polygon& poly) { return polygon_boundary_distance(poly, p); },
                        [&](const Circle& c) { return std::abs(distance(p, c.center) - c.radius); },
                    },
                    curve);
}

bool contains(const Region& region, Point p) {
  const auto& curves = region.curves();
  for (const auto& curve : curves) {
    if (curve_distance(curve, p) <= kOnBoundaryEps) return true;
  }
  if (!inside_curve(curves.front(), p)) return false;
  for (std::size_t i = 1; i < curves.size(); ++i) {
    if (inside_curve(curves[i], p)) return false;
  }
  return true;
}

std::vector<Point> sample_uniform(const Region& region, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw DomainError("sample_uniform needs n >= 1");
  const Box& box = region.bounding_box();
  CounterRng rng(seed);
  std::vector<Point> points;
  points.reserve(n);
  std::uint64_t draws = 0;
  while (points.size() < n) {
    const Point p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
    ++draws;
    if (contains(region, p)) points.push_back(p);
    if (draws >= 10'000 && points.size() * 100 < draws) {
      throw NonConvergence("rejection sampling acceptance rate below 1% after " +
                           std::to_string(draws) + " draws");
    }
  }
  return points;
}

BoundaryDistance boundary_distance(const Region& region, Point p) {
  if (!contains(region, p)) throw OutsideRegion("point lies outside the region");
  const auto& curves = region.curves();
  BoundaryDistance out;
  out.distance = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const double d = curve_distance(curves[i], p);
    if (d < out.distance) {
      if (std::isfinite(out.distance)) {
        out.second_distance = out.distance;
        out.second_curve_index = out.curve_index;
      }
      out.distance = d;
      out.curve_index = i;
    } else if (d < out.second_distance) {
      out.second_distance = d;
      out.second_curve_index = i;
    }
  }
  return out;
}

Inradius inradius_oracle(const Region& region, double grid_step) {
  if (!(grid_step > 0.0) || grid_step > 0.1) {
    throw DomainError("inradius_oracle needs 0 < grid_step <= 0.1R");
  }
  auto value = [&](Point p) {
    return contains(region, p) ? boundary_distance(region, p).distance : -1.0;
  };
  const Box& box = region.bounding_box();
  Inradius best{-1.0, {}};
  const auto nx = static_cast<std::size_t>(std::ceil(box.width() / grid_step));
  const auto ny = static_cast<std::size_t>(std::ceil(box.height() / grid_step));
  for (std::size_t i = 0; i <= nx; ++i) {
    for (std::size_t j = 0; j <= ny; ++j) {
      const Point p{box.lo.x + static_cast<double>(i) * grid_step,
                    box.lo.y + static_cast<double>(j) * grid_step};
      const double v = value(p);
      if (v > best.thickness) best = {v, p};
    }
  }

  // Coordinate-wise golden-section polish around the best grid point.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto polish = [&](auto make_point, double center) {
    double a = center - grid_step;
    double b = center + grid_step;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = value(make_point(c));
    double fd = value(make_point(d));
    for (int it = 0; it < 48; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = value(make_point(c));
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = value(make_point(d));
      }
    }
    return 0.5 * (a + b);
  };
  for (int round = 0; round < 4; ++round) {
    const double y = best.argmax.y;
    const double x = polish([&](double t) { return Point{t, y}; }, best.argmax.x);
    if (value({x, y}) > best.thickness) best = {value({x, y}), {x, y}};
    const double x2 = best.argmax.x;
    const double y2 = polish([&](double t) { return Point{x2, t}; }, best.argmax.y);
    if (value({x2, y2}) > best.thickness) best = {value({x2, y2}), {x2, y2}};
  }
  return best;
}

BandAreas band_areas_closed_form(const Polygon& polygon, double radius) {
  if (polygon.vertices.size() < 3) throw TopologyViolation("polygon needs at least 3 vertices");
  const double feature = polygon_feature_size(polygon);
  if (feature < 2.0 * radius) {
    std::ostringstream msg;
    msg << "polygon feature size " << feature << " below 2R = " << 2.0 * radius;
    throw FeatureSizeViolation(msg.str());
  }
  const double r2 = radius * radius;
  BandAreas out;
  out.outer_band = radius * perimeter(polygon);
  out.inner_band = out.outer_band;
  for (const double phi : turning_angles(polygon)) {
    if (phi > 0) {
      out.outer_band -= r2 * std::tan(phi / 2.0);
      out.inner_band += r2 * phi / 2.0;
    } else if (phi < 0) {
      out.outer_band += r2 * (-phi) / 2.0;
      out.inner_band -= r2 * std::tan(-phi / 2.0);
    }
  }
  return out;
}

BandAreaEstimate band_areas_oracle(const Polygon& polygon, double radius, std::size_t samples,
                                   std::uint64_t seed) {
  if (samples == 0) throw DomainError("band_areas_oracle needs samples > 0");
  Box box = curve_box(polygon);
  box.lo = box.lo - Point{radius, radius};
  box.hi = box.hi + Point{radius, radius};
  CounterRng rng(seed);
  std::uint64_t hits_in = 0;
  std::uint64_t hits_out = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point p{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
    if (polygon_boundary_distance(polygon, p) > radius) continue;
    if (inside_polygon(polygon, p)) {
      ++hits_in;
    } else {
      ++hits_out;
    }
  }
  const double total = static_cast<double>(samples);
  const double area = box.area();
  auto estimate = [&](std::uint64_t hits) {
    const double p = static_cast<double>(hits) / total;
    return std::array<double, 2>{area * p, area * std::sqrt(p * (1.0 - p) / total)};
  };
  const auto in = estimate(hits_in);
  const auto out = estimate(hits_out);
  return {{in[0], out[0]}, {in[1], out[1]}};
}

double visibility_fraction(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("visibility_fraction needs 0 <= t <= 1");
  return 1.0 - (std::acos(t) - t * std::sqrt(1.0 - t * t)) / kPi;
}

double invert_visibility(double r) {
  if (!(r >= 0.5 && r <= 1.0)) throw DomainError("invert_visibility needs 0.5 <= r <= 1");
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (visibility_fraction(mid) < r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace swarmtopo::geometry
