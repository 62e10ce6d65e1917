#include <fstream>
#include <sstream>

#include "json.hpp"
#include "swarmtopo/geometry.hpp"

namespace swarmtopo::geometry {

namespace {

using nlohmann::json;

Point parse_point(const json& j, double unit) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ConfigError("region file: a point must be [x, y]");
  }
  return {j[0].get<double>() / unit, j[1].get<double>() / unit};
}

}  // namespace

Region parse_region_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("region file: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("curves") || !doc["curves"].is_array()) {
    throw ConfigError("region file: expected an object with a \"curves\" array");
  }
  const double unit = doc.value("radius_unit", 1.0);
  if (!(unit > 0.0)) throw ConfigError("region file: radius_unit must be positive");

  std::vector<BoundaryCurve> curves;
  for (const auto& c : doc["curves"]) {
    const std::string type = c.value("type", "");
    if (type == "polygon") {
      if (!c.contains("vertices") || !c["vertices"].is_array()) {
        throw ConfigError("region file: polygon without \"vertices\"");
      }
      Polygon poly;
      for (const auto& v : c["vertices"]) poly.vertices.push_back(parse_point(v, unit));
      curves.emplace_back(std::move(poly));
    } else if (type == "circle") {
      if (!c.contains("center") || !c.contains("radius") || !c["radius"].is_number()) {
        throw ConfigError("region file: circle needs \"center\" and \"radius\"");
      }
      curves.emplace_back(Circle{parse_point(c["center"], unit), c["radius"].get<double>() / unit});
    } else {
      throw ConfigError("region file: unknown curve type \"" + type + "\"");
    }
  }
  return Region(std::move(curves));
}

Region load_region_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open region file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_region_json(buf.str());
}

std::string region_to_json(const Region& region) {
  json doc;
  doc["radius_unit"] = 1.0;
  doc["curves"] = json::array();
  for (const auto& curve : region.curves()) {
    if (const auto* poly = std::get_if<Polygon>(&curve)) {
      json verts = json::array();
      for (const Point v : poly->vertices) verts.push_back({v.x, v.y});
      doc["curves"].push_back({{"type", "polygon"}, {"vertices", verts}});
    } else {
      const auto& circle = std::get<Circle>(curve);
      doc["curves"].push_back(
          {{"type", "circle"}, {"center", {circle.center.x, circle.center.y}}, {"radius", circle.radius}});
    }
  }
  return doc.dump(2);
}

}  // namespace swarmtopo::geometry
