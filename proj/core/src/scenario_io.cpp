#include "driveaudit/scenario_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "driveaudit/errors.hpp"

namespace driveaudit {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Writer
// ---------------------------------------------------------------------------

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  if (std::strcmp(buf, "-0.000000") == 0) return "0.000000";
  return buf;
}

// Largest %.6f-representable values still inside [-pi, pi); printing a
// heading closer to -pi would round to -3.141593 and renormalize to +pi
// on reload, breaking the byte round-trip.
double clamp_heading_for_print(double h) {
  return std::clamp(h, -3.141592, 3.141592);
}

void append_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void append_point_rows(std::string& out, const std::vector<Vec2>& pts, const std::string& indent) {
  out += "[\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out += indent + "  [" + fmt6(pts[i].x) + ", " + fmt6(pts[i].y) + "]";
    out += i + 1 < pts.size() ? ",\n" : "\n";
  }
  out += indent + "]";
}

void append_id_list(std::string& out, const std::vector<std::string>& ids) {
  out += '[';
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ", ";
    append_escaped(out, ids[i]);
  }
  out += ']';
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  std::string out;
  out.reserve(1 << 16);

  out += "{\n";
  out += "  \"format_version\": " + std::to_string(kFormatVersion) + ",\n";

  out += "  \"meta\": {\n";
  out += "    \"scenario_id\": ";
  append_escaped(out, s.meta.scenario_id);
  out += ",\n    \"dataset_name\": ";
  append_escaped(out, s.meta.dataset_name);
  out += ",\n    \"city\": ";
  append_escaped(out, s.meta.city);
  out += ",\n    \"frame_rate_hz\": " + fmt6(s.meta.frame_rate_hz);
  out += ",\n    \"time_of_day\": ";
  if (s.meta.time_of_day) {
    append_escaped(out, *s.meta.time_of_day);
  } else {
    out += "null";
  }
  out += "\n  },\n";

  out += "  \"frame_count\": " + std::to_string(s.frame_count) + ",\n";

  out += "  \"map\": {\n";
  out += "    \"lanes\": [";
  for (std::size_t i = 0; i < s.lanes.size(); ++i) {
    const Lane& l = s.lanes[i];
    out += i ? ",\n      {\n" : "\n      {\n";
    out += "        \"lane_id\": ";
    append_escaped(out, l.lane_id);
    out += ",\n        \"lane_type\": \"";
    out += to_string(l.lane_type);
    out += "\",\n        \"centerline\": ";
    append_point_rows(out, l.centerline, "        ");
    out += ",\n        \"left_boundary\": ";
    if (l.left_boundary.empty()) {
      out += "null";
    } else {
      append_escaped(out, l.left_boundary);
    }
    out += ",\n        \"right_boundary\": ";
    if (l.right_boundary.empty()) {
      out += "null";
    } else {
      append_escaped(out, l.right_boundary);
    }
    out += ",\n        \"predecessors\": ";
    append_id_list(out, l.predecessors);
    out += ",\n        \"successors\": ";
    append_id_list(out, l.successors);
    out += ",\n        \"neighbors\": ";
    append_id_list(out, l.neighbors);
    out += "\n      }";
  }
  out += s.lanes.empty() ? "],\n" : "\n    ],\n";

  out += "    \"boundaries\": [";
  for (std::size_t i = 0; i < s.boundaries.size(); ++i) {
    const BoundaryLine& b = s.boundaries[i];
    out += i ? ",\n      {\n" : "\n      {\n";
    out += "        \"boundary_id\": ";
    append_escaped(out, b.boundary_id);
    out += ",\n        \"style\": \"";
    out += to_string(b.style);
    out += "\",\n        \"polyline\": ";
    append_point_rows(out, b.polyline, "        ");
    out += "\n      }";
  }
  out += s.boundaries.empty() ? "],\n" : "\n    ],\n";

  out += "    \"crosswalks\": [";
  for (std::size_t i = 0; i < s.crosswalks.size(); ++i) {
    const Crosswalk& c = s.crosswalks[i];
    out += i ? ",\n      {\n" : "\n      {\n";
    out += "        \"crosswalk_id\": ";
    append_escaped(out, c.crosswalk_id);
    out += ",\n        \"polygon\": ";
    append_point_rows(out, c.polygon, "        ");
    out += "\n      }";
  }
  out += s.crosswalks.empty() ? "]\n" : "\n    ]\n";
  out += "  },\n";

  out += "  \"agents\": [";
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const AgentTrack& a = s.agents[i];
    out += i ? ",\n    {\n" : "\n    {\n";
    out += "      \"agent_id\": ";
    append_escaped(out, a.agent_id);
    out += ",\n      \"category\": \"";
    out += to_string(a.category);
    out += "\",\n      \"length\": " + fmt6(a.length);
    out += ",\n      \"width\": " + fmt6(a.width);
    out += ",\n      \"states\": [\n";
    for (std::size_t f = 0; f < a.states.size(); ++f) {
      if (a.is_valid(f)) {
        const AgentState& st = a.states[f];
        out += "        [" + fmt6(st.position.x) + ", " + fmt6(st.position.y) + ", " +
               fmt6(clamp_heading_for_print(st.heading)) + ", " +
               (st.speed ? fmt6(*st.speed) : "null") + "]";
      } else {
        out += "        [0.000000, 0.000000, 0.000000, null]";
      }
      out += f + 1 < a.states.size() ? ",\n" : "\n";
    }
    out += "      ],\n";
    out += "      \"valid\": [";
    for (std::size_t f = 0; f < a.valid.size(); ++f) {
      if (f) out += ", ";
      out += a.valid[f] ? '1' : '0';
    }
    out += "]\n    }";
  }
  out += s.agents.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open for writing");
  const std::string text = serialize_scenario(s);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw IoError(path.string(), "write failed");
}

// ---------------------------------------------------------------------------
// Loader
// ---------------------------------------------------------------------------

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key, "expected string");
  return v.get<std::string>();
}

double get_number(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) throw SchemaError(path + "." + key, "expected number");
  return v.get<double>();
}

std::vector<Vec2> get_points(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected array of [x, y]");
  std::vector<Vec2> pts;
  pts.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& p = v[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw SchemaError(path + "." + key + "[" + std::to_string(i) + "]", "expected [x, y]");
    }
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return pts;
}

std::vector<std::string> get_id_list(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw SchemaError(path + "." + key, "expected array of strings");
  std::vector<std::string> ids;
  ids.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      throw SchemaError(path + "." + key + "[" + std::to_string(i) + "]", "expected string");
    }
    ids.push_back(v[i].get<std::string>());
  }
  return ids;
}

std::string get_optional_id(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw SchemaError(path + "." + key, "expected string or null");
  return it->get<std::string>();
}

Scenario parse_scenario(const json& root, const std::string& origin) {
  if (!root.is_object()) throw SchemaError(origin, "top level must be an object");

  const json& version = require(root, "format_version", origin);
  if (!version.is_number_integer() || version.get<int>() != kFormatVersion) {
    throw SchemaError(origin + ".format_version",
                      "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
  }

  Scenario s;
  const json& meta = require(root, "meta", origin);
  if (!meta.is_object()) throw SchemaError(origin + ".meta", "expected object");
  s.meta.scenario_id = get_string(meta, "scenario_id", "meta");
  s.meta.dataset_name = get_string(meta, "dataset_name", "meta");
  s.meta.city = get_string(meta, "city", "meta");
  s.meta.frame_rate_hz = get_number(meta, "frame_rate_hz", "meta");
  if (auto it = meta.find("time_of_day"); it != meta.end() && !it->is_null()) {
    if (!it->is_string()) throw SchemaError("meta.time_of_day", "expected string or null");
    s.meta.time_of_day = it->get<std::string>();
  }

  const json& fc = require(root, "frame_count", origin);
  if (!fc.is_number_integer()) throw SchemaError(origin + ".frame_count", "expected integer");
  s.frame_count = fc.get<int>();

  const json& map = require(root, "map", origin);
  if (!map.is_object()) throw SchemaError(origin + ".map", "expected object");

  const json& lanes = require(map, "lanes", "map");
  if (!lanes.is_array()) throw SchemaError("map.lanes", "expected array");
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string path = "map.lanes[" + std::to_string(i) + "]";
    const json& jl = lanes[i];
    if (!jl.is_object()) throw SchemaError(path, "expected object");
    Lane l;
    l.lane_id = get_string(jl, "lane_id", path);
    l.lane_type = lane_type_from_string(get_string(jl, "lane_type", path));
    l.centerline = get_points(jl, "centerline", path);
    l.left_boundary = get_optional_id(jl, "left_boundary", path);
    l.right_boundary = get_optional_id(jl, "right_boundary", path);
    l.predecessors = get_id_list(jl, "predecessors", path);
    l.successors = get_id_list(jl, "successors", path);
    l.neighbors = get_id_list(jl, "neighbors", path);
    s.lanes.push_back(std::move(l));
  }

  const json& boundaries = require(map, "boundaries", "map");
  if (!boundaries.is_array()) throw SchemaError("map.boundaries", "expected array");
  for (std::size_t i = 0; i < boundaries.size(); ++i) {
    const std::string path = "map.boundaries[" + std::to_string(i) + "]";
    const json& jb = boundaries[i];
    if (!jb.is_object()) throw SchemaError(path, "expected object");
    BoundaryLine b;
    b.boundary_id = get_string(jb, "boundary_id", path);
    b.style = boundary_style_from_string(get_string(jb, "style", path));
    b.polyline = get_points(jb, "polyline", path);
    s.boundaries.push_back(std::move(b));
  }

  const json& crosswalks = require(map, "crosswalks", "map");
  if (!crosswalks.is_array()) throw SchemaError("map.crosswalks", "expected array");
  for (std::size_t i = 0; i < crosswalks.size(); ++i) {
    const std::string path = "map.crosswalks[" + std::to_string(i) + "]";
    const json& jc = crosswalks[i];
    if (!jc.is_object()) throw SchemaError(path, "expected object");
    Crosswalk c;
    c.crosswalk_id = get_string(jc, "crosswalk_id", path);
    c.polygon = get_points(jc, "polygon", path);
    s.crosswalks.push_back(std::move(c));
  }

  const json& agents = require(root, "agents", origin);
  if (!agents.is_array()) throw SchemaError(origin + ".agents", "expected array");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    const json& ja = agents[i];
    if (!ja.is_object()) throw SchemaError(path, "expected object");
    AgentTrack a;
    a.agent_id = get_string(ja, "agent_id", path);
    a.category = agent_category_from_string(get_string(ja, "category", path));
    a.length = get_number(ja, "length", path);
    a.width = get_number(ja, "width", path);

    const json& valid = require(ja, "valid", path);
    if (!valid.is_array()) throw SchemaError(path + ".valid", "expected array of 0/1");
    a.valid.reserve(valid.size());
    for (std::size_t f = 0; f < valid.size(); ++f) {
      if (!valid[f].is_number_integer()) {
        throw SchemaError(path + ".valid[" + std::to_string(f) + "]", "expected 0 or 1");
      }
      const int v = valid[f].get<int>();
      if (v != 0 && v != 1) {
        throw SchemaError(path + ".valid[" + std::to_string(f) + "]", "expected 0 or 1");
      }
      a.valid.push_back(static_cast<std::uint8_t>(v));
    }

    const json& states = require(ja, "states", path);
    if (!states.is_array()) throw SchemaError(path + ".states", "expected array");
    a.states.reserve(states.size());
    for (std::size_t f = 0; f < states.size(); ++f) {
      const std::string sw = path + ".states[" + std::to_string(f) + "]";
      const json& js = states[f];
      if (!js.is_array() || js.size() != 4) {
        throw SchemaError(sw, "expected [x, y, heading, speed|null]");
      }
      for (int k = 0; k < 3; ++k) {
        if (!js[k].is_number()) throw SchemaError(sw, "expected [x, y, heading, speed|null]");
      }
      AgentState st;
      const bool frame_valid = f < a.valid.size() && a.valid[f];
      if (frame_valid) {
        st.position = {js[0].get<double>(), js[1].get<double>()};
        st.heading = normalize_angle(js[2].get<double>());
        if (!js[3].is_null()) {
          if (!js[3].is_number()) throw SchemaError(sw, "speed must be number or null");
          st.speed = js[3].get<double>();
        }
      }
      a.states.push_back(st);
    }
    s.agents.push_back(std::move(a));
  }

  validate_scenario(s);
  fill_missing_speeds(s);
  return s;
}

}  // namespace

Scenario load_scenario_from_string(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin, e.what());
  }
  return parse_scenario(root, origin);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError(path.string(), "cannot open for reading");
  std::ostringstream buf;
  buf << f.rdbuf();
  return load_scenario_from_string(buf.str(), path.filename().string());
}

}  // namespace driveaudit
