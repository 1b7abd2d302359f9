#include "reachcert/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "reachcert/errors.hpp"

namespace reachcert {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path);
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw Error("write failed for " + path);
  }
}

json vec_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

Vec3 vec_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(where + ": expected an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) {
      throw Error(where + ": expected an array of 3 numbers");
    }
    v(i) = j[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

double num_from(const json& j, const std::string& key,
                const std::string& where) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw Error(where + ": missing number field '" + key + "'");
  }
  return j[key].get<double>();
}

json box_json(const Box3& b) {
  return json{{"lo", vec_json(b.lo)}, {"hi", vec_json(b.hi)}};
}

Box3 box_from(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) {
    throw Error(where + ": expected {lo, hi}");
  }
  return Box3{vec_from(j["lo"], where + ".lo"), vec_from(j["hi"], where + ".hi")};
}

// Shortest round-trip decimal form.
void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

Scenario load_scenario(const std::string& path) {
  const json j = parse_file(path);
  Scenario sc;
  if (!j.contains("operating_domain") || !j.contains("target")) {
    throw Error(path + ": scenario needs operating_domain and target");
  }
  sc.X_o = box_from(j["operating_domain"], path + ": operating_domain");
  sc.X_t = box_from(j["target"], path + ": target");
  if (j.contains("obstacles")) {
    if (!j["obstacles"].is_array()) {
      throw Error(path + ": obstacles must be an array");
    }
    for (const json& o : j["obstacles"]) {
      sc.X_u.push_back(box_from(o, path + ": obstacle"));
    }
  }
  sc.p0 = vec_from(j.at("p0"), path + ": p0");
  sc.v0 = vec_from(j.at("v0"), path + ": v0");
  sc.v_max = vec_from(j.at("v_max"), path + ": v_max");
  sc.f_max = num_from(j, "f_max", path);
  sc.a_max = vec_from(j.at("a_max"), path + ": a_max");
  validate(sc);
  return sc;
}

void save_scenario(const std::string& path, const Scenario& sc) {
  json obstacles = json::array();
  for (const Box3& o : sc.X_u) {
    obstacles.push_back(box_json(o));
  }
  write_file(path, json{{"operating_domain", box_json(sc.X_o)},
                        {"obstacles", obstacles},
                        {"target", box_json(sc.X_t)},
                        {"p0", vec_json(sc.p0)},
                        {"v0", vec_json(sc.v0)},
                        {"v_max", vec_json(sc.v_max)},
                        {"f_max", sc.f_max},
                        {"a_max", vec_json(sc.a_max)}});
}

Gains load_gains(const std::string& path) {
  const json j = parse_file(path);
  Gains g;
  g.kp = num_from(j, "kp", path);
  g.kv = num_from(j, "kv", path);
  g.kR = num_from(j, "kR", path);
  g.kw = num_from(j, "kw", path);
  g.gamma1 = num_from(j, "gamma1", path);
  g.gamma2 = num_from(j, "gamma2", path);
  return g;
}

void save_gains(const std::string& path, const Gains& g) {
  write_file(path, json{{"kp", g.kp},
                        {"kv", g.kv},
                        {"kR", g.kR},
                        {"kw", g.kw},
                        {"gamma1", g.gamma1},
                        {"gamma2", g.gamma2}});
}

BoundSet load_bound_set(const std::string& path) {
  const json j = parse_file(path);
  BoundSet b;
  b.mats.c1 = num_from(j, "c1", path);
  b.mats.c2 = num_from(j, "c2", path);
  b.consts.beta = num_from(j, "beta", path);
  b.consts.alpha0 = num_from(j, "alpha0", path);
  b.consts.alpha1 = num_from(j, "alpha1", path);
  b.consts.alpha2 = num_from(j, "alpha2", path);
  b.v2_bar = num_from(j, "vbar2", path);
  b.Lu = num_from(j, "Lu", path);
  b.Lp = num_from(j, "Lp", path);
  b.Lv = num_from(j, "Lv", path);
  b.Lf = num_from(j, "Lf", path);
  b.Fbar = num_from(j, "Fbar", path);
  return b;
}

void save_bound_set(const std::string& path, const BoundSet& b) {
  write_file(path, json{{"c1", b.mats.c1},
                        {"c2", b.mats.c2},
                        {"beta", b.consts.beta},
                        {"alpha0", b.consts.alpha0},
                        {"alpha1", b.consts.alpha1},
                        {"alpha2", b.consts.alpha2},
                        {"vbar2", b.v2_bar},
                        {"Lu", b.Lu},
                        {"Lp", b.Lp},
                        {"Lv", b.Lv},
                        {"Lf", b.Lf},
                        {"Fbar", b.Fbar}});
}

SafeTube load_tube(const std::string& path) {
  const json j = parse_file(path);
  if (!j.is_array() || j.empty()) {
    throw Error(path + ": expected a non-empty array of tube records");
  }
  SafeTube t;
  for (const json& rec : j) {
    if (!rec.contains("waypoint") || !rec.contains("radius")) {
      throw Error(path + ": tube record needs waypoint and radius");
    }
    t.waypoints.push_back(vec_from(rec["waypoint"], path + ": waypoint"));
    t.radii.push_back(vec_from(rec["radius"], path + ": radius"));
  }
  return t;
}

void save_tube(const std::string& path, const SafeTube& t) {
  if (t.waypoints.size() != t.radii.size()) {
    throw DomainError("save_tube: waypoint/radius count mismatch");
  }
  json j = json::array();
  for (std::size_t i = 0; i < t.waypoints.size(); ++i) {
    j.push_back(json{{"waypoint", vec_json(t.waypoints[i])},
                     {"radius", vec_json(t.radii[i])}});
  }
  write_file(path, j);
}

PiecewiseBezier load_curve(const std::string& path) {
  const json j = parse_file(path);
  if (!j.contains("segments") || !j["segments"].is_array() ||
      j["segments"].empty()) {
    throw Error(path + ": expected {segments:[...]}");
  }
  PiecewiseBezier c;
  c.degree = -1;
  for (const json& seg : j["segments"]) {
    c.durations.push_back(num_from(seg, "duration", path));
    if (!seg.contains("control_points") || !seg["control_points"].is_array()) {
      throw Error(path + ": segment needs control_points");
    }
    const json& pts = seg["control_points"];
    if (c.degree < 0) {
      c.degree = static_cast<int>(pts.size()) - 1;
    }
    if (static_cast<int>(pts.size()) != c.degree + 1) {
      throw Error(path + ": segments disagree on control point count");
    }
    Eigen::Matrix3Xd m(3, c.degree + 1);
    for (int k = 0; k <= c.degree; ++k) {
      m.col(k) = vec_from(pts[static_cast<std::size_t>(k)],
                          path + ": control point");
    }
    c.control_points.push_back(m);
  }
  validate(c);
  return c;
}

void save_curve(const std::string& path, const PiecewiseBezier& c) {
  validate(c);
  json segments = json::array();
  for (std::size_t s = 0; s < c.control_points.size(); ++s) {
    json pts = json::array();
    for (int k = 0; k <= c.degree; ++k) {
      pts.push_back(vec_json(c.control_points[s].col(k)));
    }
    segments.push_back(json{{"duration", c.durations[s]},
                            {"control_points", pts}});
  }
  write_file(path, json{{"segments", segments}});
}

void save_trace_csv(const std::string& path, const SimulationTrace& trace) {
  std::string out =
      "t,px,py,pz,vx,vy,vz,r11,r12,r13,r21,r22,r23,r31,r32,r33,"
      "wx,wy,wz,ep,ev,V1,V2,V,f,Fd3\n";
  for (const TraceSample& s : trace.samples) {
    const double cols[] = {s.t,
                           s.x.p(0),
                           s.x.p(1),
                           s.x.p(2),
                           s.x.v(0),
                           s.x.v(1),
                           s.x.v(2),
                           s.x.R(0, 0),
                           s.x.R(0, 1),
                           s.x.R(0, 2),
                           s.x.R(1, 0),
                           s.x.R(1, 1),
                           s.x.R(1, 2),
                           s.x.R(2, 0),
                           s.x.R(2, 1),
                           s.x.R(2, 2),
                           s.x.w(0),
                           s.x.w(1),
                           s.x.w(2),
                           s.e.e_p.norm(),
                           s.e.e_v.norm(),
                           s.V1,
                           s.V2,
                           s.V,
                           s.f,
                           s.Fd3};
    bool first = true;
    for (double v : cols) {
      if (!first) {
        out.push_back(',');
      }
      append_double(out, v);
      first = false;
    }
    out.push_back('\n');
  }
  std::ofstream f(path);
  if (!f) {
    throw Error("cannot write " + path);
  }
  f << out;
  if (!f) {
    throw Error("write failed for " + path);
  }
}

std::vector<TraceRow> load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(path + ": empty trace file");
  }
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    double cols[26];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 26; ++i) {
      if (i > 0) {
        if (p >= end || *p != ',') {
          throw Error(path + ": malformed trace row");
        }
        ++p;
      }
      const auto res = std::from_chars(p, end, cols[i]);
      if (res.ec != std::errc()) {
        throw Error(path + ": malformed trace row");
      }
      p = res.ptr;
    }
    TraceRow r;
    r.t = cols[0];
    r.x.p = Vec3(cols[1], cols[2], cols[3]);
    r.x.v = Vec3(cols[4], cols[5], cols[6]);
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) {
        r.x.R(i, k) = cols[7 + 3 * i + k];
      }
    }
    r.x.w = Vec3(cols[16], cols[17], cols[18]);
    r.ep = cols[19];
    r.ev = cols[20];
    r.V1 = cols[21];
    r.V2 = cols[22];
    r.V = cols[23];
    r.f = cols[24];
    r.Fd3 = cols[25];
    rows.push_back(r);
  }
  return rows;
}

}  // namespace reachcert
