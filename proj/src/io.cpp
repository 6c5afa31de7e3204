#include "mobius/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "mobius/errors.hpp"

namespace mobius::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const VortexSystem& s) {
  json arr = json::array();
  for (const auto& v : s)
    arr.push_back({{"x", v.position.x},
                   {"y", v.position.y},
                   {"gamma", v.strength},
                   {"label", v.label}});
  return json{{"vortices", arr}};
}

namespace {

double number_field(const json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError("vortex " + std::to_string(index) + " is missing '" + key + "'");
  if (!it->is_number())
    throw ValidationError("vortex " + std::to_string(index) + " field '" + key +
                          "' must be a number");
  return it->get<double>();
}

}  // namespace

VortexSystem system_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("system JSON must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "vortices") throw ValidationError("unknown key '" + key + "' in system JSON");
  auto it = j.find("vortices");
  if (it == j.end() || !it->is_array())
    throw ValidationError("system JSON needs a 'vortices' array");
  static const std::set<std::string> allowed{"x", "y", "gamma", "label"};
  std::vector<Vortex> vs;
  std::size_t i = 0;
  for (const auto& item : *it) {
    if (!item.is_object())
      throw ValidationError("vortex " + std::to_string(i) + " must be an object");
    for (const auto& [key, _] : item.items())
      if (!allowed.count(key))
        throw ValidationError("unknown key '" + key + "' in vortex " + std::to_string(i));
    Vortex v;
    v.position.x = number_field(item, "x", i);
    v.position.y = number_field(item, "y", i);
    v.strength = number_field(item, "gamma", i);
    if (auto l = item.find("label"); l != item.end()) {
      if (!l->is_string())
        throw ValidationError("vortex " + std::to_string(i) + " label must be a string");
      v.label = l->get<std::string>();
    }
    vs.push_back(std::move(v));
    ++i;
  }
  return VortexSystem(std::move(vs));
}

VortexSystem parse_system(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed system JSON: ") + e.what());
  }
  return system_from_json(j);
}

VortexSystem read_system(const std::filesystem::path& path) {
  return parse_system(read_file(path));
}

json to_json(const Diagnostics& d) {
  return json{{"h0", d.h0},
              {"phi0", d.phi0},
              {"max_rel_h_drift", d.max_rel_h_drift},
              {"max_abs_h_drift", d.max_abs_h_drift},
              {"max_abs_phi_drift", d.max_abs_phi_drift},
              {"steps", d.steps},
              {"evaluations", d.evaluations}};
}

json to_json(const EquilibriumResult& r) {
  return json{{"kind", to_string(r.kind)},
              {"drift_velocity", r.drift_velocity},
              {"residual", r.residual},
              {"vortices", to_json(r.system)["vortices"]}};
}

json to_json(const ReducedParams& p) {
  return json{{"gamma1", p.gamma1}, {"gamma2", p.gamma2}, {"c", p.c}};
}

json to_json(const CriticalReport& r) {
  auto points = [](const std::vector<CriticalPoint>& v) {
    json arr = json::array();
    for (const auto& c : v)
      arr.push_back({{"dx", c.state.dx},
                     {"y1", c.state.y1},
                     {"kind", to_string(c.kind)},
                     {"hamiltonian", c.hamiltonian}});
    return arr;
  };
  json sing = json::array();
  for (const auto& s : r.singular)
    sing.push_back({{"dx", s.state.dx},
                    {"y1", s.state.y1},
                    {"limit", s.sign > 0 ? "+inf" : "-inf"}});
  return json{{"params", to_json(r.params)},
              {"scan_bound", r.scan_bound},
              {"dx_zero", points(r.on_zero)},
              {"dx_pi", points(r.on_pi)},
              {"singular", sing},
              {"pi_line_singular", r.pi_line_singular}};
}

json to_json(const OrbitReport& r) {
  return json{{"orbit_type", to_string(r.type)},
              {"period", r.period},
              {"winding1", r.winding1},
              {"winding2", r.winding2},
              {"co_rotating", r.co_rotating},
              {"dx_advance", r.dx_advance},
              {"energy_drift", r.energy_drift},
              {"closure", r.closure},
              {"dx_min", r.dx_min},
              {"dx_max", r.dx_max}};
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += columns[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const auto* d = std::get_if<double>(&row[i]))
        out += format_double(*d);
      else
        out += std::get<std::string>(row[i]);
    }
    out += '\n';
  }
  return out;
}

json Table::to_json() const {
  json arr = json::array();
  for (const auto& row : rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (const auto* d = std::get_if<double>(&row[i]))
        obj[columns[i]] = std::isfinite(*d) ? json(*d) : json(nullptr);
      else
        obj[columns[i]] = std::get<std::string>(row[i]);
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

Table trajectory_table(const Trajectory& traj) {
  Table t{{"t", "label", "x", "y", "gamma"}, {}};
  for (const auto& s : traj.samples)
    for (const auto& v : s.system)
      t.rows.push_back({s.t, v.label, v.position.x, v.position.y, v.strength});
  return t;
}

Table flips_table(const Trajectory& traj) {
  Table t{{"t", "label"}, {}};
  for (const auto& e : traj.flip_events) t.rows.push_back({e.t, e.label});
  return t;
}

Table portrait_table(const Portrait& p) {
  Table t{{"dx", "y1", "H"}, {}};
  for (std::size_t j = 0; j < p.grid.ny; ++j)
    for (std::size_t i = 0; i < p.grid.nx; ++i)
      t.rows.push_back({p.dx_at(i), p.y_at(j), p.at(i, j)});
  return t;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read '" + path.string() + "'");
  return ss.str();
}

void write_all(const std::vector<std::pair<std::filesystem::path, std::string>>& files) {
  std::vector<std::filesystem::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) std::filesystem::remove(t, ec);
  };
  for (const auto& [path, content] : files) {
    auto tmp = path;
    tmp += ".partial";
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      cleanup();
      throw IoError("cannot write '" + path.string() + "'");
    }
    temps.push_back(tmp);
    out << content;
    out.close();
    if (!out) {
      cleanup();
      throw IoError("cannot write '" + path.string() + "'");
    }
  }
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    std::filesystem::rename(temps[i], files[i].first, ec);
    if (ec) {
      cleanup();
      throw IoError("cannot move output into '" + files[i].first.string() + "'");
    }
  }
}

}  // namespace mobius::io
