#include "mobius/cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "mobius/dynamics.hpp"
#include "mobius/equilibria.hpp"
#include "mobius/errors.hpp"
#include "mobius/integrator.hpp"
#include "mobius/io.hpp"
#include "mobius/reduced.hpp"
#include "mobius/verify.hpp"

namespace mobius::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

struct Global {
  std::string out = ".";
  std::string format = "csv";
  std::optional<double> tol;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// Files produced by a command, held in memory until the command succeeds.
struct Result {
  std::vector<std::pair<std::string, std::string>> files;
  std::string summary;
  int code = kOk;

  void add_json(const std::string& name, const json& j) { files.emplace_back(name, io::dump(j)); }
  void add_table(const std::string& stem, const io::Table& t, const std::string& format) {
    if (format == "json")
      files.emplace_back(stem + ".json", io::dump(t.to_json()));
    else
      files.emplace_back(stem + ".csv", t.to_csv());
  }
};

std::pair<std::size_t, std::size_t> parse_grid(const std::string& s) {
  auto pos = s.find('x');
  try {
    if (pos == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    auto nx = std::stoul(s.substr(0, pos), &used);
    if (used != pos) throw std::invalid_argument(s);
    auto rest = s.substr(pos + 1);
    auto ny = std::stoul(rest, &used);
    if (used != rest.size() || nx < 2 || ny < 2) throw std::invalid_argument(s);
    return {nx, ny};
  } catch (const std::logic_error&) {
    throw ValidationError("grid must look like NXxNY with both at least 2, got '" + s + "'");
  }
}

void check_range(const std::vector<double>& r, const char* name) {
  if (r.size() != 2 || !(r[0] < r[1]))
    throw ValidationError(std::string(name) + " must be two increasing numbers");
}

// simulate ----------------------------------------------------------------

struct SimulateArgs {
  std::string system;
  double t_end = 10.0;
  double dt = 0.1;
  double max_step = std::numeric_limits<double>::infinity();
  double collision_radius = kDefaultCollisionRadius;
};

Result simulate(const SimulateArgs& a, const Global& g) {
  auto s0 = io::read_system(a.system);
  IntegratorConfig cfg;
  cfg.rel_tol = cfg.abs_tol = g.tol.value_or(1e-10);
  cfg.t_end = a.t_end;
  cfg.sample_dt = a.dt;
  cfg.max_step = a.max_step;
  cfg.collision_radius = a.collision_radius;
  auto traj = integrate(s0, cfg);
  Result r;
  r.add_table("trajectory", io::trajectory_table(traj), g.format);
  r.add_table("flips", io::flips_table(traj), g.format);
  r.add_json("diagnostics.json", io::to_json(traj.diagnostics));
  r.add_json("final.json", io::to_json(traj.samples.back().system));
  return r;
}

// equilibria --------------------------------------------------------------

struct FixedArgs {
  double g1 = 2.0;
  double g2 = 1.0;
  double x = 0.0;
};

void require_kind(const EquilibriumResult& res, EquilibriumKind kind, double threshold) {
  if (res.kind != kind)
    throw ConvergenceError(std::string("configuration is not a ") + to_string(kind) +
                           " equilibrium within " + io::format_double(threshold) +
                           " (residual " + io::format_double(res.residual) + ")");
}

Result equilibria_fixed(const FixedArgs& a, const Global& g) {
  const double thr = g.tol.value_or(1e-10);
  json branches = json::array();
  for (const auto& pair : fixed_equilibrium_two(a.g1, a.g2)) {
    auto res = verify_relative_equilibrium(fixed_pair_system(a.g1, a.g2, pair, a.x), thr);
    require_kind(res, EquilibriumKind::fixed, thr);
    branches.push_back({{"y1", pair.y1},
                        {"y2", pair.y2},
                        {"momentum", pair.momentum},
                        {"result", io::to_json(res)}});
  }
  Result r;
  r.add_json("fixed.json", json{{"gamma1", a.g1}, {"gamma2", a.g2}, {"branches", branches}});
  return r;
}

struct EquatorialArgs {
  std::vector<double> strengths;
  std::vector<double> guess;
  int starts = 0;
};

json to_json(const EquatorialResult& e) {
  return json{{"x", e.x},
              {"strengths", e.strengths},
              {"residual", e.residual},
              {"iterations", e.iterations},
              {"vortices", io::to_json(e.system())["vortices"]}};
}

Result equilibria_equatorial(const EquatorialArgs& a, const Global& g) {
  const double thr = g.tol.value_or(1e-10);
  std::vector<EquatorialResult> found;
  if (a.starts > 0) {
    found = equatorial_scan(a.strengths, a.starts, g.seed);
  } else {
    auto guess = a.guess;
    if (guess.empty())
      for (std::size_t i = 1; i < a.strengths.size(); ++i)
        guess.push_back(kPi * static_cast<double>(i) / static_cast<double>(a.strengths.size()));
    found.push_back(equatorial_equilibrium(a.strengths, guess));
  }
  json arr = json::array();
  for (const auto& e : found) {
    if (!(e.residual <= thr))
      throw ConvergenceError("equatorial residual " + io::format_double(e.residual) +
                             " exceeds " + io::format_double(thr));
    arr.push_back(to_json(e));
  }
  Result r;
  r.add_json("equatorial.json", json{{"solutions", arr}});
  return r;
}

struct NRingArgs {
  int n = 3;
  double y = 1.0;
  double gamma = 1.0;
};

Result equilibria_nring(const NRingArgs& a, const Global& g) {
  const double thr = g.tol.value_or(1e-10);
  NRingSpec ring{a.n, a.gamma, a.y};
  auto s = nring(ring);
  const double xi = nring_velocity_analytic(ring);
  auto res = verify_relative_equilibrium(s, thr);
  if (res.kind == EquilibriumKind::none)
    throw ConvergenceError("ring is not rigid within " + io::format_double(thr));
  if (std::abs(res.drift_velocity - xi) > thr)
    throw ConvergenceError("ring drift " + io::format_double(res.drift_velocity) +
                           " differs from the closed form " + io::format_double(xi));
  Result r;
  r.add_json("nring.json", json{{"n", a.n},
                                {"gamma", a.gamma},
                                {"y", a.y},
                                {"xi", xi},
                                {"result", io::to_json(res)}});
  return r;
}

// reduced -----------------------------------------------------------------

struct CriticalArgs {
  ReducedParams p;
};

Result reduced_critical(const CriticalArgs& a, const Global&) {
  a.p.validate();
  Result r;
  r.add_json("critical.json", io::to_json(critical_points(a.p)));
  return r;
}

struct OrbitArgs {
  ReducedParams p;
  double dx = 0.0;
  double y1 = 0.0;
  double t_max = 1e5;
  std::size_t samples = 1000;
};

Result reduced_orbit(const OrbitArgs& a, const Global& g) {
  a.p.validate();
  OrbitOptions opts;
  opts.rel_tol = opts.abs_tol = g.tol.value_or(1e-12);
  opts.t_max = a.t_max;
  ReducedState st{a.dx, a.y1};
  auto rep = classify_orbit(st, a.p, opts);
  Result r;
  json j = io::to_json(rep);
  j["params"] = io::to_json(a.p);
  j["start"] = {{"dx", a.dx}, {"y1", a.y1}};
  r.add_json("orbit.json", j);
  if (a.samples > 0) {
    auto rows = reduced_orbit_samples(st, a.p, rep.period,
                                      rep.period / static_cast<double>(a.samples), opts);
    io::Table t{{"t", "dx", "y1"}, {}};
    for (const auto& row : rows) t.rows.push_back({row[0], row[1], row[2]});
    r.add_table("orbit_samples", t, g.format);
  }
  return r;
}

struct ScanArgs {
  std::vector<double> g1{2.0};
  std::vector<double> g2{1.0};
  std::vector<double> c{0.0};
  std::string grid = "200x200";
  std::vector<double> dx_range{-kPi, kPi};
  std::vector<double> y_range{-5.0, 5.0};
  double mask = 1e-3;
};

Result reduced_scan(const ScanArgs& a, const Global& g) {
  PortraitGrid grid;
  std::tie(grid.nx, grid.ny) = parse_grid(a.grid);
  check_range(a.dx_range, "--dx-range");
  check_range(a.y_range, "--y-range");
  grid.dx_min = a.dx_range[0];
  grid.dx_max = a.dx_range[1];
  grid.y_min = a.y_range[0];
  grid.y_max = a.y_range[1];
  grid.mask_radius = a.mask;
  std::vector<ReducedParams> ps;
  for (double g1 : a.g1)
    for (double g2 : a.g2)
      for (double c : a.c) {
        ReducedParams p{g1, g2, c};
        p.validate();
        ps.push_back(p);
      }
  Result r;
  json entries = json::array();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto portrait = phase_portrait(ps[i], grid, g.threads);
    std::string stem = ps.size() == 1 ? "portrait" : "portrait_" + std::to_string(i);
    r.add_table(stem, io::portrait_table(portrait), g.format);
    entries.push_back({{"file", stem + (g.format == "json" ? ".json" : ".csv")},
                       {"params", io::to_json(ps[i])},
                       {"critical", io::to_json(portrait.critical)}});
  }
  json meta{{"grid",
             {{"nx", grid.nx},
              {"ny", grid.ny},
              {"dx_min", grid.dx_min},
              {"dx_max", grid.dx_max},
              {"y_min", grid.y_min},
              {"y_max", grid.y_max},
              {"mask_radius", grid.mask_radius}}},
            {"entries", entries}};
  r.add_json("scan.json", meta);
  return r;
}

// streamfield -------------------------------------------------------------

struct StreamArgs {
  std::string system;
  std::string grid = "200x200";
  std::vector<double> y_range{-3.0, 3.0};
  double mask = 1e-3;
};

Result streamfield(const StreamArgs& a, const Global& g) {
  auto s = io::read_system(a.system);
  auto [nx, ny] = parse_grid(a.grid);
  check_range(a.y_range, "--y-range");
  io::Table t{{"x", "y", "psi"}, {}};
  for (std::size_t j = 0; j < ny; ++j) {
    const double y = a.y_range[0] + (a.y_range[1] - a.y_range[0]) * static_cast<double>(j) /
                                        static_cast<double>(ny - 1);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = kPi * static_cast<double>(i) / static_cast<double>(nx);
      double psi = std::numeric_limits<double>::quiet_NaN();
      try {
        psi = stream_function({x, y}, s, a.mask);
      } catch (const CollisionError&) {
      }
      t.rows.push_back({x, y, psi});
    }
  }
  Result r;
  r.add_table("streamfield", t, g.format);
  return r;
}

// verify ------------------------------------------------------------------

Result verify(bool mutate, const Global& g) {
  VerifyOptions opts;
  opts.seed = g.seed;
  opts.tol_scale = g.tol.value_or(1.0);
  if (!(opts.tol_scale > 0.0)) throw ValidationError("--tol must be positive");
  opts.mutate_ring_constant = mutate;
  auto checks = run_property_suite(opts);
  bool all = true;
  json arr = json::array();
  for (const auto& c : checks) {
    all = all && c.passed;
    arr.push_back({{"name", c.name},
                   {"passed", c.passed},
                   {"measured", c.measured},
                   {"threshold", c.threshold}});
  }
  json j{{"seed", opts.seed}, {"tol_scale", opts.tol_scale}, {"passed", all}, {"checks", arr}};
  Result r;
  r.add_json("verify.json", j);
  r.summary = io::dump(j);
  r.code = all ? kOk : kVerifyFailed;
  return r;
}

void commit(const Result& r, const Global& g) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + g.out + "': " + ec.message());
  std::vector<std::pair<fs::path, std::string>> files;
  for (const auto& [name, content] : r.files) files.emplace_back(dir / name, content);
  io::write_all(files);
}

void add_reduced_params(CLI::App* app, ReducedParams& p) {
  app->add_option("--g1", p.gamma1, "strength of the first vortex")->capture_default_str();
  app->add_option("--g2", p.gamma2, "strength of the second vortex")->capture_default_str();
  app->add_option("--c", p.c, "momentum g1*y1 + g2*y2")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Point vortices on the Moebius band", "mobius"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "TOML file supplying any option");
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--format", g.format, "table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--tol", g.tol,
                 "integrator tolerance, residual threshold, or threshold scale for verify");
  app.add_option("--seed", g.seed, "seed for randomized runs")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads, 0 for all cores");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "integrate a system and write its trajectory");
  c_sim->add_option("--system", sim.system, "system JSON")->required();
  c_sim->add_option("--t-end", sim.t_end, "final time, negative for backward")
      ->capture_default_str();
  c_sim->add_option("--dt", sim.dt, "sample spacing")->capture_default_str();
  c_sim->add_option("--max-step", sim.max_step, "largest integrator step");
  c_sim->add_option("--collision-radius", sim.collision_radius)->capture_default_str();

  auto* c_eq = app.add_subcommand("equilibria", "closed-form and numerical equilibria");
  c_eq->require_subcommand(1);
  FixedArgs fixed;
  auto* c_fixed = c_eq->add_subcommand("fixed", "two-vortex fixed equilibria");
  c_fixed->add_option("--g1", fixed.g1)->capture_default_str();
  c_fixed->add_option("--g2", fixed.g2)->capture_default_str();
  c_fixed->add_option("--x", fixed.x, "common abscissa")->capture_default_str();
  EquatorialArgs eqt;
  auto* c_eqt = c_eq->add_subcommand("equatorial", "equilibria on the line y = 0");
  c_eqt->add_option("--strengths", eqt.strengths, "comma separated strengths")
      ->required()
      ->delimiter(',');
  c_eqt->add_option("--guess", eqt.guess, "initial x2..xN")->delimiter(',');
  c_eqt->add_option("--starts", eqt.starts, "random restarts drawn from --seed");
  NRingArgs ring;
  auto* c_ring = c_eq->add_subcommand("nring", "regular ring of N equal vortices");
  c_ring->add_option("--n", ring.n)->capture_default_str();
  c_ring->add_option("--y", ring.y)->capture_default_str();
  c_ring->add_option("--gamma", ring.gamma)->capture_default_str();

  auto* c_red = app.add_subcommand("reduced", "reduced two-vortex system");
  c_red->require_subcommand(1);
  CriticalArgs crit;
  auto* c_crit = c_red->add_subcommand("critical", "critical points on dx = 0 and dx = pi");
  add_reduced_params(c_crit, crit.p);
  OrbitArgs orbit;
  auto* c_orbit = c_red->add_subcommand("orbit", "classify the orbit through a state");
  add_reduced_params(c_orbit, orbit.p);
  c_orbit->add_option("--dx", orbit.dx)->required();
  c_orbit->add_option("--y1", orbit.y1)->required();
  c_orbit->add_option("--t-max", orbit.t_max, "give up after this time")->capture_default_str();
  c_orbit->add_option("--samples", orbit.samples, "rows in the orbit table, 0 for none")
      ->capture_default_str();
  ScanArgs scan;
  auto* c_scan = c_red->add_subcommand("scan", "level sets of H on a grid");
  c_scan->add_option("--g1", scan.g1, "one value or a comma list")->delimiter(',');
  c_scan->add_option("--g2", scan.g2, "one value or a comma list")->delimiter(',');
  c_scan->add_option("--c", scan.c, "one value or a comma list")->delimiter(',');
  c_scan->add_option("--grid", scan.grid, "NXxNY")->capture_default_str();
  c_scan->add_option("--dx-range", scan.dx_range)->delimiter(',');
  c_scan->add_option("--y-range", scan.y_range)->delimiter(',');
  c_scan->add_option("--mask", scan.mask, "mask radius around singular points")
      ->capture_default_str();

  StreamArgs stream;
  auto* c_stream = app.add_subcommand("streamfield", "stream function on a grid");
  c_stream->add_option("--system", stream.system, "system JSON")->required();
  c_stream->add_option("--grid", stream.grid, "NXxNY")->capture_default_str();
  c_stream->add_option("--y-range", stream.y_range)->delimiter(',');
  c_stream->add_option("--mask", stream.mask, "mask radius around vortices")
      ->capture_default_str();

  bool mutate = false;
  auto* c_verify = app.add_subcommand("verify", "run the invariant suite");
  c_verify->add_flag("--mutate-ring", mutate)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    Result r;
    if (c_sim->parsed())
      r = simulate(sim, g);
    else if (c_fixed->parsed())
      r = equilibria_fixed(fixed, g);
    else if (c_eqt->parsed())
      r = equilibria_equatorial(eqt, g);
    else if (c_ring->parsed())
      r = equilibria_nring(ring, g);
    else if (c_crit->parsed())
      r = reduced_critical(crit, g);
    else if (c_orbit->parsed())
      r = reduced_orbit(orbit, g);
    else if (c_scan->parsed())
      r = reduced_scan(scan, g);
    else if (c_stream->parsed())
      r = streamfield(stream, g);
    else
      r = verify(mutate, g);
    commit(r, g);
    if (!r.summary.empty())
      out << r.summary << '\n';
    else
      for (const auto& f : r.files) out << (fs::path(g.out) / f.first).string() << '\n';
    return r.code;
  } catch (const CollisionError& e) {
    err << "collision: " << e.what() << '\n';
    return kCollision;
  } catch (const ConvergenceError& e) {
    err << "convergence: " << e.what() << '\n';
    return kConvergence;
  } catch (const IoError& e) {
    err << "i/o: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace mobius::cli
