#include "minipic/bench.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace minipic {

namespace pt = boost::property_tree;

Scale parse_scale(std::string_view text) {
  if (text == "desk") return Scale::Desk;
  if (text == "full") return Scale::Full;
  throw ConfigError("unknown scale '" + std::string(text) + "' (expected desk or full)");
}

namespace {

SpeciesSpec species(std::string name, double charge, double mass, DensityProfile density, double temperature,
                    int ppc) {
  SpeciesSpec s;
  s.name = std::move(name);
  s.charge = charge;
  s.mass = mass;
  s.density = density;
  s.temperature = temperature;
  s.particles_per_cell = ppc;
  return s;
}

constexpr double kIonMass = 1836.0;

SimConfig uniform_plasma(Scale scale) {
  SimConfig c;
  const bool full = scale == Scale::Full;
  c.cells_x = full ? 512 : 128;
  c.cells_y = full ? 1024 : 256;
  c.dx = c.dy = 0.22;
  c.dt = 0.9 * c.dx / std::numbers::sqrt2;
  c.patches_x = c.patches_y = 8;
  c.bin_x_size = 8;
  c.n_iterations = full ? 1500 : 300;
  c.boundary_x = c.boundary_y = Boundary::Periodic;
  c.species = {species("electron", -1.0, 1.0, UniformProfile{1.0}, 100.0, 36),
               species("ion", 1.0, kIonMass, UniformProfile{1.0}, 10.0, 36)};
  return c;
}

SimConfig slab_expansion(Scale scale) {
  SimConfig c;
  c.cells_x = c.cells_y = 64;
  c.dx = c.dy = 0.1;
  c.dt = 0.9 / std::numbers::sqrt2 * c.dx;
  c.patches_x = c.patches_y = 8;
  c.bin_x_size = 1;
  c.n_iterations = scale == Scale::Full ? 2000 : 200;
  c.lb_period = 100;
  c.boundary_x = Boundary::Reflective;
  c.boundary_y = Boundary::Periodic;
  const double lambda = 2.0 * std::numbers::pi;
  const double center = 0.5 * c.cells_x * c.dx;
  const SlabXProfile slab{100.0, center - 0.1 * lambda, center + 0.1 * lambda};
  c.species = {species("electron", -1.0, 1.0, slab, 0.05, 64), species("ion", 1.0, kIonMass, slab, 0.0, 64)};
  return c;
}

template <class T>
T get(const pt::ptree& node, const std::string& section, const std::string& key) {
  try {
    return node.get_value<T>();
  } catch (const pt::ptree_error&) {
    throw ConfigError("bad value '" + node.data() + "' for [" + section + "] " + key);
  }
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  throw ConfigError("unknown key [" + section + "] " + key);
}

void apply_species(SpeciesSpec& s, const std::string& section, const pt::ptree& keys) {
  std::string profile = std::holds_alternative<SlabXProfile>(s.density) ? "slab" : "uniform";
  double n0 = std::visit([](const auto& p) { return p.n0; }, s.density);
  double x_min = 0, x_max = 0;
  if (auto* slab = std::get_if<SlabXProfile>(&s.density)) {
    x_min = slab->x_min;
    x_max = slab->x_max;
  }
  for (const auto& [key, v] : keys) {
    if (key == "charge") s.charge = get<double>(v, section, key);
    else if (key == "mass") s.mass = get<double>(v, section, key);
    else if (key == "temperature") s.temperature = get<double>(v, section, key);
    else if (key == "particles_per_cell") s.particles_per_cell = get<int>(v, section, key);
    else if (key == "density") profile = v.data();
    else if (key == "n0") n0 = get<double>(v, section, key);
    else if (key == "x_min") x_min = get<double>(v, section, key);
    else if (key == "x_max") x_max = get<double>(v, section, key);
    else unknown_key(section, key);
  }
  if (profile == "uniform") s.density = UniformProfile{n0};
  else if (profile == "slab") s.density = SlabXProfile{n0, x_min, x_max};
  else throw ConfigError("unknown density profile '" + profile + "' in [" + section + "]");
}

SimConfig apply_ini(const pt::ptree& tree, SimConfig c) {
  if (auto run = tree.get_child_optional("run")) {
    if (auto name = run->get_optional<std::string>("benchmark")) {
      const Scale scale = parse_scale(run->get<std::string>("scale", "desk"));
      c = builtin_benchmark(*name, scale);
    }
  }
  std::optional<double> dt_cfl;
  bool species_reset = false;
  for (const auto& [section, keys] : tree) {
    if (!keys.data().empty()) throw ConfigError("key '" + section + "' outside of a section");
    if (section.rfind("species.", 0) == 0) {
      const std::string name = section.substr(8);
      if (!species_reset) {
        c.species.clear();
        species_reset = true;
      }
      SpeciesSpec s;
      s.name = name;
      apply_species(s, section, keys);
      c.species.push_back(std::move(s));
      continue;
    }
    for (const auto& [key, v] : keys) {
      if (section == "grid") {
        if (key == "cells_x") c.cells_x = get<int>(v, section, key);
        else if (key == "cells_y") c.cells_y = get<int>(v, section, key);
        else if (key == "dx") c.dx = get<double>(v, section, key);
        else if (key == "dy") c.dy = get<double>(v, section, key);
        else if (key == "dt") c.dt = get<double>(v, section, key);
        else if (key == "dt_cfl") dt_cfl = get<double>(v, section, key);
        else unknown_key(section, key);
      } else if (section == "patches") {
        if (key == "patches_x") c.patches_x = get<int>(v, section, key);
        else if (key == "patches_y") c.patches_y = get<int>(v, section, key);
        else if (key == "bin_x_size") c.bin_x_size = get<int>(v, section, key);
        else unknown_key(section, key);
      } else if (section == "parallel") {
        if (key == "n_collections") c.n_collections = get<int>(v, section, key);
        else if (key == "workers_per_collection") c.workers_per_collection = get<int>(v, section, key);
        else if (key == "mode") {
          try {
            c.mode = parse_mode(v.data());
          } catch (const std::exception& e) {
            throw ConfigError(e.what());
          }
        } else unknown_key(section, key);
      } else if (section == "run") {
        if (key == "benchmark" || key == "scale") continue;
        if (key == "n_iterations") c.n_iterations = get<int>(v, section, key);
        else if (key == "lb_period") c.lb_period = get<int>(v, section, key);
        else if (key == "cell_load") c.cell_load = get<double>(v, section, key);
        else if (key == "rng_seed") c.rng_seed = get<std::uint64_t>(v, section, key);
        else unknown_key(section, key);
      } else if (section == "boundary") {
        try {
          if (key == "x") c.boundary_x = parse_boundary(v.data());
          else if (key == "y") c.boundary_y = parse_boundary(v.data());
          else unknown_key(section, key);
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception& e) {
          throw ConfigError(e.what());
        }
      } else {
        throw ConfigError("unknown section [" + section + "]");
      }
    }
  }
  if (dt_cfl) c.dt = *dt_cfl * courant_limit(c.dx, c.dy);
  return c;
}

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

SimConfig builtin_benchmark(std::string_view name, Scale scale) {
  if (name == "uniform_plasma_2d") return uniform_plasma(scale);
  if (name == "slab_expansion_2d") return slab_expansion(scale);
  throw ConfigError("unknown benchmark '" + std::string(name) + "'");
}

SimConfig parse_config_text(const std::string& text, const SimConfig& base) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return apply_ini(tree, base);
}

SimConfig load_config_file(const std::filesystem::path& path, const SimConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), base);
}

std::string trace_json(const std::vector<TraceEvent>& events) {
  nlohmann::json list = nlohmann::json::array();
  for (const TraceEvent& e : events) {
    list.push_back({{"name", std::string(op_name(e.op))},
                    {"cat", "pic"},
                    {"ph", "X"},
                    {"ts", static_cast<double>(e.start_ns) * 1e-3},
                    {"dur", static_cast<double>(e.end_ns - e.start_ns) * 1e-3},
                    {"pid", e.pid},
                    {"tid", e.tid},
                    {"args", {{"ipatch", e.ipatch}, {"ispec", e.ispec}, {"ibin", e.ibin}}}});
  }
  nlohmann::json doc;
  doc["traceEvents"] = std::move(list);
  return doc.dump();
}

void write_trace(const std::vector<TraceEvent>& events, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file " + path.string());
  out << trace_json(events) << '\n';
  if (!out) throw std::runtime_error("failed writing trace file " + path.string());
}

TimingRow timing_row(const SimulationReport& r) {
  TimingRow row;
  row.mode = r.mode;
  row.n_collections = r.n_collections;
  row.workers = r.workers_per_collection;
  row.bin_x_size = r.bin_x_size;
  row.iterations = r.iterations;
  row.t_particle_ops_s = r.t_particle_ops_s;
  row.t_maxwell_s = r.t_maxwell_s;
  row.t_sync_s = r.t_sync_s;
  row.t_total_s = r.t_total_s;
  return row;
}

std::string format_timing_row(const TimingRow& row) {
  std::ostringstream os;
  os << to_string(row.mode) << ',' << row.n_collections << ',' << row.workers << ',' << row.bin_x_size << ','
     << row.iterations << ',' << fixed6(row.t_particle_ops_s) << ',' << fixed6(row.t_maxwell_s) << ','
     << fixed6(row.t_sync_s) << ',' << fixed6(row.t_total_s);
  return os.str();
}

void append_timing_row(const std::filesystem::path& path, const TimingRow& row) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open timing file " + path.string());
  if (fresh) out << kTimingHeader << '\n';
  out << format_timing_row(row) << '\n';
  if (!out) throw std::runtime_error("failed writing timing file " + path.string());
}

void write_density_histogram(const Domain& domain, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open density file " + path.string());
  out << "species,patch_ix,patch_iy,count\n";
  for (const DensityRow& r : density_histogram(domain))
    out << domain.config().species[r.species].name << ',' << r.patch_ix << ',' << r.patch_iy << ',' << r.count
        << '\n';
  if (!out) throw std::runtime_error("failed writing density file " + path.string());
}

}  // namespace minipic
