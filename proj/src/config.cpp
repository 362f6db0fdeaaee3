// SPDX-License-Identifier: Apache-2.0
#include "pedrad/config.hpp"

#include <functional>
#include <optional>

#include "pedrad/error.hpp"
#include "pedrad/text_io.hpp"

namespace pedrad {
namespace {

struct Ctx {
  RunConfig& cfg;
  std::string where;
  const std::filesystem::path& base;
  std::optional<double> permittivity;
  std::optional<double> conductivity;
};

[[noreturn]] void bad(const Ctx& c, const std::string& msg) { throw ConfigError(c.where + ": " + msg); }

double as_double(const Ctx& c, const std::string& v) {
  double out = 0.0;
  if (!text::parse_double(v, out) || !std::isfinite(out)) bad(c, "expected a number, got '" + v + "'");
  return out;
}

double as_positive(const Ctx& c, const std::string& v) {
  const double out = as_double(c, v);
  if (!(out > 0.0)) bad(c, "value must be positive");
  return out;
}

std::size_t as_size(const Ctx& c, const std::string& v) {
  long long out = 0;
  if (!text::parse_int(v, out) || out < 0) bad(c, "expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(out);
}

bool as_bool(const Ctx& c, const std::string& v) {
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  bad(c, "expected a boolean, got '" + v + "'");
}

std::vector<std::string> as_list(const std::string& v) {
  std::vector<std::string> out;
  for (const auto item : text::split(v, ',')) {
    const auto t = text::trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::vector<std::size_t> as_size_list(const Ctx& c, const std::string& v) {
  std::vector<std::size_t> out;
  for (const auto& item : as_list(v)) out.push_back(as_size(c, item));
  if (out.empty()) bad(c, "empty list");
  return out;
}

Vec3 as_vec3(const Ctx& c, const std::string& v) {
  const auto items = as_list(v);
  if (items.size() != 3) bad(c, "expected three comma-separated numbers");
  return Vec3(as_double(c, items[0]), as_double(c, items[1]), as_double(c, items[2]));
}

std::string as_path(const Ctx& c, const std::string& v) {
  if (v.empty()) return v;
  const std::filesystem::path p(v);
  if (p.is_absolute() || c.base.empty()) return v;
  return (c.base / p).lexically_normal().string();
}

template <typename Fn>
auto wrap(const Ctx& c, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    bad(c, e.what());
  }
}

using Setter = std::function<void(Ctx&, const std::string&)>;

struct KeyDef {
  ConfigKeyInfo info;
  Setter set;
};

const std::vector<KeyDef>& registry() {
  static const std::vector<KeyDef> keys = {
      {{"paths", "mesh_pattern", "", "printf pattern or directory of OBJ frames (frame_%04d.obj)"},
       [](Ctx& c, const std::string& v) { c.cfg.paths.mesh_pattern = as_path(c, v); }},
      {{"paths", "marker_file", "", "marker track CSV (time,<name>_x,<name>_y,<name>_z,...)"},
       [](Ctx& c, const std::string& v) { c.cfg.paths.marker_file = as_path(c, v); }},
      {{"paths", "output_dir", "out", "directory receiving every output"},
       [](Ctx& c, const std::string& v) { c.cfg.paths.output_dir = as_path(c, v); }},
      {{"paths", "rcs_file", "", "RCS CSV read by estimate/sweep (default <output_dir>/rcs.csv)"},
       [](Ctx& c, const std::string& v) { c.cfg.paths.rcs_file = as_path(c, v); }},
      {{"paths", "coefficients_file", "", "coefficients CSV read by synth (default <output_dir>/coefficients.csv)"},
       [](Ctx& c, const std::string& v) { c.cfg.paths.coefficients_file = as_path(c, v); }},
      {{"paths", "cube_dir", "", "directory of cube_NNNN.rdc files read by signature (default <output_dir>/cubes)"},
       [](Ctx& c, const std::string& v) { c.cfg.paths.cube_dir = as_path(c, v); }},
      {{"paths", "reference_cube", "", "measured RDC1 cube compared against the simulation (optional)"},
       [](Ctx& c, const std::string& v) { c.cfg.paths.reference_cube = as_path(c, v); }},

      {{"scene", "mesh_frame_rate_hz", "60", "frame rate of the mesh sequence"},
       [](Ctx& c, const std::string& v) { c.cfg.scene.mesh_frame_rate_hz = as_positive(c, v); }},
      {{"scene", "radar_position", "0,0,0.65", "radar position x,y,z in meters"},
       [](Ctx& c, const std::string& v) { c.cfg.scene.radar_position = as_vec3(c, v); }},

      {{"radar", "carrier_hz", "77e9", "carrier frequency f_c"},
       [](Ctx& c, const std::string& v) { c.cfg.radar.carrier_hz = as_positive(c, v); }},
      {{"radar", "bandwidth_hz", "2e9", "sweep bandwidth BW"},
       [](Ctx& c, const std::string& v) { c.cfg.radar.bandwidth_hz = as_positive(c, v); }},
      {{"radar", "sample_rate_hz", "10e6", "fast-time sampling frequency f_s"},
       [](Ctx& c, const std::string& v) { c.cfg.radar.sample_rate_hz = as_positive(c, v); }},
      {{"radar", "upchirp_s", "51.2e-6", "up-chirp duration"},
       [](Ctx& c, const std::string& v) { c.cfg.radar.upchirp_s = as_positive(c, v); }},
      {{"radar", "pri_s", "61.2e-6", "pulse repetition interval"},
       [](Ctx& c, const std::string& v) { c.cfg.radar.pri_s = as_positive(c, v); }},
      {{"radar", "chirps_per_cpi", "1024", "chirps per coherent processing interval (P)"},
       [](Ctx& c, const std::string& v) { c.cfg.radar.chirps_per_cpi = as_size(c, v); }},
      {{"radar", "cpis", "2", "CPIs per estimation block (L)"},
       [](Ctx& c, const std::string& v) { c.cfg.radar.cpis = as_size(c, v); }},

      {{"material", "preset", "skin_77ghz", "skin_77ghz, skin_24ghz, pec or custom"},
       [](Ctx& c, const std::string& v) {
         if (v != "skin_77ghz" && v != "skin_24ghz" && v != "pec" && v != "custom") bad(c, "unknown preset '" + v + "'");
         c.cfg.material.preset = v;
       }},
      {{"material", "permittivity", "", "relative permittivity for the custom preset"},
       [](Ctx& c, const std::string& v) { c.permittivity = as_positive(c, v); }},
      {{"material", "conductivity", "", "conductivity in S/m for the custom preset"},
       [](Ctx& c, const std::string& v) {
         const double s = as_double(c, v);
         if (s < 0.0) bad(c, "conductivity must be non-negative");
         c.conductivity = s;
       }},

      {{"aspect", "incident_azimuth_deg", "0", "azimuth from the target toward the transmitter"},
       [](Ctx& c, const std::string& v) { c.cfg.aspect.aspect.incident_azimuth_deg = as_double(c, v); }},
      {{"aspect", "scattered_azimuth_deg", "0", "azimuth from the target toward the receiver"},
       [](Ctx& c, const std::string& v) { c.cfg.aspect.aspect.scattered_azimuth_deg = as_double(c, v); }},
      {{"aspect", "pairs", "vv,hh", "polarization pairs to trace (receive then transmit letter)"},
       [](Ctx& c, const std::string& v) {
         c.cfg.aspect.pairs.clear();
         for (const auto& p : as_list(v)) c.cfg.aspect.pairs.push_back(wrap(c, [&] { return parse_polarization_pair(p); }));
         if (c.cfg.aspect.pairs.empty()) bad(c, "no polarization pairs");
       }},
      {{"aspect", "max_bounces", "3", "maximum reflections per ray"},
       [](Ctx& c, const std::string& v) { c.cfg.aspect.aspect.max_bounces = static_cast<int>(as_size(c, v)); }},
      {{"aspect", "ray_spacing_m", "0", "ray-grid pitch; 0 selects wavelength/10"},
       [](Ctx& c, const std::string& v) {
         const double s = as_double(c, v);
         if (s < 0.0) bad(c, "ray spacing must be non-negative");
         c.cfg.aspect.aspect.ray_spacing = s;
       }},
      {{"aspect", "coarse_mode", "false", "allow ray spacing above wavelength/10"},
       [](Ctx& c, const std::string& v) { c.cfg.aspect.aspect.coarse_mode = as_bool(c, v); }},
      {{"aspect", "bistatic_sweep", "false", "rcs also writes a 0..359 deg bistatic sweep of the first frame"},
       [](Ctx& c, const std::string& v) { c.cfg.aspect.bistatic_sweep = as_bool(c, v); }},
      {{"aspect", "bistatic_step_deg", "1", "azimuth step of the bistatic sweep"},
       [](Ctx& c, const std::string& v) { c.cfg.aspect.bistatic_step_deg = as_positive(c, v); }},

      {{"estimation", "stride", "80", "PRI stride between regression rows (M)"},
       [](Ctx& c, const std::string& v) { c.cfg.estimation.stride = as_size(c, v); }},
      {{"estimation", "pair", "vv", "polarization pair whose RCS drives the regression"},
       [](Ctx& c, const std::string& v) { c.cfg.estimation.pair = wrap(c, [&] { return parse_polarization_pair(v); }); }},
      {{"estimation", "strict", "true", "reject blocks with fewer rows than scatterers"},
       [](Ctx& c, const std::string& v) { c.cfg.estimation.strict = as_bool(c, v); }},
      {{"estimation", "solver", "hermitian", "hermitian (QR least squares) or literal_transpose"},
       [](Ctx& c, const std::string& v) {
         if (v == "hermitian") c.cfg.estimation.mode = LeastSquaresMode::hermitian;
         else if (v == "literal_transpose") c.cfg.estimation.mode = LeastSquaresMode::literal_transpose;
         else bad(c, "unknown solver '" + v + "'");
       }},
      {{"estimation", "max_condition", "1e12", "condition number above which a block is singular"},
       [](Ctx& c, const std::string& v) { c.cfg.estimation.max_condition = as_positive(c, v); }},
      {{"estimation", "sweep_strides", "10,20,40,80,160,320", "candidate M values for sweep"},
       [](Ctx& c, const std::string& v) { c.cfg.estimation.sweep_strides = as_size_list(c, v); }},
      {{"estimation", "sweep_cpis", "1,2,4,8", "candidate L values for sweep"},
       [](Ctx& c, const std::string& v) { c.cfg.estimation.sweep_cpis = as_size_list(c, v); }},
      {{"estimation", "max_blocks", "0", "process at most this many blocks; 0 means all"},
       [](Ctx& c, const std::string& v) { c.cfg.estimation.max_blocks = as_size(c, v); }},

      {{"synthesis", "residual_video_phase", "false", "include the exp(-j pi gamma tau^2) term"},
       [](Ctx& c, const std::string& v) { c.cfg.synthesis.residual_video_phase = as_bool(c, v); }},
      {{"synthesis", "noise_power", "0", "complex white noise power per sample"},
       [](Ctx& c, const std::string& v) {
         const double p = as_double(c, v);
         if (p < 0.0) bad(c, "noise power must be non-negative");
         c.cfg.synthesis.noise_power = p;
       }},
      {{"synthesis", "seed", "0", "noise generator seed"},
       [](Ctx& c, const std::string& v) { c.cfg.synthesis.noise_seed = as_size(c, v); }},

      {{"signature", "window", "hann", "fast/slow-time window: rect, hann, hamming, blackman"},
       [](Ctx& c, const std::string& v) { c.cfg.signature.window_1d = wrap(c, [&] { return parse_window(v); }); }},
      {{"signature", "window_2d", "hann", "separable window of the range-Doppler transform"},
       [](Ctx& c, const std::string& v) { c.cfg.signature.window_2d = wrap(c, [&] { return parse_window(v); }); }},
      {{"signature", "display_floor_db", "-40", "values below are clipped in CSV, heatmaps and metrics"},
       [](Ctx& c, const std::string& v) { c.cfg.signature.display_floor_db = as_double(c, v); }},
      {{"signature", "doppler_source", "first_sample", "first_sample (Y[1,p]) or range_sum"},
       [](Ctx& c, const std::string& v) {
         if (v == "first_sample") c.cfg.signature.doppler_source = DopplerSource::first_sample;
         else if (v == "range_sum") c.cfg.signature.doppler_source = DopplerSource::range_sum;
         else bad(c, "unknown Doppler source '" + v + "'");
       }},
      {{"signature", "rt_pri_stride", "16", "keep every n-th PRI of the range-time export"},
       [](Ctx& c, const std::string& v) { c.cfg.signature.rt_pri_stride = as_size(c, v); }},
      {{"signature", "write_csv", "false", "also write signatures as CSV"},
       [](Ctx& c, const std::string& v) { c.cfg.signature.write_csv = as_bool(c, v); }},
      {{"signature", "write_heatmaps", "true", "write PGM heatmaps"},
       [](Ctx& c, const std::string& v) { c.cfg.signature.write_heatmaps = as_bool(c, v); }},

      {{"compare", "cfar", "true", "apply OS-CFAR to the measured signatures"},
       [](Ctx& c, const std::string& v) { c.cfg.compare.cfar = as_bool(c, v); }},
      {{"compare", "cfar_guard", "1", "guard cells on each side"},
       [](Ctx& c, const std::string& v) { c.cfg.compare.cfar_params.guard = as_size(c, v); }},
      {{"compare", "cfar_train", "2", "training cells on each side beyond the guard"},
       [](Ctx& c, const std::string& v) { c.cfg.compare.cfar_params.train = as_size(c, v); }},
      {{"compare", "cfar_rank", "30", "order statistic rank (1-based)"},
       [](Ctx& c, const std::string& v) { c.cfg.compare.cfar_params.rank = as_size(c, v); }},
      {{"compare", "cfar_scale", "10", "threshold multiplier on the order statistic"},
       [](Ctx& c, const std::string& v) { c.cfg.compare.cfar_params.scale = as_positive(c, v); }},
      {{"compare", "domain", "db", "db (clipped at display_floor_db) or linear"},
       [](Ctx& c, const std::string& v) {
         if (v == "db") c.cfg.compare.domain = MetricDomain::db;
         else if (v == "linear") c.cfg.compare.domain = MetricDomain::linear;
         else bad(c, "unknown metric domain '" + v + "'");
       }},
  };
  return keys;
}

void finalize_material(Ctx& c) {
  auto& m = c.cfg.material;
  if (m.preset == "skin_77ghz") m.material = Material::skin_77ghz();
  else if (m.preset == "skin_24ghz") m.material = Material::skin_24ghz();
  else if (m.preset == "pec") m.material = Material::pec();
  if (m.preset == "custom") {
    if (!c.permittivity || !c.conductivity) {
      throw ConfigError("material: custom preset needs permittivity and conductivity");
    }
    m.material = Material{*c.permittivity, *c.conductivity, false};
  } else if (c.permittivity || c.conductivity) {
    throw ConfigError("material: permittivity/conductivity only apply to the custom preset");
  }
}

}  // namespace

void RunConfig::validate() const {
  try {
    radar.validate();
    material.material.validate();
    AspectConfig a = aspect.aspect;
    a.carrier_hz = radar.carrier_hz;
    a.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (estimation.stride < 1) throw ConfigError("estimation.stride must be >= 1");
  if (signature.rt_pri_stride < 1) throw ConfigError("signature.rt_pri_stride must be >= 1");
  if (aspect.bistatic_step_deg > 360.0) throw ConfigError("aspect.bistatic_step_deg must not exceed 360");
  try {
    compare.cfar_params.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("compare: ") + e.what());
  }
}

const std::vector<ConfigKeyInfo>& config_keys() {
  static const std::vector<ConfigKeyInfo> infos = [] {
    std::vector<ConfigKeyInfo> out;
    for (const auto& k : registry()) out.push_back(k.info);
    return out;
  }();
  return infos;
}

RunConfig parse_config(const std::string& contents, const std::string& source, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  Ctx ctx{cfg, source, base_dir, std::nullopt, std::nullopt};
  std::string section;
  std::size_t line_no = 0;
  for (const auto raw : text::split(contents, '\n')) {
    ++line_no;
    auto line = raw;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    ctx.where = source + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(source, line_no, "unterminated section header");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key = value");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    const std::string full = section + "." + key;
    const auto& keys = registry();
    const auto it = std::find_if(keys.begin(), keys.end(),
                                 [&](const KeyDef& k) { return k.info.section == section && k.info.key == key; });
    if (it == keys.end()) throw ConfigError(ctx.where + ": unknown key '" + full + "'");
    if (cfg.entries.contains(full)) throw ConfigError(ctx.where + ": duplicate key '" + full + "'");
    it->set(ctx, value);
    cfg.entries[full] = value;
  }
  finalize_material(ctx);
  cfg.aspect.aspect.carrier_hz = cfg.radar.carrier_hz;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse_config(text::read_file(path), path.string(), path.parent_path());
}

std::string config_help_text() {
  std::string out = "Configuration keys ([section] key = value):\n";
  std::string section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      section = k.section;
      out += "  [" + section + "]\n";
    }
    std::string left = "    " + k.key;
    if (!k.default_value.empty()) left += " = " + k.default_value;
    if (left.size() < 40) left.resize(40, ' ');
    out += left + " " + k.description + "\n";
  }
  return out;
}

std::string config_reference_markdown() {
  std::string out = "# Configuration reference\n\n";
  out += "Files use `[section]` headers and `key = value` lines. `#` and `;` start comments. ";
  out += "Relative paths are resolved against the directory of the configuration file. ";
  out += "Unknown or duplicate keys are rejected.\n";
  std::string section;
  for (const auto& k : config_keys()) {
    if (k.section != section) {
      section = k.section;
      out += "\n## [" + section + "]\n\n| key | default | description |\n|---|---|---|\n";
    }
    out += "| `" + k.key + "` | " + (k.default_value.empty() ? std::string("(none)") : "`" + k.default_value + "`") +
           " | " + k.description + " |\n";
  }
  return out;
}

}  // namespace pedrad
