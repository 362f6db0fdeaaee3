// SPDX-License-Identifier: Apache-2.0
#include "pedrad/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>

#include "pedrad/error.hpp"
#include "pedrad/parallel.hpp"
#include "pedrad/text_io.hpp"

namespace pedrad {
namespace fs = std::filesystem;
namespace {

void say(const RunOptions& o, const std::string& msg) {
  if (o.log != nullptr) *o.log << msg << '\n';
}

std::string index4(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return buf;
}

fs::path out_dir(const RunConfig& c) { return fs::path(c.paths.output_dir); }

fs::path or_default(const std::string& configured, const fs::path& fallback) {
  return configured.empty() ? fallback : fs::path(configured);
}

void require_file(const fs::path& p, const std::string& what) {
  if (p.empty()) throw ConfigError(what + " is not configured");
  if (!fs::exists(p)) throw ConfigError(what + " not found: " + p.string());
}

MarkerTrackSet load_markers(const RunConfig& c) {
  require_file(c.paths.marker_file, "marker file");
  return load_marker_tracks(c.paths.marker_file);
}

std::vector<MeshFrame> load_frames(const RunConfig& c) {
  if (c.paths.mesh_pattern.empty()) throw ConfigError("mesh pattern is not configured");
  return load_mesh_sequence(c.paths.mesh_pattern, c.scene.mesh_frame_rate_hz);
}

AspectConfig aspect_of(const RunConfig& c) {
  AspectConfig a = c.aspect.aspect;
  a.carrier_hz = c.radar.carrier_hz;
  return a;
}

RcsSeries trace_rcs(const RunConfig& c, const std::vector<MeshFrame>& frames, const RunOptions& o) {
  say(o, "tracing " + std::to_string(frames.size()) + " frames");
  TraceOptions trace;
  trace.threads = static_cast<int>(o.threads);
  const RcsSeries series = rcs_sequence(frames, c.material.material, aspect_of(c), c.aspect.pairs, trace);
  write_rcs_csv(series, out_dir(c) / "rcs.csv");
  return series;
}

void write_estimates(const EstimationRun& run, const fs::path& dir) {
  std::vector<CoefficientRecord> records;
  std::string status = "block_index,status,residual,condition,message\n";
  for (const auto& b : run.blocks) {
    if (b.ok) {
      for (Eigen::Index i = 0; i < b.reflectivities.size(); ++i) {
        records.push_back({b.index, static_cast<std::size_t>(i), b.reflectivities(i), b.residual});
      }
    }
    status += std::to_string(b.index) + ',' + (b.ok ? "ok" : "failed") + ',' + text::format_double(b.residual) + ',' +
              text::format_double(b.condition) + ',' + b.message + '\n';
  }
  write_coefficients_csv(records, dir / "coefficients.csv");
  text::write_file(dir / "estimation_blocks.csv", status);
}

void write_signature_set(const SignatureSet& s, const SignatureConfig& cfg, const fs::path& dir, std::size_t block) {
  const auto emit = [&](const SignatureMatrix& m, const std::string& stem) {
    write_signature_binary(m, dir / "signatures" / (stem + ".sig"));
    if (cfg.write_csv) write_signature_csv(m, dir / "signatures" / (stem + ".csv"), cfg.display_floor_db);
    if (cfg.write_heatmaps) write_heatmap_pgm(m, dir / "heatmaps" / (stem + ".pgm"), cfg.display_floor_db);
  };
  emit(s.range_time, "rt_" + index4(block));
  emit(s.doppler_time, "dt_" + index4(block));
  for (std::size_t l = 0; l < s.range_doppler.size(); ++l) {
    emit(s.range_doppler[l], "rd_" + index4(block) + "_" + std::to_string(l));
  }
}

std::size_t block_index_from(const fs::path& p) {
  const std::string stem = p.stem().string();
  long long v = 0;
  if (!stem.starts_with("cube_") || !text::parse_int(std::string_view(stem).substr(5), v) || v < 0) {
    throw FormatError("unexpected cube file name: " + p.string());
  }
  return static_cast<std::size_t>(v);
}

std::vector<fs::path> cube_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.starts_with("cube_") && e.path().extension() == ".rdc") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

PrfTrackSet tracks_for_blocks(const RunConfig& c, const MarkerTrackSet& markers, std::size_t blocks) {
  return interpolate_tracks(markers, c.scene.radar_position, c.radar.pri_s, blocks * c.radar.block_pris(),
                            markers.start_time());
}

void write_metadata(const RunConfig& c, const std::string& command, const EstimationRun* run,
                    const std::vector<std::string>& warnings) {
  const auto& r = c.radar;
  std::string out = "# pedrad run metadata\ncommand = " + command + "\n\n[derived]\n";
  out += "samples_per_chirp = " + std::to_string(r.samples_per_chirp()) + "\n";
  out += "range_resolution_m = " + text::format_double(r.range_resolution()) + "\n";
  out += "doppler_resolution_hz = " + text::format_double(r.doppler_resolution()) + "\n";
  out += "block_pris = " + std::to_string(r.block_pris()) + "\n";
  out += "block_duration_s = " + text::format_double(r.block_duration()) + "\n";
  out += "regression_rows = " + std::to_string(regression_row_count(r.cpis, r.chirps_per_cpi, c.estimation.stride)) + "\n";
  if (run != nullptr) {
    out += "blocks = " + std::to_string(run->blocks.size()) + "\n";
    out += "failed_blocks = " + std::to_string(run->failed()) + "\n";
  }

  out += "\n[flags]\n";
  out += "speed_of_light_mps = " + text::format_double(kSpeedOfLight) + "\n";
  const double reference_tlong = 12.5e-3;
  if (std::abs(r.block_duration() - reference_tlong) > 1e-4) {
    out += "block_duration_differs_from_12.5ms_reference = yes\n";
  }
  out += "beat_signal_model = dechirped\n";
  out += std::string("residual_video_phase = ") + (c.synthesis.residual_video_phase ? "on" : "off") + "\n";
  out += "rcs_aggregation = physical_optics_currents_at_every_hit\n";
  out += std::string("least_squares = ") +
         (c.estimation.mode == LeastSquaresMode::hermitian ? "hermitian" : "literal_transpose") + "\n";
  out += std::string("estimation_strict = ") + (c.estimation.strict ? "yes" : "no") + "\n";
  out += "rcs_interpolation = natural_cubic_spline_linear_power_clamped_at_0\n";
  out += std::string("doppler_source = ") +
         (c.signature.doppler_source == DopplerSource::first_sample ? "first_sample" : "range_sum") + "\n";
  out += "window_1d = " + to_string(c.signature.window_1d) + "\nwindow_2d = " + to_string(c.signature.window_2d) + "\n";
  out += std::string("metric_domain = ") + (c.compare.domain == MetricDomain::db ? "db" : "linear") + "\n";
  out += std::string("cfar_on_measured = ") + (c.compare.cfar ? "yes" : "no") + "\n";
  const AspectConfig a = aspect_of(c);
  if (a.effective_ray_spacing() > a.wavelength() / 10.0) out += "ray_spacing = coarse\n";
  if (c.synthesis.noise_power > 0.0) out += "synthesis_noise = on\n";

  out += "\n[config]\n";
  for (const auto& [k, v] : c.entries) {
    if (k == "paths.output_dir") continue;
    out += k + " = " + v + "\n";
  }
  if (!warnings.empty()) {
    out += "\n[warnings]\n";
    for (const auto& w : warnings) out += w + "\n";
  }
  text::write_file(out_dir(c) / "run_metadata.txt", out);
}

}  // namespace

std::size_t EstimationRun::failed() const {
  return static_cast<std::size_t>(std::count_if(blocks.begin(), blocks.end(), [](const auto& b) { return !b.ok; }));
}

EstimationRun estimate_blocks(const RunConfig& config, const MarkerTrackSet& markers, const RcsSeries& rcs,
                              const RunOptions& options) {
  const auto& radar = config.radar;
  const auto pair = config.estimation.pair;
  if (!rcs.has(pair)) throw ConfigError("RCS series lacks the " + std::string(to_string(pair)) + " pair");
  if (rcs.frame_count() < 2) throw FormatError("RCS series needs at least two frames");
  const double offset = markers.start_time();
  const double end = std::min(markers.end_time(), rcs.times.back() + offset);
  const std::size_t available = available_pris(markers.start_time(), end, radar.pri_s);
  const std::size_t block = radar.block_pris();
  std::size_t blocks = available / block;
  if (config.estimation.max_blocks > 0) blocks = std::min(blocks, config.estimation.max_blocks);
  if (blocks == 0) {
    throw RangeError("motion covers " + std::to_string(available) + " PRIs; one block needs " + std::to_string(block));
  }

  EstimationRun run;
  run.tracks = tracks_for_blocks(config, markers, blocks);
  run.rcs = interpolate_rcs(rcs, pair, radar.pri_s, run.tracks.span(), markers.start_time(), offset);
  run.blocks.resize(blocks);
  say(options, "estimating " + std::to_string(blocks) + " blocks");

  SolveOptions solve;
  solve.mode = config.estimation.mode;
  solve.max_condition = config.estimation.max_condition;
  AssembleOptions assemble;
  assemble.strict = config.estimation.strict;
  parallel_for(blocks, options.threads, [&](std::size_t i) {
    auto& out = run.blocks[i];
    out.index = i;
    try {
      const auto system = assemble_system(run.tracks, run.rcs, radar.carrier_hz, config.estimation.stride, radar.cpis,
                                          radar.chirps_per_cpi, i * block, assemble);
      const auto sol = solve_reflectivities(system, solve);
      out.reflectivities = sol.reflectivities;
      out.residual = sol.residual;
      out.condition = sol.condition;
      out.ok = true;
    } catch (const SingularityError& e) {
      out.condition = e.condition();
      out.message = e.what();
    } catch (const NumericalError& e) {
      out.message = e.what();
    }
  });
  for (const auto& b : run.blocks) {
    if (!b.ok) say(options, "block " + std::to_string(b.index) + " failed: " + b.message);
  }
  return run;
}

SignatureSet compute_signatures(const RadarDataCube& cube, const SignatureConfig& config, std::size_t threads) {
  SignatureSet s;
  s.range_time = decimate_columns(range_time(cube, config.window_1d, threads), config.rt_pri_stride);
  s.doppler_time = doppler_time(cube, config.window_1d, config.doppler_source);
  const std::size_t cpis = cube.slow_time() / cube.params.chirps_per_cpi;
  for (std::size_t l = 0; l < cpis; ++l) s.range_doppler.push_back(range_doppler(cube, l, config.window_2d, threads));
  return s;
}

std::vector<RadarDataCube> load_cube_blocks(const fs::path& path, const RadarParams& radar) {
  if (!fs::exists(path)) throw ConfigError("cube path not found: " + path.string());
  std::vector<RadarDataCube> out;
  if (fs::is_directory(path)) {
    auto files = cube_files(path);
    // A pipeline output directory keeps its cubes one level down.
    if (files.empty() && fs::is_directory(path / "cubes")) files = cube_files(path / "cubes");
    for (const auto& f : files) out.push_back(read_cube(f, radar));
    if (out.empty()) throw FormatError("no cube_NNNN.rdc files in " + path.string());
    return out;
  }
  const RadarDataCube whole = read_cube(path, radar);
  const auto block = static_cast<Eigen::Index>(radar.block_pris());
  if (whole.samples.cols() < block || whole.samples.cols() % block != 0) {
    throw ShapeError(path.string() + ": " + std::to_string(whole.samples.cols()) +
                     " PRIs is not a whole number of blocks of " + std::to_string(block));
  }
  for (Eigen::Index first = 0; first < whole.samples.cols(); first += block) {
    RadarDataCube c;
    c.params = radar;
    c.samples = whole.samples.middleCols(first, block);
    out.push_back(std::move(c));
  }
  return out;
}

int cmd_rcs(const RunConfig& config, const RunOptions& options) {
  const auto frames = load_frames(config);
  trace_rcs(config, frames, options);
  if (config.aspect.bistatic_sweep) {
    std::vector<double> azimuths;
    for (double phi = 0.0; phi < 360.0 - 1e-9; phi += config.aspect.bistatic_step_deg) azimuths.push_back(phi);
    say(options, "bistatic sweep over " + std::to_string(azimuths.size()) + " azimuths");
    TraceOptions trace;
    trace.threads = static_cast<int>(options.threads);
    const GroupedMesh mesh(frames.front());
    const auto fields = trace_directions(mesh, config.material.material, aspect_of(config), azimuths, trace);
    write_bistatic_csv(azimuths, fields, out_dir(config) / "rcs_bistatic.csv");
  }
  return kExitOk;
}

int cmd_estimate(const RunConfig& config, const RunOptions& options) {
  const auto markers = load_markers(config);
  const fs::path rcs_path = or_default(config.paths.rcs_file, out_dir(config) / "rcs.csv");
  require_file(rcs_path, "RCS file");
  const auto run = estimate_blocks(config, markers, read_rcs_csv(rcs_path), options);
  write_estimates(run, out_dir(config));
  return run.failed() == run.blocks.size() ? kExitNumerical : kExitOk;
}

int cmd_synth(const RunConfig& config, const RunOptions& options) {
  const auto markers = load_markers(config);
  const fs::path coeff_path = or_default(config.paths.coefficients_file, out_dir(config) / "coefficients.csv");
  require_file(coeff_path, "coefficients file");
  std::map<std::size_t, std::vector<CoefficientRecord>> by_block;
  for (const auto& r : read_coefficients_csv(coeff_path)) by_block[r.block].push_back(r);
  if (by_block.empty()) {
    say(options, "no estimated blocks to synthesize");
    return kExitNumerical;
  }
  const auto tracks = tracks_for_blocks(config, markers, by_block.rbegin()->first + 1);
  const std::size_t block = config.radar.block_pris();
  SynthOptions synth = config.synthesis;
  synth.threads = options.threads;
  for (const auto& [index, records] : by_block) {
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(markers.marker_count()));
    for (const auto& r : records) {
      if (r.scatterer >= markers.marker_count()) throw ShapeError("coefficient index exceeds the marker count");
      a(static_cast<Eigen::Index>(r.scatterer)) = r.value;
    }
    const auto cube = synthesize_cube(a, slice_tracks(tracks, index * block, block), config.radar, synth);
    write_cube(cube, out_dir(config) / "cubes" / ("cube_" + index4(index) + ".rdc"));
    for (const auto& w : cube.warnings) say(options, "block " + std::to_string(index) + ": " + w);
  }
  return kExitOk;
}

int cmd_signature(const RunConfig& config, const RunOptions& options) {
  const fs::path dir = or_default(config.paths.cube_dir, out_dir(config) / "cubes");
  if (!fs::is_directory(dir)) throw ConfigError("cube directory not found: " + dir.string());
  const auto files = cube_files(dir);
  if (files.empty()) throw FormatError("no cube_NNNN.rdc files in " + dir.string());
  for (const auto& f : files) {
    const auto cube = read_cube(f, config.radar);
    if (cube.slow_time() != config.radar.block_pris()) {
      throw ShapeError(f.string() + " holds " + std::to_string(cube.slow_time()) + " PRIs, expected " +
                       std::to_string(config.radar.block_pris()));
    }
    write_signature_set(compute_signatures(cube, config.signature, options.threads), config.signature,
                        out_dir(config), block_index_from(f));
  }
  say(options, "wrote signatures for " + std::to_string(files.size()) + " cubes");
  return kExitOk;
}

int cmd_compare(const RunConfig& config, const fs::path& simulated, const fs::path& measured,
                const RunOptions& options) {
  const auto sim = load_cube_blocks(simulated, config.radar);
  const auto meas = load_cube_blocks(measured, config.radar);
  const std::size_t n = std::min(sim.size(), meas.size());
  if (sim.size() != meas.size()) {
    say(options, "comparing the first " + std::to_string(n) + " blocks (" + std::to_string(sim.size()) +
                     " simulated, " + std::to_string(meas.size()) + " measured)");
  }
  CompareOptions cmp;
  cmp.domain = config.compare.domain;
  cmp.floor_db = config.signature.display_floor_db;
  const auto measured_view = [&](const SignatureMatrix& m) {
    return config.compare.cfar ? apply_mask(m, os_cfar(m, config.compare.cfar_params)) : m;
  };
  std::vector<BlockComparison> rt, dt, rd;
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = compute_signatures(sim[i], config.signature, options.threads);
    const auto m = compute_signatures(meas[i], config.signature, options.threads);
    rt.push_back({i, compare(s.range_time, measured_view(m.range_time), cmp)});
    dt.push_back({i, compare(s.doppler_time, measured_view(m.doppler_time), cmp)});
    for (std::size_t l = 0; l < s.range_doppler.size() && l < m.range_doppler.size(); ++l) {
      rd.push_back({i * s.range_doppler.size() + l, compare(s.range_doppler[l], measured_view(m.range_doppler[l]), cmp)});
    }
  }
  write_comparison_csv(rt, out_dir(config) / "compare_range_time.csv");
  write_comparison_csv(dt, out_dir(config) / "compare_doppler_time.csv");
  write_comparison_csv(rd, out_dir(config) / "compare_range_doppler.csv");
  say(options, "compared " + std::to_string(n) + " blocks");
  return kExitOk;
}

int cmd_sweep(const RunConfig& config, const RunOptions& options) {
  const auto markers = load_markers(config);
  const fs::path rcs_path = or_default(config.paths.rcs_file, out_dir(config) / "rcs.csv");
  require_file(rcs_path, "RCS file");
  const auto series = read_rcs_csv(rcs_path);
  if (!series.has(config.estimation.pair)) throw ConfigError("RCS file lacks the estimation pair");
  const double offset = markers.start_time();
  const double end = std::min(markers.end_time(), series.times.back() + offset);
  const std::size_t span = available_pris(markers.start_time(), end, config.radar.pri_s);
  if (span == 0) throw RangeError("motion shorter than one PRI");
  const auto tracks = interpolate_tracks(markers, config.scene.radar_position, config.radar.pri_s, span,
                                         markers.start_time());
  const auto rcs = interpolate_rcs(series, config.estimation.pair, config.radar.pri_s, span, markers.start_time(), offset);
  SolveOptions solve;
  solve.mode = config.estimation.mode;
  solve.max_condition = config.estimation.max_condition;
  AssembleOptions assemble;
  assemble.strict = config.estimation.strict;
  const auto table = sweep_parameters(tracks, rcs, config.radar.carrier_hz, config.estimation.sweep_strides,
                                      config.estimation.sweep_cpis, config.radar.chirps_per_cpi, solve, assemble);
  write_sweep_csv(table, out_dir(config) / "sweep.csv");
  const bool any = std::any_of(table.begin(), table.end(), [](const SweepRow& r) { return !std::isnan(r.mean_residual); });
  say(options, "swept " + std::to_string(table.size()) + " candidates");
  return any ? kExitOk : kExitNumerical;
}

int cmd_pipeline(const RunConfig& config, const RunOptions& options) {
  // Validate every input before any compute.
  if (config.paths.mesh_pattern.empty()) throw ConfigError("mesh pattern is not configured");
  if (expand_frame_pattern(config.paths.mesh_pattern).empty()) {
    throw ConfigError("no mesh frames match " + config.paths.mesh_pattern);
  }
  require_file(config.paths.marker_file, "marker file");
  if (!config.paths.reference_cube.empty()) require_file(config.paths.reference_cube, "reference cube");

  const auto markers = load_markers(config);
  const auto frames = load_frames(config);
  const auto series = trace_rcs(config, frames, options);
  const auto run = estimate_blocks(config, markers, series, options);
  write_estimates(run, out_dir(config));

  std::vector<std::string> warnings;
  const std::size_t block = config.radar.block_pris();
  SynthOptions synth = config.synthesis;
  synth.threads = options.threads;
  for (const auto& b : run.blocks) {
    if (!b.ok) {
      warnings.push_back("block " + std::to_string(b.index) + " failed: " + b.message);
      continue;
    }
    const auto cube = synthesize_cube(b.reflectivities, slice_tracks(run.tracks, b.index * block, block),
                                      config.radar, synth);
    for (const auto& w : cube.warnings) warnings.push_back("block " + std::to_string(b.index) + ": " + w);
    write_cube(cube, out_dir(config) / "cubes" / ("cube_" + index4(b.index) + ".rdc"));
    write_signature_set(compute_signatures(cube, config.signature, options.threads), config.signature,
                        out_dir(config), b.index);
  }
  say(options, "synthesized " + std::to_string(run.blocks.size() - run.failed()) + " of " +
                   std::to_string(run.blocks.size()) + " blocks");

  if (!config.paths.reference_cube.empty() && run.failed() < run.blocks.size()) {
    cmd_compare(config, out_dir(config) / "cubes", config.paths.reference_cube, options);
  }
  write_metadata(config, "pipeline", &run, warnings);
  return run.failed() == run.blocks.size() ? kExitNumerical : kExitOk;
}

}  // namespace pedrad
