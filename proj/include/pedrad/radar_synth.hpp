// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pedrad/estimation.hpp"
#include "pedrad/kinematics.hpp"

namespace pedrad {

/// FMCW waveform. Derived quantities are computed on demand.
struct RadarParams {
  double carrier_hz = 77e9;
  double bandwidth_hz = 2e9;
  double sample_rate_hz = 10e6;
  double upchirp_s = 51.2e-6;
  double pri_s = 61.2e-6;
  std::size_t chirps_per_cpi = 1024;  // P
  std::size_t cpis = 2;               // L

  /// 77 GHz automotive sensor used throughout the examples and tests.
  static RadarParams automotive_77ghz() { return {}; }

  double chirp_rate() const { return bandwidth_hz / upchirp_s; }
  double sample_period() const { return 1.0 / sample_rate_hz; }
  std::size_t samples_per_chirp() const;
  double range_resolution() const;
  double doppler_resolution() const;
  double wavelength() const;
  /// N * range_resolution.
  double max_unambiguous_range() const;
  /// L * P
  std::size_t block_pris() const { return cpis * chirps_per_cpi; }
  /// L * P * T_PRI
  double block_duration() const { return static_cast<double>(block_pris()) * pri_s; }

  /// ConfigError on non-positive values, T_upchirp > T_PRI or N < 2.
  void validate() const;
};

struct RadarDataCube {
  /// Y(n, p): rows fast time, columns slow time.
  Eigen::MatrixXcd samples;
  RadarParams params;
  std::vector<std::string> warnings;

  std::size_t fast_time() const { return static_cast<std::size_t>(samples.rows()); }
  std::size_t slow_time() const { return static_cast<std::size_t>(samples.cols()); }
};

struct SynthOptions {
  /// Adds exp(-j pi gamma tau^2) to every sample.
  bool residual_video_phase = false;
  /// Complex white noise power per sample; 0 disables noise.
  double noise_power = 0.0;
  std::uint64_t noise_seed = 0;
  std::size_t threads = 1;
};

/// Dechirped beat signal of point scatterers on the tracks. Produces one
/// column per track PRI; the track span must equal L * P.
RadarDataCube synthesize_cube(const Eigen::VectorXcd& reflectivities, const PrfTrackSet& tracks,
                              const RadarParams& params, const SynthOptions& options = {});
RadarDataCube synthesize_cube(const ScattererSet& scatterers, const RadarParams& params,
                              const SynthOptions& options = {});

/// `RDC1` binary: magic, N, LP, reserved zero word, then complex64 row-major.
void write_cube(const RadarDataCube& cube, const std::filesystem::path& path);
Eigen::MatrixXcd read_cube_samples(const std::filesystem::path& path);
RadarDataCube read_cube(const std::filesystem::path& path, const RadarParams& params);

}  // namespace pedrad
