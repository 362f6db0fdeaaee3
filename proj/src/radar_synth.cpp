// SPDX-License-Identifier: Apache-2.0
#include "pedrad/radar_synth.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "binary_io.hpp"
#include "pedrad/error.hpp"
#include "pedrad/parallel.hpp"
#include "pedrad/text_io.hpp"

namespace pedrad {

std::size_t RadarParams::samples_per_chirp() const {
  return static_cast<std::size_t>(std::llround(sample_rate_hz * upchirp_s));
}

double RadarParams::range_resolution() const { return kSpeedOfLight / (2.0 * bandwidth_hz); }

double RadarParams::doppler_resolution() const {
  return 1.0 / (static_cast<double>(chirps_per_cpi) * pri_s);
}

double RadarParams::wavelength() const { return pedrad::wavelength(carrier_hz); }

double RadarParams::max_unambiguous_range() const {
  return static_cast<double>(samples_per_chirp()) * range_resolution();
}

void RadarParams::validate() const {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive");
  };
  positive(carrier_hz, "carrier frequency");
  positive(bandwidth_hz, "bandwidth");
  positive(sample_rate_hz, "sampling frequency");
  positive(upchirp_s, "up-chirp duration");
  positive(pri_s, "pulse repetition interval");
  if (chirps_per_cpi < 1) throw ConfigError("chirps per CPI must be >= 1");
  if (cpis < 1) throw ConfigError("CPIs per block must be >= 1");
  if (upchirp_s > pri_s) {
    throw ConfigError("up-chirp duration " + text::format_double(upchirp_s) + " s exceeds the PRI " +
                      text::format_double(pri_s) + " s");
  }
  if (samples_per_chirp() < 2) throw ConfigError("fewer than 2 fast-time samples per chirp");
}

RadarDataCube synthesize_cube(const Eigen::VectorXcd& reflectivities, const PrfTrackSet& tracks,
                              const RadarParams& params, const SynthOptions& options) {
  params.validate();
  if (static_cast<std::size_t>(reflectivities.size()) != tracks.markers) {
    throw ShapeError("reflectivity count does not match the number of tracks");
  }
  if (tracks.span() != params.block_pris()) {
    throw ShapeError("tracks span " + std::to_string(tracks.span()) + " PRIs, cube needs L*P = " +
                     std::to_string(params.block_pris()));
  }
  if (options.noise_power < 0.0) throw ParameterError("noise power must be non-negative");

  const std::size_t n_fast = params.samples_per_chirp();
  const std::size_t n_slow = tracks.span();
  const double ts = params.sample_period();
  const double gamma = params.chirp_rate();
  const double fc = params.carrier_hz;

  RadarDataCube cube;
  cube.params = params;
  cube.samples = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n_fast), static_cast<Eigen::Index>(n_slow));

  const double limit = params.max_unambiguous_range();
  if (tracks.markers > 0 && tracks.ranges.maxCoeff() > limit) {
    cube.warnings.push_back("scatterer beyond the unambiguous range " + text::format_double(limit) +
                            " m; its beat frequency aliases");
  }

  parallel_for(n_slow, options.threads, [&](std::size_t p) {
    auto column = cube.samples.col(static_cast<Eigen::Index>(p));
    for (std::size_t b = 0; b < tracks.markers; ++b) {
      const Complex a = reflectivities(static_cast<Eigen::Index>(b));
      if (a == Complex(0.0, 0.0)) continue;
      const double tau = 2.0 * tracks.ranges(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(b)) /
                         kSpeedOfLight;
      Complex base = a * std::polar(1.0, -2.0 * kPi * fc * tau);
      if (options.residual_video_phase) base *= std::polar(1.0, -kPi * gamma * tau * tau);
      const double beat = 2.0 * kPi * gamma * tau * ts;
      for (std::size_t n = 0; n < n_fast; ++n) {
        if (static_cast<double>(n + 1) * ts <= tau) continue;
        column(static_cast<Eigen::Index>(n)) += base * std::polar(1.0, beat * static_cast<double>(n));
      }
    }
  });

  if (options.noise_power > 0.0) {
    std::mt19937_64 rng(options.noise_seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(options.noise_power / 2.0));
    for (Eigen::Index p = 0; p < cube.samples.cols(); ++p) {
      for (Eigen::Index n = 0; n < cube.samples.rows(); ++n) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        cube.samples(n, p) += Complex(re, im);
      }
    }
  }
  return cube;
}

RadarDataCube synthesize_cube(const ScattererSet& scatterers, const RadarParams& params,
                              const SynthOptions& options) {
  return synthesize_cube(scatterers.reflectivities, scatterers.tracks, params, options);
}

void write_cube(const RadarDataCube& cube, const std::filesystem::path& path) {
  const auto rows = cube.samples.rows();
  const auto cols = cube.samples.cols();
  if (rows > std::numeric_limits<std::uint32_t>::max() || cols > std::numeric_limits<std::uint32_t>::max()) {
    throw ShapeError("cube too large for the binary format");
  }
  std::string out = detail::make_header(
      "RDC1", {static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols), 0});
  out.reserve(out.size() + static_cast<std::size_t>(rows * cols) * 8);
  for (Eigen::Index n = 0; n < rows; ++n) {
    for (Eigen::Index p = 0; p < cols; ++p) {
      detail::put_f32(out, static_cast<float>(cube.samples(n, p).real()));
      detail::put_f32(out, static_cast<float>(cube.samples(n, p).imag()));
    }
  }
  text::write_file(path, out);
}

Eigen::MatrixXcd read_cube_samples(const std::filesystem::path& path) {
  const std::string data = text::read_file(path);
  const auto h = detail::read_header(data, "RDC1", 2, path.string());
  Eigen::MatrixXcd out(h.rows, h.cols);
  std::size_t offset = 16;
  for (Eigen::Index n = 0; n < out.rows(); ++n) {
    for (Eigen::Index p = 0; p < out.cols(); ++p) {
      const float re = detail::get_f32(data, offset);
      const float im = detail::get_f32(data, offset + 4);
      offset += 8;
      if (!std::isfinite(re) || !std::isfinite(im)) throw FormatError(path.string() + ": non-finite sample");
      out(n, p) = Complex(re, im);
    }
  }
  return out;
}

RadarDataCube read_cube(const std::filesystem::path& path, const RadarParams& params) {
  RadarDataCube cube;
  cube.samples = read_cube_samples(path);
  cube.params = params;
  return cube;
}

}  // namespace pedrad
