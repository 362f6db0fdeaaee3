// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pedrad/geometry.hpp"
#include "pedrad/types.hpp"

namespace pedrad {

/// Single-layer dielectric (or perfect conductor) surface model.
struct Material {
  double relative_permittivity = 1.0;
  double conductivity = 0.0;  // S/m
  bool perfect_conductor = false;

  static Material pec() { return {1.0, 0.0, true}; }
  /// Skin at 77 GHz: eps_r = 6.63, sigma = 38.1 S/m.
  static Material skin_77ghz() { return {6.63, 38.1, false}; }
  /// Skin at 24 GHz: eps_r = 50, sigma = 1 S/m.
  static Material skin_24ghz() { return {50.0, 1.0, false}; }

  /// eps_r + sigma / (j 2 pi f eps0), e^{+j omega t} time convention.
  Complex complex_permittivity(double frequency_hz) const;
  void validate() const;
};

enum class Polarization { h, v };

/// Scattering-matrix naming: the first letter is the receive polarization,
/// the second the transmit polarization (hv = receive h, transmit v).
enum class PolarizationPair { vv = 0, hh = 1, hv = 2, vh = 3 };
inline constexpr std::array<PolarizationPair, 4> kAllPolarizationPairs = {
    PolarizationPair::vv, PolarizationPair::hh, PolarizationPair::hv, PolarizationPair::vh};

std::string_view to_string(PolarizationPair pair);
PolarizationPair parse_polarization_pair(std::string_view name);
Polarization parse_polarization(std::string_view name);
PolarizationPair make_pair(Polarization rx, Polarization tx);

/// Reflection coefficients for the two field components. Convention: the
/// perpendicular component keeps its unit vector e_perp = d x n on reflection,
/// the parallel unit vector is e_perp x d before and e_perp x d_r after. With
/// this convention a perfect conductor gives perpendicular = -1, parallel = +1.
struct FresnelCoefficients {
  Complex perpendicular;
  Complex parallel;
};

/// Air to (lossy) dielectric. Requires 0 <= incidence_angle < pi/2.
FresnelCoefficients fresnel_coefficients(const Material& material, double frequency_hz, double incidence_angle);

/// Illumination and observation geometry. Azimuths are measured in the x-y
/// plane from +x; phi names the direction from the target toward the antenna,
/// so the incident wave travels along -(cos phi_i, sin phi_i, 0). Elevation is 0.
struct AspectConfig {
  double incident_azimuth_deg = 0.0;
  double scattered_azimuth_deg = 0.0;
  double carrier_hz = 77e9;
  Polarization tx_polarization = Polarization::v;
  Polarization rx_polarization = Polarization::v;
  int max_bounces = 3;
  /// Ray-grid pitch in meters; 0 selects lambda / 10.
  double ray_spacing = 0.0;
  /// Permits ray_spacing > lambda / 10.
  bool coarse_mode = false;

  double wavelength() const { return pedrad::wavelength(carrier_hz); }
  double effective_ray_spacing() const { return ray_spacing > 0.0 ? ray_spacing : wavelength() / 10.0; }
  bool monostatic() const { return scattered_azimuth_deg == incident_azimuth_deg; }
  void validate() const;
};

/// Complex far-field amplitudes for all four polarization pairs, normalized
/// so that sigma = 4 pi |E|^2 in square meters.
struct ScatteredField {
  std::array<Complex, 4> amplitude{};

  Complex operator[](PolarizationPair pair) const { return amplitude[static_cast<int>(pair)]; }
  double rcs(PolarizationPair pair) const;
};

double rcs_from_amplitude(Complex amplitude);

struct TraceOptions {
  int threads = 1;
  /// Rays per work item; fixed so the reduction order never depends on threads.
  std::size_t rays_per_chunk = 2048;
};

struct TraceStats {
  std::uint64_t rays = 0;
  std::uint64_t rays_hit = 0;
  std::uint64_t hits = 0;
  std::uint64_t box_tests = 0;
  std::uint64_t triangle_tests = 0;
};

/// Shooting-and-bouncing-rays trace of one frame toward the configured
/// scattered direction. Every hit of every ray tube radiates its
/// physical-optics surface currents over the tube footprint.
ScatteredField trace_frame(const GroupedMesh& mesh, const Material& material, const AspectConfig& aspect,
                           const TraceOptions& options = {}, TraceStats* stats = nullptr);
ScatteredField trace_frame(const MeshFrame& mesh, const Material& material, const AspectConfig& aspect,
                           const TraceOptions& options = {}, TraceStats* stats = nullptr);

/// One trace, many observation azimuths (bistatic sweep). The aspect's
/// scattered_azimuth_deg is ignored.
std::vector<ScatteredField> trace_directions(const GroupedMesh& mesh, const Material& material,
                                             const AspectConfig& aspect, std::span<const double> scattered_azimuths_deg,
                                             const TraceOptions& options = {}, TraceStats* stats = nullptr);

/// Per-frame RCS in square meters for a subset of polarization pairs.
struct RcsSeries {
  double frame_rate_hz = 0.0;
  std::vector<double> times;
  std::array<std::vector<double>, 4> sigma;

  std::size_t frame_count() const { return times.size(); }
  bool has(PolarizationPair pair) const { return !sigma[static_cast<int>(pair)].empty(); }
  /// Throws ParameterError when the pair was not computed.
  const std::vector<double>& values(PolarizationPair pair) const;
};

RcsSeries rcs_sequence(std::span<const MeshFrame> frames, const Material& material, const AspectConfig& aspect,
                       std::span<const PolarizationPair> pairs, const TraceOptions& options = {});

inline constexpr double kDbFloor = -300.0;

/// 10 log10(sigma / 1 m^2), floored at kDbFloor.
double to_dbsm(double sigma);
double from_dbsm(double dbsm);

/// CSV `frame,time_s,sigma_vv_dbsm,sigma_hh_dbsm,sigma_hv_dbsm,sigma_vh_dbsm`;
/// pairs that were not computed are left empty.
void write_rcs_csv(const RcsSeries& series, const std::filesystem::path& path);
RcsSeries read_rcs_csv(const std::filesystem::path& path);

/// CSV `phi_s_deg,sigma_vv_dbsm,sigma_hh_dbsm,sigma_hv_dbsm,sigma_vh_dbsm`.
void write_bistatic_csv(std::span<const double> scattered_azimuths_deg, std::span<const ScatteredField> fields,
                        const std::filesystem::path& path);

}  // namespace pedrad
