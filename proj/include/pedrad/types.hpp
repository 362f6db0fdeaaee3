// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace pedrad {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using Complex = std::complex<double>;
using Triangle = std::array<std::uint32_t, 3>;

inline constexpr double kPi = std::numbers::pi;

/// Propagation speed used by every stage. The rounded value keeps the range
/// resolution of a 2 GHz sweep at exactly 7.5 cm.
inline constexpr double kSpeedOfLight = 3.0e8;

inline constexpr double kVacuumPermittivity = 8.8541878128e-12;

inline double wavelength(double frequency_hz) { return kSpeedOfLight / frequency_hz; }
inline double wavenumber(double frequency_hz) { return 2.0 * kPi * frequency_hz / kSpeedOfLight; }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

}  // namespace pedrad
