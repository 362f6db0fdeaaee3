// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "pedrad/radar_synth.hpp"

namespace pedrad {

enum class SignatureKind { range_time = 0, doppler_time = 1, range_doppler = 2 };

std::string to_string(SignatureKind kind);
SignatureKind parse_signature_kind(std::string_view name);

enum class WindowKind { rect, hann, hamming, blackman };

WindowKind parse_window(std::string_view name);
std::string to_string(WindowKind window);
/// Symmetric window of the given length.
std::vector<double> make_window(WindowKind window, std::size_t length);

/// Internal floor for dB conversion. The display threshold is separate.
inline constexpr double kSignatureFloorDb = -300.0;
inline constexpr double kDisplayFloorDb = -40.0;

double power_to_db(double power);
double db_to_power(double db);

struct SignatureAxis {
  std::string label;
  std::string unit;
  std::vector<double> values;
};

struct SignatureMatrix {
  SignatureKind kind = SignatureKind::range_time;
  /// 10 log10 |chi|^2, floored at kSignatureFloorDb.
  Eigen::MatrixXd values;
  SignatureAxis rows;
  SignatureAxis cols;
  std::string window;

  /// Linear power view of `values`.
  Eigen::MatrixXd power() const;
  /// Index of the strongest cell.
  std::pair<Eigen::Index, Eigen::Index> peak() const;
};

/// Centered bin indices -n/2 ... n/2-1.
std::vector<double> centered_bins(std::size_t n);

/// Windowed transform along fast time for every PRI, centered, normalized by
/// the window sum. Rows are range bins, columns PRIs.
SignatureMatrix range_time(const RadarDataCube& cube, WindowKind window = WindowKind::hann,
                           std::size_t threads = 1);

enum class DopplerSource {
  /// Y[n = 1, p]
  first_sample,
  /// Sum of Y[n, p] over n.
  range_sum,
};

/// P-point transform over slow time for every CPI. Rows are Doppler bins,
/// columns CPIs.
SignatureMatrix doppler_time(const RadarDataCube& cube, WindowKind window = WindowKind::hann,
                             DopplerSource source = DopplerSource::first_sample);

/// Separable 2-D transform of CPI `cpi` (0-based). Rows are range bins,
/// columns Doppler bins.
SignatureMatrix range_doppler(const RadarDataCube& cube, std::size_t cpi, WindowKind window = WindowKind::hann,
                              std::size_t threads = 1);

/// Keeps every `stride`-th column.
SignatureMatrix decimate_columns(const SignatureMatrix& matrix, std::size_t stride);

/// CSV in dB. Values below `floor_db` are written as `floor_db`.
void write_signature_csv(const SignatureMatrix& matrix, const std::filesystem::path& path,
                         std::optional<double> floor_db = kDisplayFloorDb);
/// `SIG1` binary: magic, rows, cols, kind code, then float32 dB row-major.
void write_signature_binary(const SignatureMatrix& matrix, const std::filesystem::path& path);
SignatureMatrix read_signature_binary(const std::filesystem::path& path);
/// Grayscale P5 image mapping [floor, max] to [0, 255], first row at the
/// bottom, plus `<path>.txt` with axis metadata.
void write_heatmap_pgm(const SignatureMatrix& matrix, const std::filesystem::path& path,
                       double floor_db = kDisplayFloorDb);

}  // namespace pedrad
