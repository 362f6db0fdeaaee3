// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pedrad/kinematics.hpp"
#include "pedrad/types.hpp"

namespace pedrad {

/// Linear model design * reflectivities = observations for one T_long block.
struct RegressionSystem {
  /// K x B, entries exp(-j 2 pi f_c 2 r_b[p] / c).
  Eigen::MatrixXcd design;
  /// K entries; sqrt(sigma) at the sampled PRIs for measured-style data.
  Eigen::VectorXcd observations;
  /// 0-based PRI index within the track set for each row.
  std::vector<std::size_t> row_pris;
  std::size_t stride = 0;         // M
  std::size_t cpis = 0;           // L
  std::size_t chirps_per_cpi = 0; // P
  std::size_t first_pri = 0;

  std::size_t rows() const { return static_cast<std::size_t>(design.rows()); }
  std::size_t scatterers() const { return static_cast<std::size_t>(design.cols()); }
};

struct AssembleOptions {
  /// Reject K < B.
  bool strict = true;
};

/// K = L P / M rounded to the nearest integer (halves round up).
std::size_t regression_row_count(std::size_t cpis, std::size_t chirps_per_cpi, std::size_t stride);

/// Row k (0-based) samples PRI round(k (LP - 1) / (K - 1)) of the block.
std::vector<std::size_t> regression_row_offsets(std::size_t rows, std::size_t block_pris);

/// Phase term exp(-j 2 pi f_c 2 r / c) of a point scatterer at range r.
Complex propagation_phase(double range_m, double carrier_hz);

/// Builds the block starting at `first_pri` of the track set. `rcs` holds the
/// per-PRI linear RCS aligned with the track set (same length).
RegressionSystem assemble_system(const PrfTrackSet& tracks, std::span<const double> rcs, double carrier_hz,
                                 std::size_t stride, std::size_t cpis, std::size_t chirps_per_cpi,
                                 std::size_t first_pri = 0, const AssembleOptions& options = {});

enum class LeastSquaresMode {
  /// argmin ||y - A x||^2 via column-pivoted Householder QR (conjugate-transpose semantics).
  hermitian,
  /// (A^T A)^{-1} A^T y with the plain transpose, for literal comparisons.
  literal_transpose,
};

struct SolveOptions {
  LeastSquaresMode mode = LeastSquaresMode::hermitian;
  double max_condition = 1e12;
};

struct RegressionSolution {
  Eigen::VectorXcd reflectivities;
  /// ||y - A x||^2 / ||y||^2
  double residual = 0.0;
  /// 2-norm condition number of the design matrix.
  double condition = 0.0;
};

/// Throws SingularityError when the design is rank deficient or its condition
/// number exceeds options.max_condition.
RegressionSolution solve_reflectivities(const RegressionSystem& system, const SolveOptions& options = {});

/// Estimated reflectivities plus the tracks of the block they are valid for.
struct ScattererSet {
  Eigen::VectorXcd reflectivities;
  PrfTrackSet tracks;
  std::size_t block_index = 0;
  double residual = 0.0;
};

struct SweepRow {
  std::size_t stride = 0;  // M
  std::size_t cpis = 0;    // L
  std::size_t rows = 0;    // K
  double mean_residual = 0.0;
  std::size_t blocks = 0;
  std::size_t failed_blocks = 0;
  std::string note;
};

/// Mean residual over every whole T_long block of the motion for each (M, L)
/// candidate. Infeasible candidates appear with a note and NaN residual and
/// sort last; the rest are sorted by residual.
std::vector<SweepRow> sweep_parameters(const PrfTrackSet& tracks, std::span<const double> rcs, double carrier_hz,
                                       std::span<const std::size_t> candidate_strides,
                                       std::span<const std::size_t> candidate_cpis, std::size_t chirps_per_cpi,
                                       const SolveOptions& solve = {}, const AssembleOptions& assemble = {});

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path);

/// One CSV row per (block, scatterer).
struct CoefficientRecord {
  std::size_t block = 0;
  std::size_t scatterer = 0;
  Complex value;
  double residual = 0.0;
};

/// CSV `block_index,b,re_a,im_a,abs_a,residual` (b is 1-based).
void write_coefficients_csv(std::span<const CoefficientRecord> records, const std::filesystem::path& path);
std::vector<CoefficientRecord> read_coefficients_csv(const std::filesystem::path& path);

}  // namespace pedrad
