// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pedrad/config.hpp"

namespace pedrad {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

struct RunOptions {
  std::size_t threads = 1;
  /// Progress messages; null silences them.
  std::ostream* log = nullptr;
};

/// Outcome of one estimation block.
struct BlockEstimate {
  std::size_t index = 0;
  bool ok = false;
  Eigen::VectorXcd reflectivities;
  double residual = 0.0;
  double condition = 0.0;
  std::string message;
};

struct EstimationRun {
  PrfTrackSet tracks;
  std::vector<double> rcs;
  std::vector<BlockEstimate> blocks;

  std::size_t failed() const;
};

/// Interpolates markers and RCS to the PRI grid and solves every whole block.
/// RCS frame times are taken relative to the first marker sample.
EstimationRun estimate_blocks(const RunConfig& config, const MarkerTrackSet& markers, const RcsSeries& rcs,
                              const RunOptions& options);

/// Files written for one block's signatures.
struct SignatureSet {
  SignatureMatrix range_time;
  SignatureMatrix doppler_time;
  std::vector<SignatureMatrix> range_doppler;
};

SignatureSet compute_signatures(const RadarDataCube& cube, const SignatureConfig& config, std::size_t threads);

/// Cubes from a directory of cube_NNNN.rdc files or from one cube file split
/// into blocks of L*P columns. A directory without cubes falls back to its
/// cubes/ subdirectory.
std::vector<RadarDataCube> load_cube_blocks(const std::filesystem::path& path, const RadarParams& radar);

int cmd_rcs(const RunConfig& config, const RunOptions& options);
int cmd_estimate(const RunConfig& config, const RunOptions& options);
int cmd_synth(const RunConfig& config, const RunOptions& options);
int cmd_signature(const RunConfig& config, const RunOptions& options);
int cmd_compare(const RunConfig& config, const std::filesystem::path& simulated,
                const std::filesystem::path& measured, const RunOptions& options);
int cmd_sweep(const RunConfig& config, const RunOptions& options);
int cmd_pipeline(const RunConfig& config, const RunOptions& options);

}  // namespace pedrad
