// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pedrad/cfar.hpp"
#include "pedrad/em_sbr.hpp"
#include "pedrad/estimation.hpp"
#include "pedrad/metrics.hpp"
#include "pedrad/radar_synth.hpp"
#include "pedrad/signatures.hpp"

namespace pedrad {

struct PathsConfig {
  std::string mesh_pattern;
  std::string marker_file;
  std::string output_dir = "out";
  /// Optional precomputed inputs for the standalone stages.
  std::string rcs_file;
  std::string coefficients_file;
  std::string cube_dir;
  std::string reference_cube;
};

struct SceneConfig {
  double mesh_frame_rate_hz = 60.0;
  Vec3 radar_position = Vec3(0.0, 0.0, 0.65);
};

struct MaterialConfig {
  std::string preset = "skin_77ghz";
  Material material = Material::skin_77ghz();
};

struct AspectSettings {
  AspectConfig aspect;
  std::vector<PolarizationPair> pairs = {PolarizationPair::vv, PolarizationPair::hh};
  bool bistatic_sweep = false;
  double bistatic_step_deg = 1.0;
};

struct EstimationConfig {
  std::size_t stride = 80;
  PolarizationPair pair = PolarizationPair::vv;
  bool strict = true;
  LeastSquaresMode mode = LeastSquaresMode::hermitian;
  double max_condition = 1e12;
  std::vector<std::size_t> sweep_strides = {10, 20, 40, 80, 160, 320};
  std::vector<std::size_t> sweep_cpis = {1, 2, 4, 8};
  /// 0 processes every whole block of the motion.
  std::size_t max_blocks = 0;
};

struct SignatureConfig {
  WindowKind window_1d = WindowKind::hann;
  WindowKind window_2d = WindowKind::hann;
  double display_floor_db = kDisplayFloorDb;
  DopplerSource doppler_source = DopplerSource::first_sample;
  std::size_t rt_pri_stride = 16;
  bool write_csv = false;
  bool write_heatmaps = true;
};

struct CompareConfig {
  bool cfar = true;
  CfarParams cfar_params;
  MetricDomain domain = MetricDomain::db;
};

struct RunConfig {
  PathsConfig paths;
  SceneConfig scene;
  RadarParams radar;
  MaterialConfig material;
  AspectSettings aspect;
  EstimationConfig estimation;
  SynthOptions synthesis;
  SignatureConfig signature;
  CompareConfig compare;
  /// Every key/value pair as read, for the run metadata.
  std::map<std::string, std::string> entries;

  /// Cross-checks values; ConfigError on failure. Does not touch the filesystem.
  void validate() const;
};

struct ConfigKeyInfo {
  std::string section;
  std::string key;
  std::string default_value;
  std::string description;
};

const std::vector<ConfigKeyInfo>& config_keys();

/// `[section]` headers and `key = value` lines; `#` and `;` start comments.
/// Relative paths are resolved against `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& source,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Plain-text key list for --help.
std::string config_help_text();
/// Markdown reference page.
std::string config_reference_markdown();

}  // namespace pedrad
