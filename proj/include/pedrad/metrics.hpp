// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <span>

#include <Eigen/Core>

#include "pedrad/signatures.hpp"

namespace pedrad {

/// ||sim - ref||^2 / ||ref||^2. The reference is always the measured side.
double nmse(const Eigen::MatrixXd& sim, const Eigen::MatrixXd& ref);

/// Global-statistics SSIM over the whole matrix. The stabilising constants
/// (0.01 D)^2 and (0.03 D)^2, D the joint dynamic range, are only added when
/// a denominator would otherwise vanish.
double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

enum class MetricDomain {
  /// dB values clipped at the display floor.
  db,
  /// Linear power.
  linear,
};

struct CompareOptions {
  MetricDomain domain = MetricDomain::db;
  double floor_db = kDisplayFloorDb;
};

struct Comparison {
  double nmse = 0.0;
  double ssim = 0.0;
};

Comparison compare(const SignatureMatrix& sim, const SignatureMatrix& meas, const CompareOptions& options = {});

struct BlockComparison {
  std::size_t block = 0;
  Comparison metrics;
};

/// CSV `block,nmse,ssim`.
void write_comparison_csv(std::span<const BlockComparison> rows, const std::filesystem::path& path);

}  // namespace pedrad
