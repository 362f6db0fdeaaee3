// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>

#include "pedrad/signatures.hpp"

namespace pedrad {

struct CfarParams {
  std::size_t guard = 1;
  std::size_t train = 2;
  /// 1-based rank of the order statistic.
  std::size_t rank = 30;
  double scale = 10.0;

  /// Training cells of a full square annulus.
  std::size_t training_cells() const;
  void validate() const;
};

using DetectionMask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Ordered-statistic CFAR on linear power. Near the edges the training
/// window is clipped and the rank rescaled to the cells that remain.
DetectionMask os_cfar(const Eigen::MatrixXd& power, const CfarParams& params);
DetectionMask os_cfar(const SignatureMatrix& matrix, const CfarParams& params);

/// False-alarm probability for exponential noise with `cells` training cells.
double os_cfar_false_alarm(std::size_t cells, std::size_t rank, double scale);

/// Rank actually used when only `cells` of the full training set are available.
std::size_t effective_rank(const CfarParams& params, std::size_t cells);

/// Sets undetected cells to the internal floor.
SignatureMatrix apply_mask(const SignatureMatrix& matrix, const DetectionMask& mask);

}  // namespace pedrad
