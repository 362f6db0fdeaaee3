// SPDX-License-Identifier: Apache-2.0
#include "pedrad/cfar.hpp"

#include <algorithm>
#include <cmath>

#include "pedrad/error.hpp"

namespace pedrad {

std::size_t CfarParams::training_cells() const {
  const std::size_t outer = 2 * (guard + train) + 1;
  const std::size_t inner = 2 * guard + 1;
  return outer * outer - inner * inner;
}

void CfarParams::validate() const {
  if (train < 1) throw ParameterError("CFAR training width must be >= 1");
  if (rank < 1 || rank > training_cells()) {
    throw ParameterError("CFAR rank " + std::to_string(rank) + " outside [1, " + std::to_string(training_cells()) + "]");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ParameterError("CFAR scale must be positive");
}

std::size_t effective_rank(const CfarParams& params, std::size_t cells) {
  if (cells == params.training_cells()) return params.rank;
  const double scaled = static_cast<double>(params.rank) * static_cast<double>(cells) /
                        static_cast<double>(params.training_cells());
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(scaled)), 1, std::max<std::size_t>(cells, 1));
}

double os_cfar_false_alarm(std::size_t cells, std::size_t rank, double scale) {
  double p = 1.0;
  for (std::size_t i = 0; i < rank; ++i) {
    const double t = static_cast<double>(cells - i);
    p *= t / (t + scale);
  }
  return p;
}

DetectionMask os_cfar(const Eigen::MatrixXd& power, const CfarParams& params) {
  params.validate();
  const auto rows = power.rows();
  const auto cols = power.cols();
  const auto g = static_cast<Eigen::Index>(params.guard);
  const auto reach = static_cast<Eigen::Index>(params.guard + params.train);
  DetectionMask mask = DetectionMask::Constant(rows, cols, false);
  std::vector<double> cells;
  cells.reserve(params.training_cells());
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      cells.clear();
      const Eigen::Index r0 = std::max<Eigen::Index>(0, r - reach);
      const Eigen::Index r1 = std::min<Eigen::Index>(rows - 1, r + reach);
      const Eigen::Index c0 = std::max<Eigen::Index>(0, c - reach);
      const Eigen::Index c1 = std::min<Eigen::Index>(cols - 1, c + reach);
      for (Eigen::Index cc = c0; cc <= c1; ++cc) {
        for (Eigen::Index rr = r0; rr <= r1; ++rr) {
          if (std::abs(rr - r) <= g && std::abs(cc - c) <= g) continue;
          cells.push_back(power(rr, cc));
        }
      }
      if (cells.empty()) continue;
      const std::size_t k = effective_rank(params, cells.size());
      auto nth = cells.begin() + static_cast<std::ptrdiff_t>(k - 1);
      std::nth_element(cells.begin(), nth, cells.end());
      mask(r, c) = power(r, c) > params.scale * *nth;
    }
  }
  return mask;
}

DetectionMask os_cfar(const SignatureMatrix& matrix, const CfarParams& params) {
  return os_cfar(matrix.power(), params);
}

SignatureMatrix apply_mask(const SignatureMatrix& matrix, const DetectionMask& mask) {
  if (mask.rows() != matrix.values.rows() || mask.cols() != matrix.values.cols()) {
    throw ShapeError("detection mask does not match the signature");
  }
  SignatureMatrix out = matrix;
  for (Eigen::Index c = 0; c < mask.cols(); ++c) {
    for (Eigen::Index r = 0; r < mask.rows(); ++r) {
      if (!mask(r, c)) out.values(r, c) = kSignatureFloorDb;
    }
  }
  return out;
}

}  // namespace pedrad
