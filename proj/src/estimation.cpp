// SPDX-License-Identifier: Apache-2.0
#include "pedrad/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "pedrad/error.hpp"
#include "pedrad/text_io.hpp"

namespace pedrad {

std::size_t regression_row_count(std::size_t cpis, std::size_t chirps_per_cpi, std::size_t stride) {
  if (stride == 0) throw ParameterError("PRI stride M must be >= 1");
  const std::size_t block = cpis * chirps_per_cpi;
  return (2 * block + stride) / (2 * stride);
}

std::vector<std::size_t> regression_row_offsets(std::size_t rows, std::size_t block_pris) {
  std::vector<std::size_t> out(rows, 0);
  if (rows <= 1 || block_pris <= 1) return out;
  const double step = static_cast<double>(block_pris - 1) / static_cast<double>(rows - 1);
  for (std::size_t k = 0; k < rows; ++k) {
    out[k] = static_cast<std::size_t>(std::llround(static_cast<double>(k) * step));
  }
  return out;
}

Complex propagation_phase(double range_m, double carrier_hz) {
  return std::polar(1.0, -2.0 * kPi * carrier_hz * (2.0 * range_m / kSpeedOfLight));
}

RegressionSystem assemble_system(const PrfTrackSet& tracks, std::span<const double> rcs, double carrier_hz,
                                 std::size_t stride, std::size_t cpis, std::size_t chirps_per_cpi,
                                 std::size_t first_pri, const AssembleOptions& options) {
  if (stride < 1) throw ParameterError("PRI stride M must be >= 1");
  if (cpis < 1) throw ParameterError("CPI count L must be >= 1");
  if (chirps_per_cpi < 1) throw ParameterError("chirps per CPI P must be >= 1");
  const std::size_t block = cpis * chirps_per_cpi;
  if (first_pri + block > tracks.span()) {
    throw RangeError("block needs " + std::to_string(block) + " PRIs from " + std::to_string(first_pri) +
                     " but tracks cover " + std::to_string(tracks.span()));
  }
  if (rcs.size() != tracks.span()) throw ShapeError("RCS samples and tracks must cover the same PRIs");
  const std::size_t rows = regression_row_count(cpis, chirps_per_cpi, stride);
  const std::size_t scatterers = tracks.markers;
  if (rows == 0) throw ParameterError("stride M exceeds the block length; no regression rows");
  if (options.strict && rows < scatterers) {
    throw UnderdeterminedError("K = " + std::to_string(rows) + " rows < B = " + std::to_string(scatterers) +
                               " scatterers");
  }

  RegressionSystem system;
  system.stride = stride;
  system.cpis = cpis;
  system.chirps_per_cpi = chirps_per_cpi;
  system.first_pri = first_pri;
  system.design.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(scatterers));
  system.observations.resize(static_cast<Eigen::Index>(rows));
  const auto offsets = regression_row_offsets(rows, block);
  for (std::size_t k = 0; k < rows; ++k) {
    const std::size_t p = first_pri + offsets[k];
    system.row_pris.push_back(p);
    for (std::size_t b = 0; b < scatterers; ++b) {
      system.design(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(b)) =
          propagation_phase(tracks.ranges(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(b)), carrier_hz);
    }
    if (!(rcs[p] >= 0.0)) throw ParameterError("RCS samples must be non-negative");
    system.observations(static_cast<Eigen::Index>(k)) = std::sqrt(rcs[p]);
  }
  return system;
}

RegressionSolution solve_reflectivities(const RegressionSystem& system, const SolveOptions& options) {
  const auto& a = system.design;
  const auto& y = system.observations;
  if (a.rows() == 0 || a.cols() == 0) throw ShapeError("empty regression system");
  if (y.size() != a.rows()) throw ShapeError("observation count does not match design rows");

  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  const double s_max = sv(0);
  const double s_min = sv(sv.size() - 1);
  const bool underdetermined = a.rows() < a.cols();
  const double condition = (s_min > 0.0) ? s_max / s_min : std::numeric_limits<double>::infinity();
  if (!(condition <= options.max_condition)) {
    throw SingularityError("design matrix is singular or ill-conditioned (condition " +
                               text::format_double(condition) + ")",
                           condition);
  }

  RegressionSolution out;
  out.condition = condition;
  if (underdetermined) {
    out.reflectivities = a.completeOrthogonalDecomposition().solve(y);
  } else if (options.mode == LeastSquaresMode::hermitian) {
    out.reflectivities = a.colPivHouseholderQr().solve(y);
  } else {
    const Eigen::MatrixXcd at = a.transpose();
    const Eigen::MatrixXcd gram = at * a;
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(gram);
    out.reflectivities = lu.solve(at * y);
    if (!out.reflectivities.allFinite()) {
      throw SingularityError("transpose normal equations are singular", std::numeric_limits<double>::infinity());
    }
  }
  const double denom = y.squaredNorm();
  const double num = (y - a * out.reflectivities).squaredNorm();
  out.residual = denom > 0.0 ? num / denom : 0.0;
  return out;
}

std::vector<SweepRow> sweep_parameters(const PrfTrackSet& tracks, std::span<const double> rcs, double carrier_hz,
                                       std::span<const std::size_t> candidate_strides,
                                       std::span<const std::size_t> candidate_cpis, std::size_t chirps_per_cpi,
                                       const SolveOptions& solve, const AssembleOptions& assemble) {
  std::vector<SweepRow> table;
  for (const std::size_t cpis : candidate_cpis) {
    for (const std::size_t stride : candidate_strides) {
      SweepRow row;
      row.stride = stride;
      row.cpis = cpis;
      row.mean_residual = std::numeric_limits<double>::quiet_NaN();
      const std::size_t block = cpis * chirps_per_cpi;
      if (stride == 0 || cpis == 0 || block == 0) {
        row.note = "invalid candidate";
        table.push_back(row);
        continue;
      }
      row.rows = regression_row_count(cpis, chirps_per_cpi, stride);
      row.blocks = block > 0 ? tracks.span() / block : 0;
      if (row.rows == 0) {
        row.note = "stride exceeds block";
      } else if (assemble.strict && row.rows < tracks.markers) {
        row.note = "underdetermined (K < B)";
      } else if (row.blocks == 0) {
        row.note = "motion shorter than one block";
      } else {
        double total = 0.0;
        std::size_t solved = 0;
        for (std::size_t blk = 0; blk < row.blocks; ++blk) {
          try {
            const auto system = assemble_system(tracks, rcs, carrier_hz, stride, cpis, chirps_per_cpi,
                                                blk * block, assemble);
            total += solve_reflectivities(system, solve).residual;
            ++solved;
          } catch (const NumericalError&) {
            ++row.failed_blocks;
          }
        }
        if (solved > 0) row.mean_residual = total / static_cast<double>(solved);
        if (row.failed_blocks > 0) row.note = std::to_string(row.failed_blocks) + " singular blocks";
      }
      table.push_back(row);
    }
  }
  std::stable_sort(table.begin(), table.end(), [](const SweepRow& a, const SweepRow& b) {
    const bool an = std::isnan(a.mean_residual);
    const bool bn = std::isnan(b.mean_residual);
    if (an != bn) return bn;
    if (an) return false;
    return a.mean_residual < b.mean_residual;
  });
  return table;
}

void write_sweep_csv(std::span<const SweepRow> rows, const std::filesystem::path& path) {
  std::string out = "M,L,K,mean_residual,blocks,failed_blocks,note\n";
  for (const auto& r : rows) {
    out += std::to_string(r.stride) + ',' + std::to_string(r.cpis) + ',' + std::to_string(r.rows) + ',' +
           (std::isnan(r.mean_residual) ? std::string("nan") : text::format_double(r.mean_residual)) + ',' +
           std::to_string(r.blocks) + ',' + std::to_string(r.failed_blocks) + ',' + r.note + '\n';
  }
  text::write_file(path, out);
}

void write_coefficients_csv(std::span<const CoefficientRecord> records, const std::filesystem::path& path) {
  std::string out = "block_index,b,re_a,im_a,abs_a,residual\n";
  for (const auto& r : records) {
    out += std::to_string(r.block) + ',' + std::to_string(r.scatterer + 1) + ',' + text::format_double(r.value.real()) +
           ',' + text::format_double(r.value.imag()) + ',' + text::format_double(std::abs(r.value)) + ',' +
           text::format_double(r.residual) + '\n';
  }
  text::write_file(path, out);
}

std::vector<CoefficientRecord> read_coefficients_csv(const std::filesystem::path& path) {
  const std::string source = path.string();
  const std::string contents = text::read_file(path);
  std::vector<CoefficientRecord> out;
  std::size_t line_no = 0;
  bool header = true;
  for (const auto raw : text::split(contents, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    if (header) {
      if (line != "block_index,b,re_a,im_a,abs_a,residual") throw FormatError(source + ": unexpected header");
      header = false;
      continue;
    }
    const auto f = text::split(line, ',');
    if (f.size() != 6) throw FormatError(source + ":" + std::to_string(line_no) + ": expected 6 fields");
    long long block = 0, b = 0;
    double re = 0, im = 0, abs_a = 0, residual = 0;
    if (!text::parse_int(f[0], block) || !text::parse_int(f[1], b) || !text::parse_double(f[2], re) ||
        !text::parse_double(f[3], im) || !text::parse_double(f[4], abs_a) || !text::parse_double(f[5], residual) ||
        block < 0 || b < 1) {
      throw ParseError(source, line_no, "bad coefficient row");
    }
    out.push_back({static_cast<std::size_t>(block), static_cast<std::size_t>(b - 1), Complex(re, im), residual});
  }
  return out;
}

}  // namespace pedrad
