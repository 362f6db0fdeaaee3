// SPDX-License-Identifier: Apache-2.0
#include "pedrad/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pedrad/error.hpp"
#include "pedrad/text_io.hpp"

namespace pedrad {
namespace {

void check_shapes(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("matrix shapes differ: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  if (a.size() == 0) throw ShapeError("empty matrices");
}

Eigen::MatrixXd to_domain(const SignatureMatrix& m, const CompareOptions& options) {
  const double floor = options.floor_db;
  if (options.domain == MetricDomain::db) {
    return m.values.unaryExpr([floor](double v) { return std::max(v, floor); });
  }
  return m.values.unaryExpr([floor](double v) { return db_to_power(std::max(v, floor)); });
}

}  // namespace

double nmse(const Eigen::MatrixXd& sim, const Eigen::MatrixXd& ref) {
  check_shapes(sim, ref);
  const double denom = ref.squaredNorm();
  if (!(denom > 0.0)) throw NumericalError("NMSE reference matrix is all zero");
  return (sim - ref).squaredNorm() / denom;
}

double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  check_shapes(a, b);
  const double count = static_cast<double>(a.size());
  const double mu_a = a.sum() / count;
  const double mu_b = b.sum() / count;
  const Eigen::ArrayXXd da = a.array() - mu_a;
  const Eigen::ArrayXXd db = b.array() - mu_b;
  const double var_a = da.square().sum() / count;
  const double var_b = db.square().sum() / count;
  const double cov = (da * db).sum() / count;

  const double lo = std::min(a.minCoeff(), b.minCoeff());
  const double hi = std::max(a.maxCoeff(), b.maxCoeff());
  const double range = hi - lo;
  const double tiny = (1e-8 * range) * (1e-8 * range);

  double lum_den = mu_a * mu_a + mu_b * mu_b;
  double con_den = var_a + var_b;
  double c1 = 0.0, c2 = 0.0;
  if (lum_den <= tiny || con_den <= tiny) {
    c1 = (0.01 * range) * (0.01 * range);
    c2 = (0.03 * range) * (0.03 * range);
  }
  lum_den += c1;
  con_den += c2;
  const double lum = lum_den > 0.0 ? (2.0 * mu_a * mu_b + c1) / lum_den : 1.0;
  const double con = con_den > 0.0 ? (2.0 * cov + c2) / con_den : 1.0;
  return lum * con;
}

Comparison compare(const SignatureMatrix& sim, const SignatureMatrix& meas, const CompareOptions& options) {
  const Eigen::MatrixXd s = to_domain(sim, options);
  const Eigen::MatrixXd m = to_domain(meas, options);
  return {nmse(s, m), ssim(s, m)};
}

void write_comparison_csv(std::span<const BlockComparison> rows, const std::filesystem::path& path) {
  std::string out = "block,nmse,ssim\n";
  for (const auto& r : rows) {
    out += std::to_string(r.block) + ',' + text::format_double(r.metrics.nmse) + ',' +
           text::format_double(r.metrics.ssim) + '\n';
  }
  text::write_file(path, out);
}

}  // namespace pedrad
