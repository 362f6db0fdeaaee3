// SPDX-License-Identifier: Apache-2.0
#include "pedrad/signatures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "binary_io.hpp"
#include "pedrad/error.hpp"
#include "pedrad/parallel.hpp"
#include "pedrad/text_io.hpp"

namespace pedrad {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Forward complex transform of fixed length; execute() is safe to call
/// concurrently with distinct buffers.
class ForwardFft {
 public:
  explicit ForwardFft(std::size_t n) : n_(n) {
    std::vector<Complex> in(n), out(n);
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                             reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) throw Error("FFT planning failed");
  }
  ForwardFft(const ForwardFft&) = delete;
  ForwardFft& operator=(const ForwardFft&) = delete;
  ~ForwardFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }

  void execute(std::vector<Complex>& in, std::vector<Complex>& out) const {
    fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
  }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_plan plan_ = nullptr;
};

/// out[i] = in[(i + n/2) mod n], so index i maps to bin i - n/2.
template <typename T>
void fftshift_into(const std::vector<T>& in, std::vector<T>& out) {
  const std::size_t n = in.size();
  const std::size_t half = n / 2;
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = in[(i + half) % n];
}

double window_sum(const std::vector<double>& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

std::vector<double> times_for(const RadarDataCube& cube, std::size_t count, std::size_t step) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<double>(i * step) * cube.params.pri_s;
  return t;
}

SignatureAxis range_axis(const RadarDataCube& cube, std::size_t n) {
  SignatureAxis axis{"range", "m", centered_bins(n)};
  for (auto& v : axis.values) v *= cube.params.range_resolution();
  return axis;
}

SignatureAxis doppler_axis(const RadarDataCube& cube, std::size_t n) {
  SignatureAxis axis{"doppler", "Hz", centered_bins(n)};
  const double df = 1.0 / (static_cast<double>(n) * cube.params.pri_s);
  for (auto& v : axis.values) v *= df;
  return axis;
}

void check_cube(const RadarDataCube& cube) {
  if (cube.samples.size() == 0) throw ShapeError("empty radar data cube");
  if (!cube.samples.allFinite()) throw ShapeError("radar data cube has non-finite samples");
}

}  // namespace

std::string to_string(SignatureKind kind) {
  switch (kind) {
    case SignatureKind::range_time: return "range_time";
    case SignatureKind::doppler_time: return "doppler_time";
    case SignatureKind::range_doppler: return "range_doppler";
  }
  return "unknown";
}

SignatureKind parse_signature_kind(std::string_view name) {
  if (name == "range_time" || name == "rt") return SignatureKind::range_time;
  if (name == "doppler_time" || name == "dt") return SignatureKind::doppler_time;
  if (name == "range_doppler" || name == "rd") return SignatureKind::range_doppler;
  throw ConfigError("unknown signature kind '" + std::string(name) + "'");
}

WindowKind parse_window(std::string_view name) {
  if (name == "rect" || name == "rectangular") return WindowKind::rect;
  if (name == "hann" || name == "hanning") return WindowKind::hann;
  if (name == "hamming") return WindowKind::hamming;
  if (name == "blackman") return WindowKind::blackman;
  throw ConfigError("unknown window '" + std::string(name) + "' (expected rect, hann, hamming or blackman)");
}

std::string to_string(WindowKind window) {
  switch (window) {
    case WindowKind::rect: return "rect";
    case WindowKind::hann: return "hann";
    case WindowKind::hamming: return "hamming";
    case WindowKind::blackman: return "blackman";
  }
  return "unknown";
}

std::vector<double> make_window(WindowKind window, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length < 2 || window == WindowKind::rect) return w;
  const double denom = static_cast<double>(length - 1);
  for (std::size_t i = 0; i < length; ++i) {
    const double x = 2.0 * kPi * static_cast<double>(i) / denom;
    switch (window) {
      case WindowKind::hann: w[i] = 0.5 - 0.5 * std::cos(x); break;
      case WindowKind::hamming: w[i] = 0.54 - 0.46 * std::cos(x); break;
      case WindowKind::blackman: w[i] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x); break;
      case WindowKind::rect: break;
    }
  }
  return w;
}

double power_to_db(double power) {
  const double floor_power = std::pow(10.0, kSignatureFloorDb / 10.0);
  return 10.0 * std::log10(std::max(power, floor_power));
}

double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

Eigen::MatrixXd SignatureMatrix::power() const {
  return values.unaryExpr([](double v) { return db_to_power(v); });
}

std::pair<Eigen::Index, Eigen::Index> SignatureMatrix::peak() const {
  Eigen::Index r = 0, c = 0;
  values.maxCoeff(&r, &c);
  return {r, c};
}

std::vector<double> centered_bins(std::size_t n) {
  std::vector<double> out(n);
  const auto half = static_cast<long long>(n / 2);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(static_cast<long long>(i) - half);
  return out;
}

SignatureMatrix range_time(const RadarDataCube& cube, WindowKind window, std::size_t threads) {
  check_cube(cube);
  const std::size_t n = cube.fast_time();
  const std::size_t cols = cube.slow_time();
  const auto w = make_window(window, n);
  const double norm = window_sum(w);
  const ForwardFft fft(n);

  SignatureMatrix out;
  out.kind = SignatureKind::range_time;
  out.window = to_string(window);
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  parallel_for(cols, threads, [&](std::size_t p) {
    std::vector<Complex> in(n), spectrum(n), shifted;
    for (std::size_t i = 0; i < n; ++i) in[i] = w[i] * cube.samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p));
    fft.execute(in, spectrum);
    fftshift_into(spectrum, shifted);
    for (std::size_t g = 0; g < n; ++g) {
      out.values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(p)) = power_to_db(std::norm(shifted[g] / norm));
    }
  });
  out.rows = range_axis(cube, n);
  out.cols = {"time", "s", times_for(cube, cols, 1)};
  return out;
}

SignatureMatrix doppler_time(const RadarDataCube& cube, WindowKind window, DopplerSource source) {
  check_cube(cube);
  const std::size_t p_len = cube.params.chirps_per_cpi;
  if (p_len < 1 || cube.slow_time() < p_len) throw ShapeError("cube holds fewer PRIs than one CPI");
  const std::size_t cpis = cube.slow_time() / p_len;
  const auto w = make_window(window, p_len);
  const double norm = window_sum(w);
  const ForwardFft fft(p_len);

  SignatureMatrix out;
  out.kind = SignatureKind::doppler_time;
  out.window = to_string(window);
  out.values.resize(static_cast<Eigen::Index>(p_len), static_cast<Eigen::Index>(cpis));
  std::vector<Complex> in(p_len), spectrum(p_len), shifted;
  for (std::size_t l = 0; l < cpis; ++l) {
    for (std::size_t p = 0; p < p_len; ++p) {
      const auto col = static_cast<Eigen::Index>(l * p_len + p);
      const Complex y = source == DopplerSource::first_sample ? cube.samples(0, col) : cube.samples.col(col).sum();
      in[p] = w[p] * y;
    }
    fft.execute(in, spectrum);
    fftshift_into(spectrum, shifted);
    for (std::size_t d = 0; d < p_len; ++d) {
      out.values(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(l)) = power_to_db(std::norm(shifted[d] / norm));
    }
  }
  out.rows = doppler_axis(cube, p_len);
  out.cols = {"time", "s", times_for(cube, cpis, p_len)};
  return out;
}

SignatureMatrix range_doppler(const RadarDataCube& cube, std::size_t cpi, WindowKind window, std::size_t threads) {
  check_cube(cube);
  const std::size_t n = cube.fast_time();
  const std::size_t p_len = cube.params.chirps_per_cpi;
  if (p_len < 1 || (cpi + 1) * p_len > cube.slow_time()) {
    throw RangeError("CPI " + std::to_string(cpi) + " is outside the cube");
  }
  const auto wn = make_window(window, n);
  const auto wp = make_window(window, p_len);
  const double norm = window_sum(wn) * window_sum(wp);
  const ForwardFft fft_fast(n);
  const ForwardFft fft_slow(p_len);

  // Fast-time transform of every chirp, slow-time window folded in.
  Eigen::MatrixXcd stage(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p_len));
  parallel_for(p_len, threads, [&](std::size_t p) {
    std::vector<Complex> in(n), spectrum(n), shifted;
    const auto col = static_cast<Eigen::Index>(cpi * p_len + p);
    for (std::size_t i = 0; i < n; ++i) in[i] = wn[i] * wp[p] * cube.samples(static_cast<Eigen::Index>(i), col);
    fft_fast.execute(in, spectrum);
    fftshift_into(spectrum, shifted);
    for (std::size_t g = 0; g < n; ++g) stage(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(p)) = shifted[g];
  });

  SignatureMatrix out;
  out.kind = SignatureKind::range_doppler;
  out.window = to_string(window);
  out.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p_len));
  parallel_for(n, threads, [&](std::size_t g) {
    std::vector<Complex> in(p_len), spectrum(p_len), shifted;
    for (std::size_t p = 0; p < p_len; ++p) in[p] = stage(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(p));
    fft_slow.execute(in, spectrum);
    fftshift_into(spectrum, shifted);
    for (std::size_t d = 0; d < p_len; ++d) {
      out.values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(d)) = power_to_db(std::norm(shifted[d] / norm));
    }
  });
  out.rows = range_axis(cube, n);
  out.cols = doppler_axis(cube, p_len);
  return out;
}

SignatureMatrix decimate_columns(const SignatureMatrix& matrix, std::size_t stride) {
  if (stride < 1) throw ParameterError("decimation stride must be >= 1");
  if (stride == 1) return matrix;
  const auto cols = static_cast<std::size_t>(matrix.values.cols());
  const std::size_t kept = (cols + stride - 1) / stride;
  SignatureMatrix out = matrix;
  out.values.resize(matrix.values.rows(), static_cast<Eigen::Index>(kept));
  out.cols.values.clear();
  for (std::size_t j = 0; j < kept; ++j) {
    out.values.col(static_cast<Eigen::Index>(j)) = matrix.values.col(static_cast<Eigen::Index>(j * stride));
    if (j * stride < matrix.cols.values.size()) out.cols.values.push_back(matrix.cols.values[j * stride]);
  }
  return out;
}

void write_signature_csv(const SignatureMatrix& matrix, const std::filesystem::path& path,
                         std::optional<double> floor_db) {
  std::string out;
  out.reserve(static_cast<std::size_t>(matrix.values.size()) * 12);
  for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) {
      double v = matrix.values(r, c);
      if (floor_db) v = std::max(v, *floor_db);
      if (c > 0) out += ',';
      out += text::format_double(v);
    }
    out += '\n';
  }
  text::write_file(path, out);
}

void write_signature_binary(const SignatureMatrix& matrix, const std::filesystem::path& path) {
  std::string out = detail::make_header("SIG1", {static_cast<std::uint32_t>(matrix.values.rows()),
                                                 static_cast<std::uint32_t>(matrix.values.cols()),
                                                 static_cast<std::uint32_t>(matrix.kind)});
  for (Eigen::Index r = 0; r < matrix.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.values.cols(); ++c) detail::put_f32(out, static_cast<float>(matrix.values(r, c)));
  }
  text::write_file(path, out);
}

SignatureMatrix read_signature_binary(const std::filesystem::path& path) {
  const std::string data = text::read_file(path);
  const auto h = detail::read_header(data, "SIG1", 1, path.string());
  if (h.extra > 2) throw FormatError(path.string() + ": unknown signature kind code " + std::to_string(h.extra));
  SignatureMatrix out;
  out.kind = static_cast<SignatureKind>(h.extra);
  out.values.resize(h.rows, h.cols);
  std::size_t offset = 16;
  for (Eigen::Index r = 0; r < out.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.values.cols(); ++c, offset += 4) {
      const float v = detail::get_f32(data, offset);
      if (std::isnan(v)) throw FormatError(path.string() + ": NaN value");
      out.values(r, c) = v;
    }
  }
  out.rows = {"row", "bin", centered_bins(h.rows)};
  out.cols.label = "column";
  out.cols.unit = "index";
  for (std::uint32_t c = 0; c < h.cols; ++c) out.cols.values.push_back(c);
  return out;
}

void write_heatmap_pgm(const SignatureMatrix& matrix, const std::filesystem::path& path, double floor_db) {
  const auto rows = matrix.values.rows();
  const auto cols = matrix.values.cols();
  const double top = std::max(matrix.values.maxCoeff(), floor_db);
  const double span = top - floor_db;
  std::string out = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  for (Eigen::Index r = rows - 1; r >= 0; --r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double v = std::clamp(matrix.values(r, c), floor_db, top);
      const double level = span > 0.0 ? (v - floor_db) / span * 255.0 : 0.0;
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(level))));
    }
  }
  text::write_file(path, out);

  const auto axis_line = [](const char* name, const SignatureAxis& a) {
    std::string s = std::string(name) + " = " + a.label + " [" + a.unit + "]";
    if (!a.values.empty()) s += " " + text::format_double(a.values.front()) + " .. " + text::format_double(a.values.back());
    return s + "\n";
  };
  std::string meta = "kind = " + to_string(matrix.kind) + "\n";
  meta += "width = " + std::to_string(cols) + "\nheight = " + std::to_string(rows) + "\n";
  meta += axis_line("vertical", matrix.rows) + "vertical_origin = bottom\n";
  meta += axis_line("horizontal", matrix.cols);
  meta += "black_db = " + text::format_double(floor_db) + "\nwhite_db = " + text::format_double(top) + "\n";
  meta += "window = " + matrix.window + "\n";
  text::write_file(std::filesystem::path(path.string() + ".txt"), meta);
}

}  // namespace pedrad
