// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>
#include <sys/wait.h>

#include "pedrad/cfar.hpp"
#include "pedrad/em_sbr.hpp"
#include "pedrad/estimation.hpp"
#include "pedrad/fixtures.hpp"
#include "pedrad/kinematics.hpp"
#include "pedrad/metrics.hpp"
#include "pedrad/radar_synth.hpp"
#include "pedrad/signatures.hpp"
#include "pedrad/text_io.hpp"

using namespace pedrad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  /// Set when the host cannot exercise the criterion; the result is still printed.
  bool host_limited = false;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double db(double v) { return 10.0 * std::log10(v); }

AspectConfig normal_incidence(double spacing = 0.0, bool coarse = false) {
  AspectConfig a;
  a.max_bounces = 3;
  a.ray_spacing = spacing;
  a.coarse_mode = coarse;
  return a;
}

double plate_side() { return 20.0 * wavelength(77e9); }

// 1. Flat PEC plate against 4 pi A^2 / lambda^2.
Outcome plate_rcs() {
  const double lambda = wavelength(77e9);
  const double side = plate_side();
  const GroupedMesh plate(fixtures::make_plate(side));
  const auto t0 = std::chrono::steady_clock::now();
  const auto field = trace_frame(plate, Material::pec(), normal_incidence(), {.threads = 1});
  const double elapsed = seconds_since(t0);
  const double want = 4.0 * kPi * std::pow(side * side, 2) / (lambda * lambda);
  const double err = std::abs(db(field.rcs(PolarizationPair::vv)) - db(want));
  return {err <= 1.0 && elapsed < 60.0,
          "sigma " + fmt(db(field.rcs(PolarizationPair::vv))) + " dBsm vs " + fmt(db(want)) + " dBsm, error " +
              fmt(err, 3) + " dB, " + fmt(elapsed, 3) + " s single-threaded"};
}

// 2. Dielectric plate attenuation against the normal-incidence reflection coefficient.
Outcome dielectric_attenuation() {
  const double f = 77e9;
  const GroupedMesh plate(fixtures::make_plate(plate_side()));
  const Material skin{6.63, 38.1, false};
  const double pec = trace_frame(plate, Material::pec(), normal_incidence()).rcs(PolarizationPair::vv);
  const double diel = trace_frame(plate, skin, normal_incidence()).rcs(PolarizationPair::vv);
  constexpr double eps0 = 8.8541878128e-12;
  const Complex eps(6.63, -38.1 / (2.0 * kPi * f * eps0));
  const Complex n = std::sqrt(eps);
  const double gamma = std::abs((1.0 - n) / (1.0 + n));
  const double want = -20.0 * std::log10(gamma);
  const double got = db(pec) - db(diel);
  return {std::abs(got - want) <= 0.5,
          "attenuation " + fmt(got) + " dB vs " + fmt(want) + " dB (|Gamma| = " + fmt(gamma) + ")"};
}

// 3. Grouped tracing equals a single-group (exhaustive) trace with far fewer triangle tests.
Outcome acceleration() {
  const auto mesh = fixtures::WalkingMannequin().mesh(0.5);
  const GroupedMesh grouped(mesh);
  const GroupedMesh flat(mesh, 1);
  const AspectConfig aspect = normal_incidence(0.004, true);
  TraceStats sg, sf;
  const auto a = trace_frame(grouped, Material::skin_77ghz(), aspect, {}, &sg);
  const auto b = trace_frame(flat, Material::skin_77ghz(), aspect, {}, &sf);
  double scale = 0.0, diff = 0.0;
  for (auto pair : kAllPolarizationPairs) {
    scale = std::max(scale, std::abs(b[pair]));
    diff = std::max(diff, std::abs(a[pair] - b[pair]));
  }
  const double rel = scale > 0.0 ? diff / scale : diff;
  const double ratio = static_cast<double>(sg.triangle_tests) / static_cast<double>(sf.triangle_tests);
  const bool ok = mesh.triangles.size() >= 3000 && rel <= 1e-9 && ratio <= 0.30 && sg.rays_hit > 0;
  return {ok, std::to_string(mesh.triangles.size()) + " triangles, " + std::to_string(grouped.groups().size()) +
                  " groups, relative difference " + fmt(rel, 3) + ", triangle tests " + fmt(100.0 * ratio, 3) +
                  "% of exhaustive (" + std::to_string(sg.triangle_tests) + " vs " +
                  std::to_string(sf.triangle_tests) + ")"};
}

// 4. Wall-clock speedup from 1 to 4 workers on the plate benchmark.
Outcome parallel_scaling() {
  const GroupedMesh plate(fixtures::make_plate(plate_side(), Vec3::Zero(), 8));
  // Finer grid than criterion 1 so each run lasts long enough to time.
  const AspectConfig aspect = normal_incidence(wavelength(77e9) / 40.0);
  const auto timed = [&](int threads, ScatteredField& out) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      out = trace_frame(plate, Material::pec(), aspect, {.threads = threads});
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  ScatteredField one, four;
  const double t1 = timed(1, one);
  const double t4 = timed(4, four);
  double diff = 0.0;
  for (auto pair : kAllPolarizationPairs) diff = std::max(diff, std::abs(one[pair] - four[pair]));
  const double rel = diff / std::abs(one[PolarizationPair::vv]);
  const double speedup = t1 / t4;
  const unsigned hw = std::thread::hardware_concurrency();
  Outcome o{speedup >= 2.0 && rel <= 1e-9,
            "speedup " + fmt(speedup, 3) + "x (" + fmt(t1, 3) + " s vs " + fmt(t4, 3) + " s), relative difference " +
                fmt(rel, 3) + ", host hardware threads " + std::to_string(hw)};
  if (!o.pass && hw < 4 && rel <= 1e-9) {
    o.host_limited = true;
    o.detail += "; fewer than 4 hardware threads, speedup not attainable on this host";
  }
  return o;
}

PrfTrackSet walking_tracks(std::size_t span) {
  const fixtures::WalkingMannequin walker;
  const auto markers = walker.sample_markers(static_cast<std::size_t>(std::ceil(span * 61.2e-6 * 60.0)) + 3, 60.0);
  return interpolate_tracks(markers, Vec3(0.0, 1.0, 0.65), 61.2e-6, span);
}

// 23 scatterers on independent straight paths 3-6 m out, up to 3 m/s.
PrfTrackSet synthetic_tracks(std::size_t span, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PrfTrackSet t;
  t.pri_s = 61.2e-6;
  t.markers = 23;
  t.ranges.resize(static_cast<Eigen::Index>(span), 23);
  t.positions.resize(span * 23);
  for (std::size_t b = 0; b < 23; ++b) {
    const Vec3 start(4.5 + 1.5 * u(rng), 0.5 * u(rng), 1.0 + 0.8 * u(rng));
    const Vec3 vel(3.0 * u(rng), u(rng), u(rng));
    for (std::size_t p = 0; p < span; ++p) {
      const Vec3 x = start + vel * (static_cast<double>(p) * t.pri_s);
      t.positions[p * 23 + b] = x;
      t.ranges(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(b)) = x.norm();
    }
  }
  return t;
}

struct Recovery {
  std::size_t rows = 0;
  double error = 0.0;
  double condition = 0.0;
};

Recovery recover(const PrfTrackSet& tracks, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd truth(23);
  for (auto& v : truth) v = Complex(g(rng), g(rng));
  const std::vector<double> unit(tracks.span(), 1.0);
  auto sys = assemble_system(tracks, unit, 77e9, 80, 2, 1024);
  sys.observations = sys.design * truth;
  const auto sol = solve_reflectivities(sys);
  return {sys.rows(), (sol.reflectivities - truth).norm() / truth.norm(), sol.condition};
}

// 5. Exact recovery at the operating point and the residual trend of the sweep.
Outcome regression() {
  const std::size_t P = 1024;
  const auto synthetic = recover(synthetic_tracks(2 * P, 1), 5);
  auto tracks = walking_tracks(4 * 8 * P);
  // Reported only: mirrored body markers make this geometry far worse conditioned.
  const auto body = recover(slice_tracks(tracks, 0, 2 * P), 5);

  // Smooth positive RCS fluctuations drive the sweep.
  std::vector<double> rcs(tracks.span());
  for (std::size_t p = 0; p < rcs.size(); ++p) {
    const double t = static_cast<double>(p) * 61.2e-6;
    rcs[p] = 0.2 + 0.1 * std::sin(2.0 * kPi * 1.8 * t) + 0.05 * std::sin(2.0 * kPi * 7.3 * t + 1.0);
  }
  const auto table = sweep_parameters(tracks, rcs, 77e9, std::vector<std::size_t>{80, 89},
                                      std::vector<std::size_t>{2, 8}, P);
  double near = std::nan(""), wide = std::nan("");
  for (const auto& r : table) {
    if (r.rows == 26 && r.cpis == 2) near = r.mean_residual;
    if (r.rows == 92) wide = r.mean_residual;
  }
  const bool ok = synthetic.rows == 26 && synthetic.error < 1e-9 && wide > near;
  return {ok, "K = " + std::to_string(synthetic.rows) + ", relative coefficient error " + fmt(synthetic.error, 3) +
                  " (condition " + fmt(synthetic.condition, 3) + "); walking-body tracks " + fmt(body.error, 3) +
                  " (condition " + fmt(body.condition, 3) + "); sweep residual K=26 " + fmt(near, 4) +
                  (wide > near ? " < " : " >= ") + "K=92 " + fmt(wide, 4)};
}

// 6. Point target at 3.75 m closing at 1.5 m/s under the default radar.
Outcome point_target() {
  const RadarParams params;
  const auto t0 = std::chrono::steady_clock::now();
  const auto tracks = fixtures::point_target_tracks(3.75, 1.5, params.pri_s, params.block_pris());
  const auto cube = synthesize_cube(Eigen::VectorXcd::Ones(1), tracks, params);
  const auto rt = range_time(cube);
  const auto dt = doppler_time(cube);
  const auto rd = range_doppler(cube, 0);
  const double elapsed = seconds_since(t0);

  const Eigen::Index n = rt.values.rows();
  Eigen::Index first = 0;
  rt.values.col(0).maxCoeff(&first);
  const long long range_bin = static_cast<long long>(first) - n / 2;
  int ridge_misses = 0;
  for (Eigen::Index p = 0; p < rt.values.cols(); ++p) {
    Eigen::Index r = 0;
    rt.values.col(p).maxCoeff(&r);
    const long long want = std::llround(tracks.ranges(p, 0) / params.range_resolution());
    if (std::llabs(static_cast<long long>(r) - n / 2 - want) > 1) ++ridge_misses;
  }
  const long long want_d = std::llround((2.0 * 1.5 / params.wavelength()) / 15.9);
  Eigen::Index d = 0;
  dt.values.col(0).maxCoeff(&d);
  const long long doppler_bin = static_cast<long long>(d) - static_cast<long long>(params.chirps_per_cpi / 2);
  const auto [rg, rdd] = rd.peak();
  const long long joint_r = static_cast<long long>(rg) - n / 2;
  const long long joint_d = static_cast<long long>(rdd) - static_cast<long long>(params.chirps_per_cpi / 2);
  const double mean_range = tracks.ranges.col(0).head(static_cast<Eigen::Index>(params.chirps_per_cpi)).mean();
  const bool ok = range_bin == 50 && ridge_misses == 0 && std::llabs(doppler_bin - want_d) <= 1 &&
                  std::llabs(joint_d - want_d) <= 1 &&
                  std::llabs(joint_r - std::llround(mean_range / params.range_resolution())) <= 1 && elapsed < 10.0;
  return {ok, "range bin " + std::to_string(range_bin) + ", Doppler bin " + std::to_string(doppler_bin) +
                  " (expected " + std::to_string(want_d) + "), range-Doppler peak (" + std::to_string(joint_r) + ", " +
                  std::to_string(joint_d) + "), " + fmt(elapsed, 3) + " s"};
}

// 7. Derived radar parameters.
Outcome derived_parameters() {
  const RadarParams params;
  const double dr = params.range_resolution();
  const double fd = params.doppler_resolution();
  return {dr == 0.075 && std::abs(fd - 15.9) <= 0.1 && params.samples_per_chirp() == 512,
          "range resolution " + fmt(dr, 17) + " m, Doppler resolution " + fmt(fd, 6) + " Hz, N = " +
              std::to_string(params.samples_per_chirp())};
}

// 8. Metric identities and the OS-CFAR false-alarm rate.
Outcome metrics_and_cfar() {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(64, 48);
  for (auto& v : x.reshaped()) v = g(rng);
  const double n0 = nmse(x, x);
  const double s1 = ssim(x, x);
  const double n1 = nmse(2.0 * x, x);

  CfarParams p;
  p.scale = 4.0;
  const Eigen::Index side = 1000;
  std::exponential_distribution<double> e(1.0);
  Eigen::MatrixXd field(side, side);
  for (auto& v : field.reshaped()) v = e(rng);
  const auto mask = os_cfar(field, p);
  const auto reach = static_cast<Eigen::Index>(p.guard + p.train);
  const auto guard = static_cast<Eigen::Index>(p.guard);
  const auto extent = [&](Eigen::Index i, Eigen::Index h) {
    return std::min(side - 1, i + h) - std::max<Eigen::Index>(0, i - h) + 1;
  };
  double mean = 0.0, var = 0.0;
  for (Eigen::Index c = 0; c < side; ++c) {
    for (Eigen::Index r = 0; r < side; ++r) {
      const auto cells =
          static_cast<std::size_t>(extent(r, reach) * extent(c, reach) - extent(r, guard) * extent(c, guard));
      const double pf = os_cfar_false_alarm(cells, effective_rank(p, cells), p.scale);
      mean += pf;
      var += pf * (1.0 - pf);
    }
  }
  const double count = static_cast<double>(mask.count());
  const double z = (count - mean) / std::sqrt(var);
  const bool ok = n0 == 0.0 && std::abs(s1 - 1.0) <= 1e-12 && n1 == 1.0 && std::abs(z) <= 3.0;
  return {ok, "nmse(x,x) " + fmt(n0) + ", ssim(x,x) - 1 = " + fmt(s1 - 1.0, 3) + ", nmse(2x,x) " + fmt(n1, 17) +
                  ", CFAR false alarms " + fmt(count, 8) + " vs " + fmt(mean, 8) + " expected (z = " + fmt(z, 3) +
                  ")"};
}

int run(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 9. Pipeline outputs are byte-identical across worker counts.
Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("pedrad_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const auto cfg = fixtures::write_walking_fixture(root / "scene");
  const std::string cli = std::string("\"") + PEDRAD_CLI_PATH + "\"";
  const int a = run(cli + " -q --threads 1 pipeline -c \"" + cfg.string() + "\" -o \"" + (root / "a").string() + "\"");
  const int b = run(cli + " -q --threads 4 pipeline -c \"" + cfg.string() + "\" -o \"" + (root / "b").string() + "\"");
  std::size_t files = 0, differing = 0;
  if (a == 0 && b == 0) {
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
      if (!entry.is_regular_file()) continue;
      ++files;
      const fs::path other = root / "b" / fs::relative(entry.path(), root / "a");
      if (!fs::exists(other) || text::read_file(entry.path()) != text::read_file(other)) ++differing;
    }
    for (const auto& entry : fs::recursive_directory_iterator(root / "b")) {
      if (entry.is_regular_file() && !fs::exists(root / "a" / fs::relative(entry.path(), root / "b"))) ++differing;
    }
  }
  fs::remove_all(root);
  return {a == 0 && b == 0 && files > 0 && differing == 0,
          "exit codes " + std::to_string(a) + "/" + std::to_string(b) + ", " + std::to_string(files) + " files, " +
              std::to_string(differing) + " differing"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"flat-plate RCS", plate_rcs},
      {"dielectric attenuation", dielectric_attenuation},
      {"acceleration equivalence and gain", acceleration},
      {"parallel scaling", parallel_scaling},
      {"regression recovery", regression},
      {"point-target signature placement", point_target},
      {"parameter derivation", derived_parameters},
      {"metric identities and OS-CFAR", metrics_and_cfar},
      {"pipeline determinism", determinism},
  };
  int failures = 0;
  int host_limited = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " | "
              << o.detail << std::endl;
    if (!o.pass) (o.host_limited ? host_limited : failures) += 1;
  }
  std::cout << "summary: " << criteria.size() - static_cast<std::size_t>(failures + host_limited) << " passed, "
            << failures << " failed, " << host_limited << " failed for lack of hardware threads" << std::endl;
  return failures == 0 ? 0 : 1;
}
