// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include "pedrad/config.hpp"
#include "pedrad/error.hpp"
#include "pedrad/estimation.hpp"
#include "pedrad/fixtures.hpp"
#include "pedrad/pipeline.hpp"
#include "pedrad/text_io.hpp"
#include "test_support.hpp"

using namespace pedrad;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + PEDRAD_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

std::vector<std::string> relative_files(const fs::path& root) {
  std::vector<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root).string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

fs::path small_fixture(const pedrad::testing::TempDir& dir, double lateral = 1.0) {
  fixtures::WalkingFixtureOptions opts;
  opts.blocks = 1;
  opts.radar_position.y() = lateral;
  return fixtures::write_walking_fixture(dir.path() / "scene", opts);
}

std::vector<std::vector<double>> read_table(const fs::path& path) {
  std::istringstream in(text::read_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(cell.empty() ? 0.0 : std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config("\xEF\xBB\xBF# comment\n[paths]\nmarker_file = m.csv ; trailing\n[radar]\ncpis = 4\n",
                                "inline", "/base");
  CHECK(cfg.radar.cpis == 4);
  CHECK(fs::path(cfg.paths.marker_file) == fs::path("/base/m.csv"));
  CHECK(cfg.entries.at("radar.cpis") == "4");
  CHECK_THROWS_AS(parse_config("[radar]\nbogus = 1\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_config("[radar]\ncpis = 1\ncpis = 2\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_config("[radar]\ncpis = two\n", "inline"), ConfigError);
  CHECK_THROWS_AS(parse_config("cpis = 2\n", "inline"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/pedrad.ini"), ConfigError);
  for (const auto& key : config_keys()) {
    CHECK(config_help_text().find("[" + key.section + "]") != std::string::npos);
    CHECK(config_help_text().find("    " + key.key) != std::string::npos);
    CHECK(config_reference_markdown().find(key.key) != std::string::npos);
  }
}

TEST_CASE("one-scatterer cube matches the oracle placements through compute_signatures") {
  const RadarParams params;
  const auto tracks = fixtures::point_target_tracks(3.75, 1.5, params.pri_s, params.block_pris());
  const auto cube = synthesize_cube(Eigen::VectorXcd::Ones(1), tracks, params);
  SignatureConfig sig;
  sig.rt_pri_stride = 1;
  const auto set = compute_signatures(cube, sig, 2);
  CHECK(set.range_time.values.col(0).maxCoeff() == set.range_time.values(256 + 50, 0));
  CHECK(set.range_doppler.size() == 2);
  const long long want = std::llround(2.0 * 1.5 / params.wavelength() / params.doppler_resolution());
  CHECK(std::llabs(static_cast<long long>(set.doppler_time.peak().first) - 512 - want) <= 1);
}

TEST_CASE("pipeline runs, is deterministic across workers and self-compares perfectly") {
  pedrad::testing::TempDir dir("pipe");
  const auto cfg = small_fixture(dir);
  REQUIRE(run_cli("-q --threads 1 pipeline -c " + quoted(cfg) + " -o " + quoted(dir / "a")) == kExitOk);
  REQUIRE(run_cli("-q --threads 3 pipeline -c " + quoted(cfg) + " -o " + quoted(dir / "b")) == kExitOk);

  const auto files = relative_files(dir / "a");
  CHECK(files == relative_files(dir / "b"));
  for (const auto& name : {"rcs.csv", "coefficients.csv", "estimation_blocks.csv", "run_metadata.txt",
                           "cubes/cube_0000.rdc", "signatures/rt_0000.sig", "signatures/dt_0000.csv",
                           "signatures/rd_0000_1.sig", "heatmaps/rt_0000.pgm"}) {
    CHECK_MESSAGE(std::find(files.begin(), files.end(), name) != files.end(), name);
  }
  for (const auto& name : files) {
    CHECK_MESSAGE(text::read_file(dir / "a" / name) == text::read_file(dir / "b" / name), name);
  }
  const auto meta = text::read_file(dir / "a" / "run_metadata.txt");
  CHECK(meta.find("regression_rows = 26") != std::string::npos);
  CHECK(meta.find("output_dir") == std::string::npos);

  REQUIRE(run_cli("-q compare -c " + quoted(cfg) + " --sim " + quoted(dir / "a") + " --measured " +
                  quoted(dir / "b" / "cubes") + " --no-cfar -o " + quoted(dir / "cmp")) == kExitOk);
  for (const auto& kind : {"range_time", "doppler_time", "range_doppler"}) {
    const auto rows = read_table(dir / "cmp" / (std::string("compare_") + kind + ".csv"));
    REQUIRE_FALSE(rows.empty());
    for (const auto& r : rows) {
      CHECK(r[1] == 0.0);
      CHECK(r[2] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  // Measured data replaced by white noise: no structural agreement.
  const auto params = load_config(cfg).radar;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  RadarDataCube noise;
  noise.params = params;
  noise.samples.resize(static_cast<Eigen::Index>(params.samples_per_chirp()),
                       static_cast<Eigen::Index>(params.block_pris()));
  for (Eigen::Index c = 0; c < noise.samples.cols(); ++c) {
    for (Eigen::Index r = 0; r < noise.samples.rows(); ++r) noise.samples(r, c) = Complex(n(rng), n(rng));
  }
  write_cube(noise, dir / "noise.rdc");
  REQUIRE(run_cli("-q compare -c " + quoted(cfg) + " --sim " + quoted(dir / "a") + " --measured " +
                  quoted(dir / "noise.rdc") + " --no-cfar -o " + quoted(dir / "cmpn")) == kExitOk);
  for (const auto& r : read_table(dir / "cmpn" / "compare_range_doppler.csv")) CHECK(std::abs(r[2]) < 0.1);
}

TEST_CASE("stages chain standalone") {
  pedrad::testing::TempDir dir("stages");
  const auto cfg = small_fixture(dir);
  REQUIRE(run_cli("-q pipeline -c " + quoted(cfg) + " -o " + quoted(dir / "whole")) == kExitOk);
  for (const auto& stage : {"rcs", "estimate", "synth", "signature"}) {
    REQUIRE_MESSAGE(run_cli(std::string("-q ") + stage + " -c " + quoted(cfg) + " -o " + quoted(dir / "staged")) ==
                        kExitOk,
                    stage);
  }
  CHECK(text::read_file(dir / "whole" / "rcs.csv") == text::read_file(dir / "staged" / "rcs.csv"));
  // The estimate stage reads RCS back from dBsm text, so agreement is to rounding.
  const auto a = read_coefficients_csv(dir / "whole" / "coefficients.csv");
  const auto b = read_coefficients_csv(dir / "staged" / "coefficients.csv");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i].value - b[i].value) <= 1e-9 * std::abs(a[i].value));
  }
  const auto ca = read_cube_samples(dir / "whole" / "cubes" / "cube_0000.rdc");
  const auto cb = read_cube_samples(dir / "staged" / "cubes" / "cube_0000.rdc");
  CHECK((ca - cb).norm() <= 1e-6 * ca.norm());
  CHECK(fs::exists(dir / "staged" / "signatures" / "rd_0000_0.sig"));
}

TEST_CASE("exit codes") {
  pedrad::testing::TempDir dir("exit");
  const auto cfg = small_fixture(dir);
  CHECK(run_cli("") == kExitValidation);
  CHECK(run_cli("pipeline") == kExitValidation);
  CHECK(run_cli("--help") == kExitOk);
  CHECK(run_cli("config-reference -o " + quoted(dir / "ref.md")) == kExitOk);
  CHECK(text::read_file(dir / "ref.md").find("mesh_pattern") != std::string::npos);
  CHECK(run_cli("pipeline -c " + quoted(dir / "missing.ini")) == kExitValidation);

  // Missing marker file fails validation before anything is written.
  auto text = text::read_file(cfg);
  text.replace(text.find("markers.csv"), 11, "absent.csv");
  const auto broken = dir.write("scene/broken.ini", text);
  CHECK(run_cli("-q pipeline -c " + quoted(broken) + " -o " + quoted(dir / "never")) == kExitValidation);
  CHECK_FALSE(fs::exists(dir / "never" / "rcs.csv"));

  const auto unknown = dir.write("scene/unknown.ini", text::read_file(cfg) + "[radar]\nwarp = 9\n");
  CHECK(run_cli("-q pipeline -c " + quoted(unknown)) == kExitValidation);

  // On the walking line, mirrored markers share ranges and every block is singular.
  pedrad::testing::TempDir axis("axis");
  const auto on_axis = small_fixture(axis, 0.0);
  CHECK(run_cli("-q pipeline -c " + quoted(on_axis) + " -o " + quoted(axis / "out")) == kExitNumerical);
  const auto blocks = text::read_file(axis / "out" / "estimation_blocks.csv");
  CHECK(blocks.find("failed") != std::string::npos);
}
