// SPDX-License-Identifier: Apache-2.0
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pedrad/fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pedrad_fixture: write a synthetic walking-mannequin scene"};
  std::string dir;
  pedrad::fixtures::WalkingFixtureOptions opts;
  app.add_option("output", dir, "directory to create")->required();
  app.add_option("--blocks", opts.blocks, "estimation blocks the motion covers")->check(CLI::PositiveNumber);
  app.add_option("--frame-rate", opts.frame_rate_hz, "mesh and marker frame rate in Hz")->check(CLI::PositiveNumber);
  app.add_option("--start-distance", opts.mannequin.start_distance_m, "initial distance from the radar in meters");
  app.add_option("--speed", opts.mannequin.speed_mps, "walking speed in m/s");
  app.add_option("--ray-spacing", opts.ray_spacing_m, "ray-grid pitch written to the config")->check(CLI::PositiveNumber);
  app.add_option("--stride", opts.stride, "PRI stride M written to the config")->check(CLI::PositiveNumber);
  double lateral = opts.radar_position.y();
  app.add_option("--radar-offset", lateral, "lateral radar offset from the walking line in meters");
  CLI11_PARSE(app, argc, argv);
  opts.radar_position.y() = lateral;
  try {
    std::cout << pedrad::fixtures::write_walking_fixture(dir, opts).string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
