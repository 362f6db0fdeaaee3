// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "pedrad/error.hpp"
#include "pedrad/scene_io.hpp"
#include "test_support.hpp"

using namespace pedrad;
using pedrad::testing::TempDir;

TEST_CASE("obj subset parses vertices, faces and comments") {
  TempDir dir("obj");
  const auto p = dir.write("tri.obj",
                           "# a comment\n\n"
                           "v 0 0 0\n"
                           "v 1 0 0\n"
                           "v 0 1 0\n"
                           "v 0 0 1\n"
                           "f 1 2 3\n"
                           "f 1/1 2/2/2 4//4\n");
  const auto mesh = load_obj(p);
  REQUIRE(mesh.vertices.size() == 4);
  REQUIRE(mesh.triangles.size() == 2);
  CHECK(mesh.triangles[1] == Triangle{0, 1, 3});
  CHECK(mesh.vertices[1].x() == 1.0);
}

TEST_CASE("obj rejects quads, unknown statements, bad indices and degenerate facets") {
  TempDir dir("objbad");
  CHECK_THROWS_AS(load_obj(dir.write("quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")), GeometryError);
  try {
    load_obj(dir.write("vn.obj", "v 0 0 0\nvn 0 0 1\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  try {
    load_obj(dir.write("idx.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\n\nf 1 2 9\n"));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  CHECK_THROWS_AS(load_obj(dir.write("degen.obj", "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n")), GeometryError);
  CHECK_THROWS_AS(load_obj(dir.write("num.obj", "v 0 0 x\n")), ParseError);
}

TEST_CASE("obj write and reload is exact") {
  TempDir dir("objrt");
  MeshFrame m;
  m.vertices = {Vec3(0.1, 0.2, 0.3), Vec3(1.0 / 3.0, -2.5e-7, 7.0), Vec3(-1.0, 2.0, 1e10)};
  m.triangles = {Triangle{0, 1, 2}};
  write_obj(m, dir / "m.obj");
  const auto back = load_obj(dir / "m.obj");
  REQUIRE(back.vertices.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.vertices[i] == m.vertices[i]);
  CHECK(back.triangles == m.triangles);
}

TEST_CASE("frame patterns expand to consecutive files") {
  TempDir dir("seq");
  const std::string tri = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
  dir.write("frame_0001.obj", tri);
  dir.write("frame_0002.obj", tri);
  dir.write("frame_0003.obj", tri);
  dir.write("frame_0005.obj", tri);
  const auto files = expand_frame_pattern((dir / "frame_%04d.obj").string());
  CHECK(files.size() == 3);
  const auto from_dir = expand_frame_pattern(dir.path().string());
  CHECK(from_dir == files);
  const auto frames = load_mesh_sequence(dir.path().string(), 50.0);
  REQUIRE(frames.size() == 3);
  CHECK(frames[2].timestamp == doctest::Approx(0.04));

  TempDir empty("seqempty");
  CHECK_THROWS_AS(load_mesh_sequence(empty.path().string(), 60.0), FormatError);
}

TEST_CASE("marker tracks round-trip and validate") {
  TempDir dir("markers");
  MarkerTrackSet m;
  m.frame_rate_hz = 60.0;
  m.names = {"Pelvis", "Head"};
  for (int f = 0; f < 4; ++f) {
    m.times.push_back(f / 60.0);
    m.frames.push_back({Vec3(f, 0.5, 1.0), Vec3(f, 0.25, 1.7 + 1e-3 * f)});
  }
  write_marker_tracks(m, dir / "m.csv");
  const auto back = load_marker_tracks(dir / "m.csv");
  CHECK(back.names == m.names);
  REQUIRE(back.frame_count() == 4);
  CHECK(back.frames[3][1] == m.frames[3][1]);
  CHECK(back.frame_rate_hz == doctest::Approx(60.0));

  CHECK_THROWS_AS(load_marker_tracks(dir.write("order.csv",
                                               "time,A_x,A_y,A_z\n0,0,0,0\n0.1,0,0,0\n0.1,0,0,0\n")),
                  OrderingError);
  CHECK_THROWS_AS(load_marker_tracks(dir.write("gap.csv",
                                               "time,A_x,A_y,A_z\n0,0,0,0\n0.1,0,0,0\n0.3,0,0,0\n")),
                  FormatError);
  CHECK_THROWS(load_marker_tracks(dir.write("hdr.csv", "time,A_x,A_q,A_z\n0,0,0,0\n0.1,0,0,0\n")));
  CHECK_THROWS(load_marker_tracks(dir.write("ragged.csv", "time,A_x,A_y,A_z\n0,0,0,0\n0.1,0,0\n")));
  const auto bom = load_marker_tracks(dir.write("bom.csv", "\xEF\xBB\xBFtime,A_x,A_y,A_z\n0,0,0,0\n0.5,1,2,3\n"));
  CHECK(bom.frames[1][0] == Vec3(1, 2, 3));
}
