// SPDX-License-Identifier: Apache-2.0
#include "pedrad/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "pedrad/error.hpp"
#include "pedrad/text_io.hpp"

namespace pedrad {

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

std::uint32_t parse_face_index(std::string_view token, const std::string& source, std::size_t line) {
  // Accept `i`, `i/t`, `i//n`, `i/t/n`; only the position index matters.
  const std::size_t slash = token.find('/');
  const std::string_view head = token.substr(0, slash);
  long long index = 0;
  if (!text::parse_int(head, index)) {
    throw ParseError(source, line, "bad face index '" + std::string(token) + "'");
  }
  if (index < 1) {
    throw ParseError(source, line, "face indices must be positive (got " + std::to_string(index) + ")");
  }
  return static_cast<std::uint32_t>(index - 1);
}

}  // namespace

void MeshFrame::validate() const {
  if (!triangles.empty() && vertices.empty()) {
    throw GeometryError("mesh has triangles but no vertices");
  }
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    for (const auto idx : tri) {
      if (idx >= vertices.size()) {
        throw GeometryError("triangle " + std::to_string(t) + " references vertex " +
                            std::to_string(idx) + " of " + std::to_string(vertices.size()));
      }
    }
    const double area = triangle_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    if (!(area > 0.0) || !std::isfinite(area)) {
      throw GeometryError("triangle " + std::to_string(t) + " is degenerate");
    }
  }
}

MeshFrame load_obj(const std::filesystem::path& path) {
  const std::string source = path.string();
  const std::string contents = text::read_file(path);
  MeshFrame mesh;
  std::vector<std::size_t> face_lines;

  std::size_t line_no = 0;
  for (const auto raw_line : text::split(contents, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw_line);
    if (line.empty() || line.front() == '#') continue;
    const auto tokens = text::split_whitespace(line);
    if (tokens[0] == "v") {
      if (tokens.size() != 4) throw ParseError(source, line_no, "vertex needs exactly 3 coordinates");
      Vec3 v;
      for (int k = 0; k < 3; ++k) {
        if (!text::parse_double(tokens[k + 1], v[k]) || !std::isfinite(v[k])) {
          throw ParseError(source, line_no, "bad coordinate '" + std::string(tokens[k + 1]) + "'");
        }
      }
      mesh.vertices.push_back(v);
    } else if (tokens[0] == "f") {
      if (tokens.size() > 4) {
        throw GeometryError(source + ":" + std::to_string(line_no) + ": face with " +
                            std::to_string(tokens.size() - 1) + " vertices; only triangles are supported");
      }
      if (tokens.size() < 4) throw ParseError(source, line_no, "face needs 3 vertex indices");
      Triangle tri;
      for (int k = 0; k < 3; ++k) tri[k] = parse_face_index(tokens[k + 1], source, line_no);
      mesh.triangles.push_back(tri);
      face_lines.push_back(line_no);
    } else {
      throw ParseError(source, line_no, "unsupported statement '" + std::string(tokens[0]) + "'");
    }
  }

  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (const auto idx : tri) {
      if (idx >= mesh.vertices.size()) {
        throw ParseError(source, face_lines[t], "vertex index " + std::to_string(idx + 1) + " out of range");
      }
    }
    if (!(triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]) > 0.0)) {
      throw GeometryError(source + ":" + std::to_string(face_lines[t]) + ": degenerate triangle");
    }
  }
  return mesh;
}

void write_obj(const MeshFrame& mesh, const std::filesystem::path& path) {
  std::string out;
  out.reserve(mesh.vertices.size() * 48 + mesh.triangles.size() * 24);
  for (const auto& v : mesh.vertices) {
    out += "v ";
    out += text::format_double(v.x());
    out += ' ';
    out += text::format_double(v.y());
    out += ' ';
    out += text::format_double(v.z());
    out += '\n';
  }
  for (const auto& t : mesh.triangles) {
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' + std::to_string(t[2] + 1) + '\n';
  }
  text::write_file(path, out);
}

std::vector<std::filesystem::path> expand_frame_pattern(const std::string& pattern) {
  namespace fs = std::filesystem;
  std::string effective = pattern;
  if (fs::is_directory(pattern)) effective = (fs::path(pattern) / "frame_%04d.obj").string();
  if (effective.find('%') == std::string::npos) {
    if (fs::is_regular_file(effective)) return {fs::path(effective)};
    return {};
  }
  auto format = [&](int index) {
    std::vector<char> buf(effective.size() + 32);
    std::snprintf(buf.data(), buf.size(), effective.c_str(), index);
    return fs::path(buf.data());
  };
  int index = fs::exists(format(0)) ? 0 : 1;
  std::vector<fs::path> out;
  while (fs::exists(format(index))) out.push_back(format(index++));
  return out;
}

std::vector<MeshFrame> load_mesh_sequence(const std::string& pattern, double frame_rate_hz) {
  if (!(frame_rate_hz > 0.0)) throw ParameterError("frame rate must be positive");
  const auto paths = expand_frame_pattern(pattern);
  if (paths.empty()) throw FormatError("no mesh frames match '" + pattern + "'");
  std::vector<MeshFrame> frames;
  frames.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    MeshFrame frame = load_obj(paths[i]);
    frame.timestamp = static_cast<double>(i) / frame_rate_hz;
    frames.push_back(std::move(frame));
  }
  return frames;
}

void MarkerTrackSet::validate() const {
  if (names.empty()) throw FormatError("marker set has no markers");
  if (frames.size() < 2) throw FormatError("marker set needs at least two frames");
  if (times.size() != frames.size()) throw FormatError("time column and frame count disagree");
  for (std::size_t f = 0; f < frames.size(); ++f) {
    if (frames[f].size() != names.size()) {
      throw FormatError("frame " + std::to_string(f) + " carries " + std::to_string(frames[f].size()) +
                        " markers, expected " + std::to_string(names.size()));
    }
  }
  for (std::size_t f = 1; f < times.size(); ++f) {
    if (!(times[f] > times[f - 1])) {
      throw OrderingError("timestamps not strictly increasing at frame " + std::to_string(f));
    }
  }
  const double nominal = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t f = 1; f < times.size(); ++f) {
    const double dt = times[f] - times[f - 1];
    if (std::abs(dt - nominal) > 1e-6 * nominal + 1e-9) {
      throw FormatError("non-uniform frame spacing at frame " + std::to_string(f));
    }
  }
}

MarkerTrackSet load_marker_tracks(const std::filesystem::path& path) {
  const std::string source = path.string();
  std::string contents = text::read_file(path);
  if (contents.starts_with("\xEF\xBB\xBF")) contents.erase(0, 3);

  MarkerTrackSet set;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  for (const auto raw_line : text::split(contents, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw_line);
    if (line.empty()) continue;
    const auto fields = text::split(line, ',');
    if (columns == 0) {
      columns = fields.size();
      if (text::trim(fields[0]) != "time" || columns < 4 || (columns - 1) % 3 != 0) {
        throw FormatError(source + ": header must be 'time' followed by x,y,z columns per marker");
      }
      for (std::size_t c = 1; c < columns; c += 3) {
        const std::string_view x = text::trim(fields[c]);
        if (!x.ends_with("_x")) throw FormatError(source + ": column '" + std::string(x) + "' should end in _x");
        const std::string name(x.substr(0, x.size() - 2));
        if (text::trim(fields[c + 1]) != name + "_y" || text::trim(fields[c + 2]) != name + "_z") {
          throw FormatError(source + ": columns for marker '" + name + "' must be _x,_y,_z");
        }
        set.names.push_back(name);
      }
      continue;
    }
    if (fields.size() != columns) {
      throw FormatError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                        " fields, found " + std::to_string(fields.size()));
    }
    double t = 0.0;
    if (!text::parse_double(fields[0], t)) throw ParseError(source, line_no, "bad time value");
    std::vector<Vec3> positions(set.names.size());
    for (std::size_t b = 0; b < set.names.size(); ++b) {
      for (int k = 0; k < 3; ++k) {
        if (!text::parse_double(fields[1 + 3 * b + k], positions[b][k]) || !std::isfinite(positions[b][k])) {
          throw ParseError(source, line_no, "bad coordinate in column " + std::to_string(2 + 3 * b + k));
        }
      }
    }
    if (!set.times.empty() && !(t > set.times.back())) {
      throw OrderingError(source + ":" + std::to_string(line_no) + ": time " + text::format_double(t) +
                          " does not increase");
    }
    set.times.push_back(t);
    set.frames.push_back(std::move(positions));
  }
  if (columns == 0) throw FormatError(source + ": empty marker file");
  set.validate();
  set.frame_rate_hz = static_cast<double>(set.times.size() - 1) / (set.times.back() - set.times.front());
  return set;
}

void write_marker_tracks(const MarkerTrackSet& tracks, const std::filesystem::path& path) {
  std::string out = "time";
  for (const auto& name : tracks.names) out += "," + name + "_x," + name + "_y," + name + "_z";
  out += '\n';
  for (std::size_t f = 0; f < tracks.frames.size(); ++f) {
    out += text::format_double(tracks.times[f]);
    for (const auto& p : tracks.frames[f]) {
      for (int k = 0; k < 3; ++k) {
        out += ',';
        out += text::format_double(p[k]);
      }
    }
    out += '\n';
  }
  text::write_file(path, out);
}

}  // namespace pedrad
