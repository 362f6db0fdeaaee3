// SPDX-License-Identifier: Apache-2.0
#include "pedrad/em_sbr.hpp"

#include <algorithm>
#include <cmath>

#include "pedrad/error.hpp"
#include "pedrad/parallel.hpp"
#include "pedrad/text_io.hpp"

namespace pedrad {

Complex Material::complex_permittivity(double frequency_hz) const {
  return {relative_permittivity, -conductivity / (2.0 * kPi * frequency_hz * kVacuumPermittivity)};
}

void Material::validate() const {
  if (perfect_conductor) return;
  if (!(relative_permittivity >= 1.0)) throw ParameterError("relative permittivity must be >= 1");
  if (!(conductivity >= 0.0)) throw ParameterError("conductivity must be >= 0");
}

std::string_view to_string(PolarizationPair pair) {
  switch (pair) {
    case PolarizationPair::vv: return "vv";
    case PolarizationPair::hh: return "hh";
    case PolarizationPair::hv: return "hv";
    case PolarizationPair::vh: return "vh";
  }
  return "?";
}

PolarizationPair parse_polarization_pair(std::string_view name) {
  for (const auto pair : kAllPolarizationPairs) {
    if (to_string(pair) == name) return pair;
  }
  throw ConfigError("unknown polarization pair '" + std::string(name) + "'");
}

Polarization parse_polarization(std::string_view name) {
  if (name == "h") return Polarization::h;
  if (name == "v") return Polarization::v;
  throw ConfigError("unknown polarization '" + std::string(name) + "' (expected h or v)");
}

PolarizationPair make_pair(Polarization rx, Polarization tx) {
  if (rx == Polarization::v) return tx == Polarization::v ? PolarizationPair::vv : PolarizationPair::vh;
  return tx == Polarization::h ? PolarizationPair::hh : PolarizationPair::hv;
}

namespace {

FresnelCoefficients fresnel_from_cos(const Material& material, double frequency_hz, double cos_i) {
  if (material.perfect_conductor) return {Complex(-1.0, 0.0), Complex(1.0, 0.0)};
  const Complex eps = material.complex_permittivity(frequency_hz);
  const double sin2 = 1.0 - cos_i * cos_i;
  const Complex root = std::sqrt(eps - sin2);
  return {(cos_i - root) / (cos_i + root), (eps * cos_i - root) / (eps * cos_i + root)};
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

struct Observation {
  Vec3 k;  // unit propagation direction toward the receiver
  Vec3 h;
  Vec3 v;
};

Observation observation_for(double azimuth_deg) {
  const double phi = deg_to_rad(azimuth_deg);
  Observation o;
  o.k = Vec3(std::cos(phi), std::sin(phi), 0.0);
  o.h = Vec3::UnitZ().cross(o.k).normalized();
  o.v = Vec3::UnitZ();
  return o;
}

using PairSums = std::array<Complex, 4>;

int pair_index(Polarization rx, Polarization tx) { return static_cast<int>(make_pair(rx, tx)); }

struct RayLaunch {
  Vec3 origin;
  Vec3 direction;
  Vec3 edge_u;
  Vec3 edge_w;
  double path;  // plane-wave phase path at the origin, referenced to (0,0,0)
};

class RayTubeTracer {
 public:
  RayTubeTracer(const GroupedMesh& mesh, const Material& material, double frequency_hz, int max_bounces,
                std::span<const Observation> observations, const Vec3& tx_h, const Vec3& tx_v)
      : mesh_(mesh),
        material_(material),
        frequency_(frequency_hz),
        k_(wavenumber(frequency_hz)),
        max_bounces_(max_bounces),
        observations_(observations),
        tx_h_(tx_h),
        tx_v_(tx_v) {}

  void trace(const RayLaunch& launch, std::span<PairSums> sums, TraceStats& stats) const {
    TraversalStats traversal;
    Ray ray{launch.origin, launch.direction};
    Vec3 edge_u = launch.edge_u;
    Vec3 edge_w = launch.edge_w;
    double path = launch.path;
    std::int64_t skip = -1;
    // Field carried by the tube for each transmit polarization (index 0 = h, 1 = v).
    std::array<CVec3, 2> field = {tx_h_.cast<Complex>(), tx_v_.cast<Complex>()};

    ++stats.rays;
    for (int bounce = 0; bounce < max_bounces_; ++bounce) {
      const auto hit = mesh_.nearest_hit(ray, &traversal, skip);
      if (!hit) break;
      if (bounce == 0) ++stats.rays_hit;
      ++stats.hits;

      const Vec3& d = ray.direction;
      const Vec3& n = hit->normal;
      const double nd = n.dot(d);
      if (nd > -1e-9) break;  // grazing: the tube footprint is unbounded
      path += hit->distance;

      edge_u -= d * (n.dot(edge_u) / nd);
      edge_w -= d * (n.dot(edge_w) / nd);
      const double area = edge_u.cross(edge_w).norm();

      const double cos_i = std::min(1.0, -nd);
      const FresnelCoefficients gamma = fresnel_from_cos(material_, frequency_, cos_i);
      const Vec3 d_r = d - 2.0 * nd * n;
      Vec3 e_perp = d.cross(n);
      if (e_perp.norm() < 1e-12) {
        const Vec3 helper = std::abs(d.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
        e_perp = d.cross(helper);
      }
      e_perp.normalize();
      const Vec3 e_par_i = e_perp.cross(d);
      const Vec3 e_par_r = e_perp.cross(d_r);

      const CVec3 nc = n.cast<Complex>();
      const CVec3 dc = d.cast<Complex>();
      const CVec3 drc = d_r.cast<Complex>();
      std::array<CVec3, 2> current_j;  // eta * J
      std::array<CVec3, 2> current_m;
      std::array<CVec3, 2> reflected;
      for (int t = 0; t < 2; ++t) {
        const CVec3& e = field[t];
        const Complex e_perp_amp = e_perp.cast<Complex>().dot(e);
        const Complex e_par_amp = e_par_i.cast<Complex>().dot(e);
        reflected[t] = gamma.perpendicular * e_perp_amp * e_perp.cast<Complex>() +
                       gamma.parallel * e_par_amp * e_par_r.cast<Complex>();
        const CVec3 h_total = dc.cross(e) + drc.cross(reflected[t]);
        current_j[t] = nc.cross(h_total);
        current_m[t] = (e + reflected[t]).cross(nc);
      }

      const Vec3& x = hit->point;
      for (std::size_t o = 0; o < observations_.size(); ++o) {
        const Observation& obs = observations_[o];
        const Vec3 gradient = k_ * (obs.k - d);
        const double footprint =
            area * sinc(0.5 * gradient.dot(edge_u)) * sinc(0.5 * gradient.dot(edge_w));
        const Complex weight = footprint * std::polar(1.0, -k_ * (path - obs.k.dot(x)));
        const CVec3 kc = obs.k.cast<Complex>();
        for (int t = 0; t < 2; ++t) {
          const CVec3 radiated = current_j[t] - kc.cross(current_m[t]);
          const Polarization tx = t == 0 ? Polarization::h : Polarization::v;
          Complex h_part(0.0, 0.0), v_part(0.0, 0.0);
          for (int c = 0; c < 3; ++c) {
            h_part += obs.h[c] * radiated[c];
            v_part += obs.v[c] * radiated[c];
          }
          sums[o][pair_index(Polarization::h, tx)] += weight * h_part;
          sums[o][pair_index(Polarization::v, tx)] += weight * v_part;
        }
      }

      field = reflected;
      ray = Ray{x, d_r};
      skip = hit->triangle;
    }
    stats.box_tests += traversal.box_tests;
    stats.triangle_tests += traversal.triangle_tests;
  }

 private:
  const GroupedMesh& mesh_;
  const Material& material_;
  double frequency_;
  double k_;
  int max_bounces_;
  std::span<const Observation> observations_;
  Vec3 tx_h_;
  Vec3 tx_v_;
};

}  // namespace

FresnelCoefficients fresnel_coefficients(const Material& material, double frequency_hz, double incidence_angle) {
  if (!(incidence_angle >= 0.0 && incidence_angle < kPi / 2.0)) {
    throw ParameterError("incidence angle must lie in [0, pi/2)");
  }
  return fresnel_from_cos(material, frequency_hz, std::cos(incidence_angle));
}

void AspectConfig::validate() const {
  if (!(carrier_hz > 0.0)) throw ParameterError("carrier frequency must be positive");
  if (max_bounces < 1) throw ParameterError("max_bounces must be >= 1");
  if (ray_spacing < 0.0) throw ParameterError("ray spacing must be non-negative");
  if (!coarse_mode && effective_ray_spacing() > wavelength() / 10.0 * (1.0 + 1e-12)) {
    throw ParameterError("ray spacing exceeds lambda/10; enable coarse mode to allow it");
  }
}

double rcs_from_amplitude(Complex amplitude) { return 4.0 * kPi * std::norm(amplitude); }

double ScatteredField::rcs(PolarizationPair pair) const { return rcs_from_amplitude((*this)[pair]); }

std::vector<ScatteredField> trace_directions(const GroupedMesh& mesh, const Material& material,
                                             const AspectConfig& aspect, std::span<const double> scattered_azimuths_deg,
                                             const TraceOptions& options, TraceStats* stats) {
  aspect.validate();
  material.validate();
  std::vector<ScatteredField> result(scattered_azimuths_deg.size());
  const MeshFrame& frame = mesh.mesh();
  if (frame.triangles.empty() || scattered_azimuths_deg.empty()) return result;

  std::vector<Observation> observations;
  for (const double az : scattered_azimuths_deg) observations.push_back(observation_for(az));

  const double phi_i = deg_to_rad(aspect.incident_azimuth_deg);
  const Vec3 k_i = -Vec3(std::cos(phi_i), std::sin(phi_i), 0.0);
  const Vec3 u = Vec3::UnitZ().cross(k_i).normalized();  // incident h
  const Vec3 w = Vec3::UnitZ();                          // incident v

  double u_lo = std::numeric_limits<double>::infinity(), u_hi = -u_lo;
  double w_lo = u_lo, w_hi = -u_lo, d_lo = u_lo;
  for (const auto& tri : frame.triangles) {
    for (const auto idx : tri) {
      const Vec3& p = frame.vertices[idx];
      const double pu = u.dot(p), pw = w.dot(p), pd = k_i.dot(p);
      u_lo = std::min(u_lo, pu);
      u_hi = std::max(u_hi, pu);
      w_lo = std::min(w_lo, pw);
      w_hi = std::max(w_hi, pw);
      d_lo = std::min(d_lo, pd);
    }
  }
  const double spacing = aspect.effective_ray_spacing();
  const double margin = spacing;
  u_lo -= margin;
  w_lo -= margin;
  const double depth = d_lo - margin;
  const auto cells = [&](double extent) {
    return static_cast<std::size_t>(std::max(1.0, std::ceil(extent / spacing)));
  };
  const std::size_t nu = cells(u_hi - u_lo + margin);
  const std::size_t nw = cells(w_hi - w_lo + margin);
  const std::size_t ray_count = nu * nw;
  const std::size_t chunk = std::max<std::size_t>(1, options.rays_per_chunk);
  const std::size_t chunk_count = (ray_count + chunk - 1) / chunk;

  RayTubeTracer tracer(mesh, material, aspect.carrier_hz, aspect.max_bounces, observations, u, w);
  const std::size_t dirs = observations.size();
  std::vector<PairSums> chunk_sums(chunk_count * dirs, PairSums{});
  std::vector<TraceStats> chunk_stats(chunk_count);

  parallel_for(chunk_count, resolve_threads(options.threads), [&](std::size_t c) {
    std::span<PairSums> sums(chunk_sums.data() + c * dirs, dirs);
    const std::size_t end = std::min(ray_count, (c + 1) * chunk);
    for (std::size_t r = c * chunk; r < end; ++r) {
      const std::size_t iu = r % nu;
      const std::size_t iw = r / nu;
      RayLaunch launch;
      launch.origin = u * (u_lo + (static_cast<double>(iu) + 0.5) * spacing) +
                      w * (w_lo + (static_cast<double>(iw) + 0.5) * spacing) + k_i * depth;
      launch.direction = k_i;
      launch.edge_u = u * spacing;
      launch.edge_w = w * spacing;
      launch.path = depth;
      tracer.trace(launch, sums, chunk_stats[c]);
    }
  });

  const double k = wavenumber(aspect.carrier_hz);
  const Complex scale = Complex(0.0, -k / (4.0 * kPi));
  std::vector<Complex> column(chunk_count);
  for (std::size_t o = 0; o < dirs; ++o) {
    for (int p = 0; p < 4; ++p) {
      for (std::size_t c = 0; c < chunk_count; ++c) column[c] = chunk_sums[c * dirs + o][p];
      result[o].amplitude[p] = scale * pairwise_sum<Complex>(column);
    }
  }
  if (stats) {
    for (const auto& s : chunk_stats) {
      stats->rays += s.rays;
      stats->rays_hit += s.rays_hit;
      stats->hits += s.hits;
      stats->box_tests += s.box_tests;
      stats->triangle_tests += s.triangle_tests;
    }
  }
  return result;
}

ScatteredField trace_frame(const GroupedMesh& mesh, const Material& material, const AspectConfig& aspect,
                           const TraceOptions& options, TraceStats* stats) {
  const double az[] = {aspect.scattered_azimuth_deg};
  return trace_directions(mesh, material, aspect, az, options, stats).front();
}

ScatteredField trace_frame(const MeshFrame& mesh, const Material& material, const AspectConfig& aspect,
                           const TraceOptions& options, TraceStats* stats) {
  if (mesh.triangles.empty()) {
    aspect.validate();
    return {};
  }
  return trace_frame(GroupedMesh(mesh), material, aspect, options, stats);
}

const std::vector<double>& RcsSeries::values(PolarizationPair pair) const {
  if (!has(pair)) throw ParameterError("RCS series has no " + std::string(to_string(pair)) + " values");
  return sigma[static_cast<int>(pair)];
}

RcsSeries rcs_sequence(std::span<const MeshFrame> frames, const Material& material, const AspectConfig& aspect,
                       std::span<const PolarizationPair> pairs, const TraceOptions& options) {
  aspect.validate();
  material.validate();
  RcsSeries series;
  if (frames.size() >= 2) {
    series.frame_rate_hz = 1.0 / (frames[1].timestamp - frames[0].timestamp);
  }
  for (const auto pair : pairs) series.sigma[static_cast<int>(pair)].reserve(frames.size());
  for (const auto& frame : frames) {
    frame.validate();
    const ScatteredField field = trace_frame(frame, material, aspect, options);
    series.times.push_back(frame.timestamp);
    for (const auto pair : pairs) series.sigma[static_cast<int>(pair)].push_back(field.rcs(pair));
  }
  return series;
}

double to_dbsm(double sigma) {
  if (!(sigma > 0.0)) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(sigma));
}

double from_dbsm(double dbsm) { return std::pow(10.0, dbsm / 10.0); }

void write_rcs_csv(const RcsSeries& series, const std::filesystem::path& path) {
  std::string out = "frame,time_s,sigma_vv_dbsm,sigma_hh_dbsm,sigma_hv_dbsm,sigma_vh_dbsm\n";
  for (std::size_t f = 0; f < series.frame_count(); ++f) {
    out += std::to_string(f) + ',' + text::format_double(series.times[f]);
    for (const auto pair : kAllPolarizationPairs) {
      out += ',';
      if (series.has(pair)) out += text::format_double(to_dbsm(series.values(pair)[f]));
    }
    out += '\n';
  }
  text::write_file(path, out);
}

RcsSeries read_rcs_csv(const std::filesystem::path& path) {
  const std::string source = path.string();
  const std::string contents = text::read_file(path);
  RcsSeries series;
  std::size_t line_no = 0;
  bool header = true;
  std::array<bool, 4> present{};
  for (const auto raw : text::split(contents, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty()) continue;
    const auto fields = text::split(line, ',');
    if (header) {
      if (line != "frame,time_s,sigma_vv_dbsm,sigma_hh_dbsm,sigma_hv_dbsm,sigma_vh_dbsm") {
        throw FormatError(source + ": unexpected RCS CSV header");
      }
      header = false;
      continue;
    }
    if (fields.size() != 6) throw FormatError(source + ":" + std::to_string(line_no) + ": expected 6 fields");
    double t = 0.0;
    if (!text::parse_double(fields[1], t)) throw ParseError(source, line_no, "bad time");
    const bool first = series.times.empty();
    if (!first && !(t > series.times.back())) {
      throw OrderingError(source + ":" + std::to_string(line_no) + ": time does not increase");
    }
    series.times.push_back(t);
    for (int p = 0; p < 4; ++p) {
      const auto field = text::trim(fields[2 + p]);
      if (first) present[p] = !field.empty();
      if (field.empty() != !present[p]) throw FormatError(source + ":" + std::to_string(line_no) + ": ragged column");
      if (!present[p]) continue;
      double db = 0.0;
      if (!text::parse_double(field, db)) throw ParseError(source, line_no, "bad dBsm value");
      series.sigma[p].push_back(db <= kDbFloor ? 0.0 : from_dbsm(db));
    }
  }
  if (series.times.empty()) throw FormatError(source + ": no RCS rows");
  if (series.times.size() >= 2) {
    series.frame_rate_hz =
        static_cast<double>(series.times.size() - 1) / (series.times.back() - series.times.front());
  }
  return series;
}

void write_bistatic_csv(std::span<const double> scattered_azimuths_deg, std::span<const ScatteredField> fields,
                        const std::filesystem::path& path) {
  if (scattered_azimuths_deg.size() != fields.size()) throw ShapeError("azimuth and field counts differ");
  std::string out = "phi_s_deg,sigma_vv_dbsm,sigma_hh_dbsm,sigma_hv_dbsm,sigma_vh_dbsm\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out += text::format_double(scattered_azimuths_deg[i]);
    for (const auto pair : kAllPolarizationPairs) out += ',' + text::format_double(to_dbsm(fields[i].rcs(pair)));
    out += '\n';
  }
  text::write_file(path, out);
}

}  // namespace pedrad
