#include "hologforge/rack_generator.hpp"

#include "hologforge/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <tuple>

namespace hologforge {

namespace {

constexpr char kStlHeader[] = "hologforge 1.0.0 binary STL";

struct Box {
  double x0, x1, y0, y1;
};

// A solid {0 <= z <= height(x, y)} over a rectangle, where the height is
// `top` except inside `pockets`, which drop it to their own floor. Built as
// the boundary of occupied cells on the rectilinear grid spanned by every box
// coordinate, so all faces share vertices and the result is watertight.
class HeightField {
 public:
  HeightField(double size_x, double size_y, double top) : size_x_(size_x), size_y_(size_y), top_(top) {}

  void pocket(const Box& area, double floor) { pockets_.push_back({area, floor}); }

  TriMesh mesh() const {
    const auto xs = breakpoints(0.0, size_x_, [](const Pocket& p) { return std::pair{p.area.x0, p.area.x1}; });
    const auto ys = breakpoints(0.0, size_y_, [](const Pocket& p) { return std::pair{p.area.y0, p.area.y1}; });
    std::vector<double> zs{0.0, top_};
    for (const auto& p : pockets_) zs.push_back(p.floor);
    normalize(zs);

    const int nx = static_cast<int>(xs.size()) - 1;
    const int ny = static_cast<int>(ys.size()) - 1;
    const int nz = static_cast<int>(zs.size()) - 1;
    std::vector<double> height(nx * ny, top_);
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j) {
        const double cx = (xs[i] + xs[i + 1]) / 2.0, cy = (ys[j] + ys[j + 1]) / 2.0;
        for (const auto& p : pockets_)
          if (cx > p.area.x0 && cx < p.area.x1 && cy > p.area.y0 && cy < p.area.y1)
            height[i * ny + j] = std::min(height[i * ny + j], p.floor);
      }
    auto solid = [&](int i, int j, int k) {
      if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return false;
      return (zs[k] + zs[k + 1]) / 2.0 < height[i * ny + j];
    };

    TriMesh out;
    std::map<std::tuple<int, int, int>, std::uint32_t> index;
    auto vertex = [&](int i, int j, int k) {
      auto [it, inserted] = index.try_emplace({i, j, k}, static_cast<std::uint32_t>(out.vertices.size()));
      if (inserted) out.vertices.push_back({xs[i], ys[j], zs[k]});
      return it->second;
    };
    using Corner = std::array<int, 3>;
    auto quad = [&](Corner a, Corner b, Corner c, Corner d) {
      const auto va = vertex(a[0], a[1], a[2]), vb = vertex(b[0], b[1], b[2]);
      const auto vc = vertex(c[0], c[1], c[2]), vd = vertex(d[0], d[1], d[2]);
      out.triangles.push_back({va, vb, vc});
      out.triangles.push_back({va, vc, vd});
    };

    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < ny; ++j)
        for (int k = 0; k < nz; ++k) {
          if (!solid(i, j, k)) continue;
          if (!solid(i + 1, j, k)) quad({i + 1, j, k}, {i + 1, j + 1, k}, {i + 1, j + 1, k + 1}, {i + 1, j, k + 1});
          if (!solid(i - 1, j, k)) quad({i, j, k}, {i, j, k + 1}, {i, j + 1, k + 1}, {i, j + 1, k});
          if (!solid(i, j + 1, k)) quad({i, j + 1, k}, {i, j + 1, k + 1}, {i + 1, j + 1, k + 1}, {i + 1, j + 1, k});
          if (!solid(i, j - 1, k)) quad({i, j, k}, {i + 1, j, k}, {i + 1, j, k + 1}, {i, j, k + 1});
          if (!solid(i, j, k + 1)) quad({i, j, k + 1}, {i + 1, j, k + 1}, {i + 1, j + 1, k + 1}, {i, j + 1, k + 1});
          if (!solid(i, j, k - 1)) quad({i, j, k}, {i, j + 1, k}, {i + 1, j + 1, k}, {i + 1, j, k});
        }
    return out;
  }

 private:
  struct Pocket {
    Box area;
    double floor;
  };

  static void normalize(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    std::vector<double> merged;
    for (double x : v)
      if (merged.empty() || x - merged.back() > 1e-9) merged.push_back(x);
    v = std::move(merged);
  }

  template <typename Extent>
  std::vector<double> breakpoints(double lo, double hi, Extent extent) const {
    std::vector<double> v{lo, hi};
    for (const auto& p : pockets_) {
      auto [a, b] = extent(p);
      v.push_back(std::clamp(a, lo, hi));
      v.push_back(std::clamp(b, lo, hi));
    }
    normalize(v);
    return v;
  }

  double size_x_, size_y_, top_;
  std::vector<Pocket> pockets_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ParameterError("rack: " + message);
}

void check_printer(const RackSpec& spec, double x, double y, double z, const char* part) {
  if (!spec.printer_volume_mm) return;
  const auto& v = *spec.printer_volume_mm;
  const bool fits = z <= v[2] && ((x <= v[0] && y <= v[1]) || (y <= v[0] && x <= v[1]));
  require(fits, std::string(part) + " does not fit the configured printer volume");
}

void put_u32(std::ostream& os, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  os.write(bytes, 4);
}

void put_f32(std::ostream& os, double v) { put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v))); }

}  // namespace

void RackSpec::validate() const {
  require(slot_count >= 1, "slot_count must be >= 1");
  for (double v : {slot_pitch_mm, slot_width_mm, slide_height_mm, slide_width_mm, wall_mm, base_thickness_mm,
                   base_depth_mm})
    require(v > 0.0 && std::isfinite(v), "all dimensions must be positive");
  require(slot_width_mm < slot_pitch_mm, "slot_width_mm must be below slot_pitch_mm");
  require(slide_width_mm > 4.0 * wall_mm + 2.0 * slot_width_mm,
          "slide_width_mm must exceed 4 * wall_mm + 2 * slot_width_mm");
  require(holder_height_mm() > wall_mm, "slide_height_mm must exceed 2 * wall_mm");
  if (printer_volume_mm)
    for (double v : *printer_volume_mm) require(v > 0.0, "printer volume must be positive");
}

RackParts generate_rack(const RackSpec& spec) {
  spec.validate();
  const double length = spec.rack_length_mm();
  const double w = spec.wall_mm;
  const double thickness = spec.holder_thickness_mm();
  const double clearance = spec.slot_width_mm;
  const double half_slot = spec.slot_width_mm / 2.0;

  // Holder: spine along y in [0, w], grooves open towards the slide and upwards.
  HeightField holder(length, thickness, spec.holder_height_mm());
  for (int i = 0; i < spec.slot_count; ++i) {
    const double c = spec.slot_center_mm(i);
    holder.pocket({c - half_slot, c + half_slot, w, thickness}, w);
  }

  // Base: sockets for both holders near the y ends, slide-edge grooves between them.
  const double depth = std::max(spec.base_depth_mm, length + 2.0 * w + 2.0 * clearance);
  const double width = spec.slide_width_mm + 4.0 * w + 2.0 * clearance;
  const double floor = spec.base_thickness_mm / 2.0;
  const double ox = (depth - length) / 2.0;
  HeightField base(depth, width, spec.base_thickness_mm);
  const double socket = thickness + 2.0 * clearance;
  base.pocket({ox - clearance, ox + length + clearance, w, w + socket}, floor);
  base.pocket({ox - clearance, ox + length + clearance, width - w - socket, width - w}, floor);
  for (int i = 0; i < spec.slot_count; ++i) {
    const double c = ox + spec.slot_center_mm(i);
    base.pocket({c - half_slot, c + half_slot, w + socket, width - w - socket}, floor);
  }

  check_printer(spec, length, thickness, spec.holder_height_mm(), "holder");
  check_printer(spec, depth, width, spec.base_thickness_mm, "base");
  return RackParts{holder.mesh(), base.mesh()};
}

void emit_stl(const TriMesh& mesh, std::ostream& sink) {
  if (mesh.triangles.size() > std::numeric_limits<std::uint32_t>::max())
    throw ConsistencyError("STL cannot hold more than 2^32-1 triangles");
  char header[80] = {};
  std::copy(std::begin(kStlHeader), std::end(kStlHeader) - 1, header);
  sink.write(header, sizeof header);
  put_u32(sink, static_cast<std::uint32_t>(mesh.triangles.size()));
  for (const auto& t : mesh.triangles) {
    const auto& a = mesh.vertices.at(t[0]);
    const auto& b = mesh.vertices.at(t[1]);
    const auto& c = mesh.vertices.at(t[2]);
    const double ux = b[0] - a[0], uy = b[1] - a[1], uz = b[2] - a[2];
    const double vx = c[0] - a[0], vy = c[1] - a[1], vz = c[2] - a[2];
    double nx = uy * vz - uz * vy, ny = uz * vx - ux * vz, nz = ux * vy - uy * vx;
    const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    if (len > 0.0) nx /= len, ny /= len, nz /= len;
    for (double v : {nx, ny, nz}) put_f32(sink, v);
    for (const auto* p : {&a, &b, &c})
      for (double v : *p) put_f32(sink, v);
    const char attribute[2] = {0, 0};
    sink.write(attribute, 2);
  }
  if (!sink) throw IoError("failed writing STL output");
}

}  // namespace hologforge
