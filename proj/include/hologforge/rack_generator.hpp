#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace hologforge {

// Slide rack dimensions in millimetres. x runs along the stack of slides,
// y across a slide, z up.
struct RackSpec {
  int slot_count = 14;
  double slot_pitch_mm = 10.0;
  double slot_width_mm = 0.6;  // slide thickness plus clearance; also the fit clearance of the base sockets
  double slide_height_mm = 148.0;
  double slide_width_mm = 210.0;
  double wall_mm = 4.0;
  double base_thickness_mm = 6.0;
  double base_depth_mm = 160.0;  // base length along x; grown when the holders need more
  std::optional<std::array<double, 3>> printer_volume_mm;

  void validate() const;

  double rack_length_mm() const { return slot_count * slot_pitch_mm + wall_mm; }
  // x of groove i's centre within a holder.
  double slot_center_mm(int i) const { return (slot_pitch_mm + wall_mm) / 2.0 + i * slot_pitch_mm; }
  double holder_thickness_mm() const { return 3.0 * wall_mm; }
  double holder_height_mm() const { return slide_height_mm / 2.0; }
};

struct TriMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;  // counter-clockwise seen from outside
};

struct RackParts {
  TriMesh holder;  // comb rail; print two, one per slide side
  TriMesh base;    // plate with two holder sockets and slide-edge grooves
};

RackParts generate_rack(const RackSpec& spec);

// Binary STL, little-endian, normals recomputed from the winding.
void emit_stl(const TriMesh& mesh, std::ostream& sink);

}  // namespace hologforge
