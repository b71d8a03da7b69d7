#pragma once

#include <array>
#include <optional>
#include <string>

#include "sitr/rng.hpp"

namespace sitr::sim {

using Vec3 = std::array<double, 3>;

struct Mat3 {
  // Row-major 3x3.
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 euler_zyx(double yaw, double pitch, double roll);
  static Mat3 axis_angle(const Vec3& axis, double angle);
  Mat3 mul(const Mat3& o) const;
  Vec3 apply(const Vec3& v) const;
  Vec3 apply_transposed(const Vec3& v) const;  // inverse for rotations
};

enum class PrimitiveKind {
  kSphere,      // radius
  kCubeCorner,  // edge, pressed corner-first
  kCylinder,    // radius, lying on its side (length 3x radius)
  kCone,        // radius, height, apex-first
  kCapsule,     // radius, segment length, lying on its side
  kTorusArc,    // major radius, minor radius, half ring lying flat
};

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kSphere;
  double a = 1.0;  // radius / edge / major radius
  double b = 0.0;  // height / length / minor radius (kinds with 2 params)
};

const char* primitive_kind_name(PrimitiveKind kind);
PrimitiveKind primitive_kind_from_name(const std::string& name);
int primitive_param_count(PrimitiveKind kind);

// Parses "sphere:2.0", "cone:1.5,4.0", etc.
Primitive parse_object_spec(const std::string& spec);
std::string object_spec_string(const Primitive& p);

// One press of one indenter. Rotation is object-to-world Euler ZYX
// (yaw, pitch, roll); translation moves the object in the gel plane.
struct ContactScene {
  std::string contact_id;
  Primitive primitive;
  std::array<double, 3> rotation{0, 0, 0};
  double tx_mm = 0.0;
  double ty_mm = 0.0;
  double press_depth_mm = 1.0;

  void validate() const;  // depth in (0, 3] mm
};

// Height of the object's lower surface at horizontal position (x, y), in the
// scene's world frame, or nullopt where the vertical line misses the solid.
// This is the pre-imprint geometry kernel; exact for all kinds except the
// torus arc, which uses dense arc sampling with local refinement.
std::optional<double> lower_envelope(const ContactScene& scene, double x,
                                     double y);

// Indenter-level draws shared by a group of presses (same physical object
// in the same holder) and per-press placement draws.
struct IndenterDraw {
  Primitive primitive;
  std::array<double, 3> rotation;
};
IndenterDraw sample_indenter(Rng& rng, PrimitiveKind kind);

struct PressDraw {
  double tx_mm, ty_mm, depth_mm;
};
PressDraw sample_press(Rng& rng);

}  // namespace sitr::sim
