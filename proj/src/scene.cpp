#include "sitr/sim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "sitr/errors.hpp"

namespace sitr::sim {

namespace {
constexpr double kEps = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 sub3(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
}  // namespace

Mat3 Mat3::euler_zyx(double yaw, double pitch, double roll) {
  const double cz = std::cos(yaw), sz = std::sin(yaw);
  const double cy = std::cos(pitch), sy = std::sin(pitch);
  const double cx = std::cos(roll), sx = std::sin(roll);
  Mat3 rz, ry, rx;
  rz.m = {cz, -sz, 0, sz, cz, 0, 0, 0, 1};
  ry.m = {cy, 0, sy, 0, 1, 0, -sy, 0, cy};
  rx.m = {1, 0, 0, 0, cx, -sx, 0, sx, cx};
  return rz.mul(ry).mul(rx);
}

Mat3 Mat3::axis_angle(const Vec3& axis, double angle) {
  const double n = std::sqrt(dot(axis, axis));
  const double x = axis[0] / n, y = axis[1] / n, z = axis[2] / n;
  const double c = std::cos(angle), s = std::sin(angle), t = 1 - c;
  Mat3 r;
  r.m = {t * x * x + c,     t * x * y - s * z, t * x * z + s * y,
         t * x * y + s * z, t * y * y + c,     t * y * z - s * x,
         t * x * z - s * y, t * y * z + s * x, t * z * z + c};
  return r;
}

Mat3 Mat3::mul(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0;
      for (int k = 0; k < 3; ++k) acc += m[i * 3 + k] * o.m[k * 3 + j];
      r.m[i * 3 + j] = acc;
    }
  return r;
}

Vec3 Mat3::apply(const Vec3& v) const {
  return {m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
          m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
          m[6] * v[0] + m[7] * v[1] + m[8] * v[2]};
}

Vec3 Mat3::apply_transposed(const Vec3& v) const {
  return {m[0] * v[0] + m[3] * v[1] + m[6] * v[2],
          m[1] * v[0] + m[4] * v[1] + m[7] * v[2],
          m[2] * v[0] + m[5] * v[1] + m[8] * v[2]};
}

const char* primitive_kind_name(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::kSphere:
      return "sphere";
    case PrimitiveKind::kCubeCorner:
      return "cube_corner";
    case PrimitiveKind::kCylinder:
      return "cylinder";
    case PrimitiveKind::kCone:
      return "cone";
    case PrimitiveKind::kCapsule:
      return "capsule";
    case PrimitiveKind::kTorusArc:
      return "torus_arc";
  }
  throw config_error("unknown primitive kind");
}

PrimitiveKind primitive_kind_from_name(const std::string& name) {
  if (name == "sphere") return PrimitiveKind::kSphere;
  if (name == "cube_corner") return PrimitiveKind::kCubeCorner;
  if (name == "cylinder") return PrimitiveKind::kCylinder;
  if (name == "cone") return PrimitiveKind::kCone;
  if (name == "capsule") return PrimitiveKind::kCapsule;
  if (name == "torus_arc") return PrimitiveKind::kTorusArc;
  throw config_error("unknown primitive: " + name);
}

int primitive_param_count(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::kSphere:
    case PrimitiveKind::kCubeCorner:
    case PrimitiveKind::kCylinder:
      return 1;
    default:
      return 2;
  }
}

Primitive parse_object_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 >= spec.size())
    throw config_error("object spec must be name:params, got '" + spec + "'");
  Primitive p;
  p.kind = primitive_kind_from_name(spec.substr(0, colon));
  std::vector<double> params;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      params.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw config_error("bad numeric parameter '" + item + "' in '" + spec +
                         "'");
    }
  }
  if (static_cast<int>(params.size()) != primitive_param_count(p.kind))
    throw config_error(
        std::string(primitive_kind_name(p.kind)) + " takes " +
        std::to_string(primitive_param_count(p.kind)) + " parameter(s), got " +
        std::to_string(params.size()));
  for (double v : params)
    if (!(v > 0.0)) throw config_error("object parameters must be positive");
  p.a = params[0];
  if (params.size() > 1) p.b = params[1];
  return p;
}

std::string object_spec_string(const Primitive& p) {
  std::ostringstream os;
  os << primitive_kind_name(p.kind) << ':' << p.a;
  if (primitive_param_count(p.kind) == 2) os << ',' << p.b;
  return os.str();
}

void ContactScene::validate() const {
  if (!(press_depth_mm > 0.0) || press_depth_mm > 3.0)
    throw contract_error("press depth " + std::to_string(press_depth_mm) +
                         " outside (0, 3] mm for contact " + contact_id);
  if (!(primitive.a > 0.0) ||
      (primitive_param_count(primitive.kind) == 2 && !(primitive.b > 0.0)))
    throw contract_error("non-positive primitive parameters for contact " +
                         contact_id);
}

namespace {

struct Line {
  Vec3 o;  // point at world height 0, object frame
  Vec3 d;  // unit direction of increasing world height, object frame
};

// Entry point (smallest s) of the line into each canonical solid, or nullopt.

std::optional<double> enter_sphere_at(const Line& ln, const Vec3& center,
                                      double r) {
  const Vec3 w = sub3(ln.o, center);
  const double proj = dot(w, ln.d);
  const double q = dot(w, w) - proj * proj;
  const double disc = r * r - q;
  if (disc < 0) return std::nullopt;
  return -proj - std::sqrt(disc);
}

std::optional<double> enter_sphere(const Line& ln, double r) {
  return enter_sphere_at(ln, {0, 0, 0}, r);
}

// Interval [lo, hi] of line parameters inside a slab a <= p.axis <= b.
bool slab_interval(double o, double d, double a, double b, double* lo,
                   double* hi) {
  if (std::fabs(d) < kEps) {
    if (o < a || o > b) return false;
    *lo = -kInf;
    *hi = kInf;
    return true;
  }
  double t0 = (a - o) / d, t1 = (b - o) / d;
  if (t0 > t1) std::swap(t0, t1);
  *lo = t0;
  *hi = t1;
  return true;
}

std::optional<double> enter_cube(const Line& ln, double edge) {
  double lo = -kInf, hi = kInf;
  for (int axis = 0; axis < 3; ++axis) {
    double a, b;
    if (!slab_interval(ln.o[axis], ln.d[axis], 0.0, edge, &a, &b))
      return std::nullopt;
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (lo > hi) return std::nullopt;
  }
  return lo;
}

std::optional<double> enter_cylinder(const Line& ln, double r, double hl) {
  // Infinite cylinder about the x axis intersected with |x| <= hl.
  double xlo, xhi;
  if (!slab_interval(ln.o[0], ln.d[0], -hl, hl, &xlo, &xhi))
    return std::nullopt;
  const double a = ln.d[1] * ln.d[1] + ln.d[2] * ln.d[2];
  const double bq = 2 * (ln.o[1] * ln.d[1] + ln.o[2] * ln.d[2]);
  const double c = ln.o[1] * ln.o[1] + ln.o[2] * ln.o[2] - r * r;
  double clo, chi;
  if (a < kEps) {
    if (c > 0) return std::nullopt;
    clo = -kInf;
    chi = kInf;
  } else {
    const double disc = bq * bq - 4 * a * c;
    if (disc < 0) return std::nullopt;
    const double sq = std::sqrt(disc);
    clo = (-bq - sq) / (2 * a);
    chi = (-bq + sq) / (2 * a);
  }
  const double lo = std::max(xlo, clo), hi = std::min(xhi, chi);
  if (lo > hi) return std::nullopt;
  return lo;
}

std::optional<double> enter_cone(const Line& ln, double r, double h) {
  // Solid cone: apex at origin, axis +z, base disk at z = h. Convex, so the
  // entry is the smallest boundary intersection.
  const double kappa = r / h;
  double best = kInf;
  const double a = ln.d[0] * ln.d[0] + ln.d[1] * ln.d[1] -
                   kappa * kappa * ln.d[2] * ln.d[2];
  const double bq = 2 * (ln.o[0] * ln.d[0] + ln.o[1] * ln.d[1] -
                         kappa * kappa * ln.o[2] * ln.d[2]);
  const double c =
      ln.o[0] * ln.o[0] + ln.o[1] * ln.o[1] - kappa * kappa * ln.o[2] * ln.o[2];
  auto consider_lateral = [&](double s) {
    const double z = ln.o[2] + s * ln.d[2];
    if (z >= -kEps && z <= h + kEps) best = std::min(best, s);
  };
  if (std::fabs(a) > kEps) {
    const double disc = bq * bq - 4 * a * c;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      consider_lateral((-bq - sq) / (2 * a));
      consider_lateral((-bq + sq) / (2 * a));
    }
  } else if (std::fabs(bq) > kEps) {
    consider_lateral(-c / bq);
  }
  if (std::fabs(ln.d[2]) > kEps) {
    const double s = (h - ln.o[2]) / ln.d[2];
    const double x = ln.o[0] + s * ln.d[0], y = ln.o[1] + s * ln.d[1];
    if (x * x + y * y <= r * r) best = std::min(best, s);
  }
  if (best == kInf) return std::nullopt;
  return best;
}

std::optional<double> enter_capsule(const Line& ln, double r, double len) {
  // Swept sphere over the segment (-len/2,0,0)..(len/2,0,0). Convex.
  const double hl = len / 2;
  double best = kInf;
  const double a = ln.d[1] * ln.d[1] + ln.d[2] * ln.d[2];
  const double bq = 2 * (ln.o[1] * ln.d[1] + ln.o[2] * ln.d[2]);
  const double c = ln.o[1] * ln.o[1] + ln.o[2] * ln.o[2] - r * r;
  auto consider_lateral = [&](double s) {
    const double x = ln.o[0] + s * ln.d[0];
    if (x >= -hl - kEps && x <= hl + kEps) best = std::min(best, s);
  };
  if (a > kEps) {
    const double disc = bq * bq - 4 * a * c;
    if (disc >= 0) {
      const double sq = std::sqrt(disc);
      consider_lateral((-bq - sq) / (2 * a));
      consider_lateral((-bq + sq) / (2 * a));
    }
  }
  for (double sign : {-1.0, 1.0}) {
    auto s = enter_sphere_at(ln, {sign * hl, 0, 0}, r);
    if (s) best = std::min(best, *s);
  }
  if (best == kInf) return std::nullopt;
  return best;
}

std::optional<double> enter_torus_arc(const Line& ln, double major,
                                      double minor) {
  // Union of balls swept along the half circle theta in [0, pi] in the xy
  // plane. Entry into a union is the min of per-ball entries; the arc is
  // sampled densely and the best neighborhood refined by golden section.
  constexpr int kSamples = 128;
  // Lines farther from the origin than the outer radius miss every ball.
  const double proj0 = dot(ln.o, ln.d);
  const double dist2 = dot(ln.o, ln.o) - proj0 * proj0;
  const double outer = major + minor;
  if (dist2 > outer * outer) return std::nullopt;
  static const auto kArc = [] {
    std::array<std::array<double, 2>, kSamples + 1> t{};
    for (int i = 0; i <= kSamples; ++i) {
      const double theta = M_PI * i / kSamples;
      t[i] = {std::cos(theta), std::sin(theta)};
    }
    return t;
  }();
  auto entry_at = [&](double theta) -> double {
    const Vec3 c = {major * std::cos(theta), major * std::sin(theta), 0.0};
    auto s = enter_sphere_at(ln, c, minor);
    return s ? *s : kInf;
  };
  double best = kInf, best_theta = 0;
  for (int i = 0; i <= kSamples; ++i) {
    const Vec3 c = {major * kArc[i][0], major * kArc[i][1], 0.0};
    auto s = enter_sphere_at(ln, c, minor);
    if (s && *s < best) {
      best = *s;
      best_theta = M_PI * i / kSamples;
    }
  }
  if (best == kInf) return std::nullopt;
  const double step = M_PI / kSamples;
  double lo = std::max(0.0, best_theta - step);
  double hi = std::min(M_PI, best_theta + step);
  constexpr double kGolden = 0.6180339887498949;
  double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
  double f1 = entry_at(x1), f2 = entry_at(x2);
  for (int it = 0; it < 48; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = entry_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = entry_at(x2);
    }
  }
  return std::min({best, f1, f2});
}

// Fixed rotation taking the cube's main diagonal onto +z so the corner at
// the origin is the lowest point before any user rotation.
const Mat3& cube_corner_basis() {
  static const Mat3 rc = Mat3::axis_angle({1.0, -1.0, 0.0},
                                          std::acos(1.0 / std::sqrt(3.0)));
  return rc;
}

}  // namespace

std::optional<double> lower_envelope(const ContactScene& scene, double x,
                                     double y) {
  const Mat3 rot = Mat3::euler_zyx(scene.rotation[0], scene.rotation[1],
                                   scene.rotation[2]);
  Line ln;
  ln.o = rot.apply_transposed({x - scene.tx_mm, y - scene.ty_mm, 0.0});
  ln.d = rot.apply_transposed({0.0, 0.0, 1.0});
  const Primitive& p = scene.primitive;
  switch (p.kind) {
    case PrimitiveKind::kSphere:
      return enter_sphere(ln, p.a);
    case PrimitiveKind::kCubeCorner: {
      const Mat3& rc = cube_corner_basis();
      Line lc;
      lc.o = rc.apply_transposed(ln.o);
      lc.d = rc.apply_transposed(ln.d);
      return enter_cube(lc, p.a);
    }
    case PrimitiveKind::kCylinder:
      return enter_cylinder(ln, p.a, 1.5 * p.a);
    case PrimitiveKind::kCone:
      return enter_cone(ln, p.a, p.b);
    case PrimitiveKind::kCapsule:
      return enter_capsule(ln, p.a, p.b);
    case PrimitiveKind::kTorusArc:
      return enter_torus_arc(ln, p.a, p.b);
  }
  throw config_error("unknown primitive kind");
}

IndenterDraw sample_indenter(Rng& rng, PrimitiveKind kind) {
  IndenterDraw d;
  d.primitive.kind = kind;
  switch (kind) {
    case PrimitiveKind::kSphere:
      d.primitive.a = rng.uniform(1.5, 4.0);
      break;
    case PrimitiveKind::kCubeCorner:
      d.primitive.a = rng.uniform(3.0, 8.0);
      break;
    case PrimitiveKind::kCylinder:
      d.primitive.a = rng.uniform(1.0, 3.0);
      break;
    case PrimitiveKind::kCone:
      d.primitive.a = rng.uniform(1.5, 4.0);
      d.primitive.b = rng.uniform(2.0, 6.0);
      break;
    case PrimitiveKind::kCapsule:
      d.primitive.a = rng.uniform(1.0, 2.5);
      d.primitive.b = rng.uniform(3.0, 8.0);
      break;
    case PrimitiveKind::kTorusArc:
      d.primitive.a = rng.uniform(2.0, 5.0);
      d.primitive.b = rng.uniform(0.8, 2.0);
      break;
  }
  d.rotation = {rng.uniform(0.0, 2 * M_PI), rng.uniform(-0.25, 0.25),
                rng.uniform(-0.25, 0.25)};
  return d;
}

PressDraw sample_press(Rng& rng) {
  PressDraw p;
  p.tx_mm = rng.uniform(-4.0, 4.0);
  p.ty_mm = rng.uniform(-4.0, 4.0);
  p.depth_mm = rng.uniform(0.3, 1.2);
  return p;
}

}  // namespace sitr::sim
