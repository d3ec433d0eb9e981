#include "protomine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace protomine {

namespace {

struct Pt {
  double x, y;
};

// BEV corners of the yawed footprint, counter-clockwise.
std::array<Pt, 4> bev_corners(const Box3D& b) {
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const double hx = 0.5 * b.dx, hy = 0.5 * b.dy;
  const std::array<Pt, 4> local = {Pt{hx, hy}, Pt{-hx, hy}, Pt{-hx, -hy},
                                   Pt{hx, -hy}};
  std::array<Pt, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i].x = b.cx + local[i].x * c - local[i].y * s;
    out[i].y = b.cy + local[i].x * s + local[i].y * c;
  }
  return out;
}

double polygon_area(const std::vector<Pt>& poly) {
  if (poly.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Pt& p = poly[i];
    const Pt& q = poly[(i + 1) % poly.size()];
    acc += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(acc);
}

// Sutherland-Hodgman: clip `subject` against the half-plane on the left of
// edge a->b (CCW clip polygon keeps its interior on the left).
std::vector<Pt> clip_edge(const std::vector<Pt>& subject, const Pt& a,
                          const Pt& b) {
  std::vector<Pt> out;
  out.reserve(subject.size() + 4);
  auto side = [&](const Pt& p) {
    return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  };
  const std::size_t n = subject.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Pt& cur = subject[i];
    const Pt& nxt = subject[(i + 1) % n];
    const double sc = side(cur);
    const double sn = side(nxt);
    if (sc >= 0) out.push_back(cur);
    if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) {
      const double t = sc / (sc - sn);
      out.push_back(Pt{cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return out;
}

double interval_overlap(double lo_a, double hi_a, double lo_b, double hi_b) {
  return std::max(0.0, std::min(hi_a, hi_b) - std::max(lo_a, lo_b));
}

OverlapReport make_report(double inter, double vol_a, double vol_b) {
  OverlapReport r;
  r.intersection_volume = inter;
  r.union_volume = vol_a + vol_b - inter;
  r.iou = r.union_volume > 0 ? inter / r.union_volume : 0.0;
  r.collision_fraction = vol_a > 0 ? inter / vol_a : 0.0;
  // Clamp away rounding excursions so downstream threshold tests stay in
  // [0, 1].
  r.iou = std::clamp(r.iou, 0.0, 1.0);
  r.collision_fraction = std::clamp(r.collision_fraction, 0.0, 1.0);
  return r;
}

}  // namespace

double bev_intersection_area(const Box3D& a, const Box3D& b) {
  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);
  std::vector<Pt> poly(ca.begin(), ca.end());
  for (int e = 0; e < 4 && !poly.empty(); ++e) {
    poly = clip_edge(poly, cb[e], cb[(e + 1) % 4]);
  }
  return polygon_area(poly);
}

OverlapReport iou_axis_aligned(const Box3D& a, const Box3D& b) {
  if (a.yaw != 0.0 || b.yaw != 0.0) {
    throw ValidationError(
        "iou_axis_aligned requires yaw = 0 boxes; use iou_bev_rotated");
  }
  const double ix = interval_overlap(a.cx - a.dx / 2, a.cx + a.dx / 2,
                                     b.cx - b.dx / 2, b.cx + b.dx / 2);
  const double iy = interval_overlap(a.cy - a.dy / 2, a.cy + a.dy / 2,
                                     b.cy - b.dy / 2, b.cy + b.dy / 2);
  const double iz = interval_overlap(a.cz - a.dz / 2, a.cz + a.dz / 2,
                                     b.cz - b.dz / 2, b.cz + b.dz / 2);
  return make_report(ix * iy * iz, a.volume(), b.volume());
}

OverlapReport iou_bev_rotated(const Box3D& a, const Box3D& b) {
  const double area = bev_intersection_area(a, b);
  const double iz = interval_overlap(a.cz - a.dz / 2, a.cz + a.dz / 2,
                                     b.cz - b.dz / 2, b.cz + b.dz / 2);
  return make_report(area * iz, a.volume(), b.volume());
}

OverlapReport overlap(const Box3D& a, const Box3D& b) {
  if (a.yaw == 0.0 && b.yaw == 0.0) return iou_axis_aligned(a, b);
  return iou_bev_rotated(a, b);
}

bool contains_point(const Box3D& box, const Eigen::Vector3d& p) {
  const double c = std::cos(-box.yaw), s = std::sin(-box.yaw);
  const double rx = p.x() - box.cx, ry = p.y() - box.cy;
  const double lx = rx * c - ry * s;
  const double ly = rx * s + ry * c;
  const double lz = p.z() - box.cz;
  return std::abs(lx) <= box.dx / 2 && std::abs(ly) <= box.dy / 2 &&
         std::abs(lz) <= box.dz / 2;
}

}  // namespace protomine
