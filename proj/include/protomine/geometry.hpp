#ifndef PROTOMINE_GEOMETRY_HPP_
#define PROTOMINE_GEOMETRY_HPP_

#include "protomine/types.hpp"

namespace protomine {

// Overlap quantities for one ordered box pair. iou is symmetric;
// collision_fraction is intersection / volume of the FIRST box and is not.
struct OverlapReport {
  double intersection_volume = 0.0;
  double union_volume = 0.0;
  double iou = 0.0;
  double collision_fraction = 0.0;
};

// Exact interval arithmetic for yaw = 0 boxes. Rejects rotated input and
// points the caller at iou_bev_rotated.
OverlapReport iou_axis_aligned(const Box3D& a, const Box3D& b);

// Rotated-rectangle overlap in the ground plane (convex polygon clipping)
// times the vertical interval overlap. Agrees with iou_axis_aligned to
// 1e-9 when both yaws are 0.
OverlapReport iou_bev_rotated(const Box3D& a, const Box3D& b);

// Dispatches to the exact axis-aligned path when both yaws are 0.
OverlapReport overlap(const Box3D& a, const Box3D& b);

// Closed-boundary containment in the box frame (inverse-yaw rotation about
// the box center).
bool contains_point(const Box3D& box, const Eigen::Vector3d& p);

// BEV footprint area of the yawed rectangle intersection. Exposed for the
// clipping oracle tests.
double bev_intersection_area(const Box3D& a, const Box3D& b);

}  // namespace protomine

#endif  // PROTOMINE_GEOMETRY_HPP_
