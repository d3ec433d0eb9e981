#ifndef PROTOMINE_TYPES_HPP_
#define PROTOMINE_TYPES_HPP_

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace protomine {

// Thrown for invalid inputs: bad config values, malformed files, dimension
// mismatches. The CLI maps it to exit code 1; anything else is exit 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wraps an angle into [-pi, pi].
double normalize_angle(double a);

// 7-DoF oriented box: center, full extents, rotation about the vertical
// axis. Axis-aligned boxes use yaw = 0.
struct Box3D {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double dx = 1.0;
  double dy = 1.0;
  double dz = 1.0;
  double yaw = 0.0;

  double volume() const { return dx * dy * dz; }
};

// Checks extents positive/finite and yaw in [-pi, pi]; `what` names the
// offending record in diagnostics.
void validate_box(const Box3D& box, const std::string& what);

bool box_equal(const Box3D& a, const Box3D& b);

struct LabeledBox {
  int class_id = 0;
  Box3D box;
};

struct PseudoLabel {
  int class_id = 0;
  Box3D box;
  double score = 0.0;
};

// Category-only label attached to a proposal; carries no box.
struct PrototypeLabel {
  int proposal_index = 0;
  int class_id = 0;
};

// One detector proposal: projected feature (length C), per-class scores
// (length K, already calibrated to [0,1] by the exporting detector), the
// regressed box, and the query location used for containment/range tests.
// The location is kept separate from the box center on purpose: anchor-free
// detectors distinguish the two.
struct Proposal {
  Eigen::VectorXd feature;
  Eigen::VectorXd scores;
  Box3D box;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
};

// One scene's detector export. gt_labels is evaluation-only and optional.
// point_range is x_min y_min z_min x_max y_max z_max in meters.
struct SceneRecord {
  std::string scene_id;
  std::vector<Proposal> proposals;
  std::vector<LabeledBox> sparse_labels;
  std::optional<std::vector<LabeledBox>> gt_labels;
  std::array<double, 6> point_range = {0, 0, 0, 1, 1, 1};
};

// The three label families produced by mining and refinement.
struct LabelSet {
  std::vector<LabeledBox> sparse;
  std::vector<PseudoLabel> pseudo;
  std::vector<PrototypeLabel> prototype;
};

enum class CollisionMetric {
  FirstFraction,  // intersection / volume of the first (pseudo) box
  Iou,
};

// All engine hyperparameters. Defaults carry the published operating point;
// K and C describe the exporting detector and must match the corpus.
struct MiningConfig {
  int K = 18;   // class count
  int C = 128;  // projected feature dimension
  int O = 10;   // prototypes per class

  double kappa = 0.05;     // Sinkhorn temperature
  int sinkhorn_steps = 3;  // truncated iteration count
  double mu = 0.9;         // prototype momentum coefficient
  int warmup_iters = 1000; // scenes processed before label matching starts

  double alpha_pro = 0.2;  // foreground score threshold for mining
  double alpha_cls = 0.2;  // pseudo-label score threshold
  double alpha_iou = 0.5;  // pseudo-label duplicate suppression threshold
  double alpha_col = 0.2;  // pseudo-vs-sparse collision threshold

  double tau_con = 0.1;    // contrastive loss temperature
  std::uint64_t seed = 0;  // stochastic init / tie-breaking seed
  CollisionMetric collision_metric = CollisionMetric::FirstFraction;
};

// Returns cfg unchanged when every invariant holds; throws ValidationError
// with a distinct message per violated field otherwise.
MiningConfig validate_config(const MiningConfig& cfg);

// Rescales every proposal feature to unit L2 norm. Features already within
// 1e-9 of unit norm are left untouched bit-for-bit, which makes the pass
// exactly idempotent. A zero-norm feature is an error naming its index.
SceneRecord normalize_features(SceneRecord scene);

// N x K matrix of detector scores (row i = proposals[i].scores).
Eigen::MatrixXd score_matrix(const SceneRecord& scene);

// N x C matrix of projected features (row i = proposals[i].feature).
Eigen::MatrixXd feature_matrix(const SceneRecord& scene);

}  // namespace protomine

#endif  // PROTOMINE_TYPES_HPP_
