#include "protomine/types.hpp"

#include <cmath>
#include <sstream>

namespace protomine {

double normalize_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  double r = std::fmod(a + M_PI, two_pi);
  if (r < 0) r += two_pi;
  return r - M_PI;
}

void validate_box(const Box3D& box, const std::string& what) {
  auto bad = [&](const char* msg) {
    throw ValidationError(what + ": " + msg);
  };
  for (double v : {box.cx, box.cy, box.cz, box.dx, box.dy, box.dz, box.yaw}) {
    if (!std::isfinite(v)) bad("box has non-finite field");
  }
  if (box.dx <= 0 || box.dy <= 0 || box.dz <= 0) bad("box extents must be positive");
  if (box.yaw < -M_PI || box.yaw > M_PI) bad("yaw out of range [-pi, pi]");
}

bool box_equal(const Box3D& a, const Box3D& b) {
  return a.cx == b.cx && a.cy == b.cy && a.cz == b.cz && a.dx == b.dx &&
         a.dy == b.dy && a.dz == b.dz && a.yaw == b.yaw;
}

MiningConfig validate_config(const MiningConfig& cfg) {
  if (cfg.K < 1) throw ValidationError("class count must be positive");
  if (cfg.C < 1) throw ValidationError("feature dimension must be positive");
  if (cfg.O < 1) throw ValidationError("prototype count must be positive");
  if (!(cfg.kappa > 0) || !std::isfinite(cfg.kappa))
    throw ValidationError("temperature must be positive");
  if (cfg.sinkhorn_steps < 1)
    throw ValidationError("sinkhorn step count must be positive");
  if (!(cfg.mu >= 0.0 && cfg.mu <= 1.0))
    throw ValidationError("momentum out of range");
  if (cfg.warmup_iters < 0)
    throw ValidationError("warmup iterations must be non-negative");

  auto check01 = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream os;
      os << "threshold " << name << " out of range [0, 1]";
      throw ValidationError(os.str());
    }
  };
  check01(cfg.alpha_pro, "alpha_pro");
  check01(cfg.alpha_cls, "alpha_cls");
  check01(cfg.alpha_iou, "alpha_iou");
  check01(cfg.alpha_col, "alpha_col");
  if (!(cfg.tau_con > 0) || !std::isfinite(cfg.tau_con))
    throw ValidationError("contrastive temperature must be positive");
  return cfg;
}

SceneRecord normalize_features(SceneRecord scene) {
  for (std::size_t i = 0; i < scene.proposals.size(); ++i) {
    Eigen::VectorXd& f = scene.proposals[i].feature;
    if (!f.allFinite()) {
      throw ValidationError("proposal " + std::to_string(i) +
                            ": feature has non-finite entries");
    }
    const double norm = f.norm();
    if (norm < 1e-300) {
      throw ValidationError("proposal " + std::to_string(i) +
                            ": feature has zero norm");
    }
    // Skipping near-unit vectors keeps the pass exactly idempotent: the
    // output of one normalization always lands inside this band.
    if (std::abs(norm - 1.0) > 1e-9) f /= norm;
  }
  return scene;
}

Eigen::MatrixXd score_matrix(const SceneRecord& scene) {
  const Eigen::Index n = static_cast<Eigen::Index>(scene.proposals.size());
  const Eigen::Index k = n > 0 ? scene.proposals[0].scores.size() : 0;
  Eigen::MatrixXd s(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (scene.proposals[i].scores.size() != k)
      throw ValidationError("proposal " + std::to_string(i) +
                            ": inconsistent score length");
    s.row(i) = scene.proposals[i].scores.transpose();
  }
  return s;
}

Eigen::MatrixXd feature_matrix(const SceneRecord& scene) {
  const Eigen::Index n = static_cast<Eigen::Index>(scene.proposals.size());
  const Eigen::Index c = n > 0 ? scene.proposals[0].feature.size() : 0;
  Eigen::MatrixXd f(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (scene.proposals[i].feature.size() != c)
      throw ValidationError("proposal " + std::to_string(i) +
                            ": inconsistent feature length");
    f.row(i) = scene.proposals[i].feature.transpose();
  }
  return f;
}

}  // namespace protomine
