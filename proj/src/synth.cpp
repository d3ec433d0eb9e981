#include "protomine/synth.hpp"

#include "protomine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace protomine {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

SynthCorpus synth_corpus(const SynthSpec& spec) {
  if (spec.scenes < 0 || spec.objects_per_scene < 0 || spec.clutter_per_scene < 0)
    throw ValidationError("synth counts must be non-negative");
  if (spec.num_classes < 1) throw ValidationError("synth needs K >= 1");
  if (spec.feature_dim < spec.num_classes)
    throw ValidationError("synth needs C >= K for orthogonal class directions");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int c_dim = spec.feature_dim;
  auto random_unit_vector = [&]() {
    Eigen::VectorXd g(c_dim);
    for (int i = 0; i < c_dim; ++i) g[i] = normal(rng);
    const double n = g.norm();
    return n > 0 ? Eigen::VectorXd(g / n) : Eigen::VectorXd::Unit(c_dim, 0).eval();
  };
  auto class_feature = [&](int k) {
    Eigen::VectorXd f = Eigen::VectorXd::Unit(c_dim, k);
    if (spec.feature_noise > 0) f += spec.feature_noise * random_unit_vector();
    return Eigen::VectorXd(f / f.norm());
  };

  const std::array<double, 6> range = {-10.0, -10.0, -4.0, 10.0, 10.0, 4.0};

  SynthCorpus out;
  for (int k = 0; k < spec.num_classes; ++k)
    out.class_names.push_back("class_" + std::to_string(k));

  for (int s = 0; s < spec.scenes; ++s) {
    SceneRecord scene;
    scene.scene_id = "scene_" + std::to_string(s);
    scene.point_range = range;
    scene.gt_labels.emplace();

    // Ground-truth objects: round-robin classes for exact per-class balance,
    // rejection-sampled placement so same-scene boxes barely overlap.
    for (int j = 0; j < spec.objects_per_scene; ++j) {
      const int k = (j + s) % spec.num_classes;
      Box3D box;
      box.dx = 0.8 + 1.4 * unit(rng);
      box.dy = 0.8 + 1.4 * unit(rng);
      box.dz = 0.8 + 1.2 * unit(rng);
      box.yaw = spec.yawed ? (2.0 * unit(rng) - 1.0) * M_PI : 0.0;
      for (int attempt = 0; attempt < 64; ++attempt) {
        box.cx = -8.0 + 16.0 * unit(rng);
        box.cy = -8.0 + 16.0 * unit(rng);
        box.cz = -2.0 + 4.0 * unit(rng);
        bool clear = true;
        for (const LabeledBox& other : *scene.gt_labels) {
          if (overlap(box, other.box).iou >= 0.05) {
            clear = false;
            break;
          }
        }
        if (clear) break;
      }
      scene.gt_labels->push_back(LabeledBox{k, box});
    }

    // One detector proposal per object: center jitter, noisy class-direction
    // feature, scores peaked on the true class.
    std::vector<Proposal> preds;
    for (const LabeledBox& obj : *scene.gt_labels) {
      Proposal p;
      const Box3D& gb = obj.box;
      p.center = Eigen::Vector3d(
          gb.cx + 0.1 * spec.box_noise * gb.dx * normal(rng),
          gb.cy + 0.1 * spec.box_noise * gb.dy * normal(rng),
          gb.cz + 0.1 * spec.box_noise * gb.dz * normal(rng));
      p.feature = class_feature(obj.class_id);
      p.scores = Eigen::VectorXd::Zero(spec.num_classes);
      for (int k = 0; k < spec.num_classes; ++k) {
        if (k == obj.class_id) {
          p.scores[k] = clamp01(0.75 - 0.35 * spec.score_noise * std::abs(normal(rng)));
        } else {
          p.scores[k] = clamp01(0.08 + 0.10 * spec.score_noise * std::abs(normal(rng)));
        }
      }
      p.box = gb;
      p.box.cx = p.center.x();
      p.box.cy = p.center.y();
      p.box.cz = p.center.z();
      p.box.dx = std::max(0.3, gb.dx * (1.0 + 0.2 * spec.box_noise * normal(rng)));
      p.box.dy = std::max(0.3, gb.dy * (1.0 + 0.2 * spec.box_noise * normal(rng)));
      p.box.dz = std::max(0.3, gb.dz * (1.0 + 0.2 * spec.box_noise * normal(rng)));
      scene.proposals.push_back(std::move(p));

      // Detector prediction for this object: heavier box noise, score tied
      // to detection quality, occasional dropout (missed detection).
      const double miss_draw = unit(rng);
      Proposal pred;
      const double jc = 0.45 * spec.box_noise;
      const double je = 0.35 * spec.box_noise;
      pred.box = gb;
      pred.box.cx = gb.cx + jc * gb.dx * normal(rng);
      pred.box.cy = gb.cy + jc * gb.dy * normal(rng);
      pred.box.cz = gb.cz + jc * gb.dz * normal(rng);
      pred.box.dx = std::max(0.3, gb.dx * (1.0 + je * normal(rng)));
      pred.box.dy = std::max(0.3, gb.dy * (1.0 + je * normal(rng)));
      pred.box.dz = std::max(0.3, gb.dz * (1.0 + je * normal(rng)));
      pred.center = Eigen::Vector3d(pred.box.cx, pred.box.cy, pred.box.cz);
      pred.feature = class_feature(obj.class_id);
      pred.scores = Eigen::VectorXd::Zero(spec.num_classes);
      for (int k = 0; k < spec.num_classes; ++k) {
        if (k == obj.class_id) {
          pred.scores[k] = clamp01(0.55 + 0.8 * spec.score_noise * normal(rng));
        } else {
          pred.scores[k] = clamp01(0.05 + 0.05 * spec.score_noise * std::abs(normal(rng)));
        }
      }
      if (miss_draw >= spec.miss_rate) preds.push_back(std::move(pred));
    }

    // Background clutter: random feature direction, quiet scores, except an
    // occasional confidently-wrong boost that feeds prototype false
    // positives.
    for (int j = 0; j < spec.clutter_per_scene; ++j) {
      Proposal p;
      p.center = Eigen::Vector3d(-9.0 + 18.0 * unit(rng), -9.0 + 18.0 * unit(rng),
                                 -3.0 + 6.0 * unit(rng));
      p.feature = random_unit_vector();
      p.scores = Eigen::VectorXd::Zero(spec.num_classes);
      for (int k = 0; k < spec.num_classes; ++k)
        p.scores[k] = clamp01(0.05 + 0.06 * spec.score_noise * std::abs(normal(rng)));
      const double boost_draw = unit(rng);
      const int boost_class =
          static_cast<int>(unit(rng) * spec.num_classes) % spec.num_classes;
      if (spec.score_noise > 0 && boost_draw < 0.3) {
        p.scores[boost_class] = clamp01(0.25 + 0.25 * std::abs(normal(rng)));
      }
      p.box.cx = p.center.x();
      p.box.cy = p.center.y();
      p.box.cz = p.center.z();
      p.box.dx = 0.5 + unit(rng);
      p.box.dy = 0.5 + unit(rng);
      p.box.dz = 0.5 + unit(rng);
      p.box.yaw = 0.0;
      scene.proposals.push_back(std::move(p));
    }

    // Rare spurious detections keep pseudo precision below 1.
    if (spec.score_noise > 0 && unit(rng) < 0.4) {
      Proposal fp;
      fp.box.cx = -8.0 + 16.0 * unit(rng);
      fp.box.cy = -8.0 + 16.0 * unit(rng);
      fp.box.cz = -2.0 + 4.0 * unit(rng);
      fp.box.dx = 0.6 + 1.0 * unit(rng);
      fp.box.dy = 0.6 + 1.0 * unit(rng);
      fp.box.dz = 0.6 + 1.0 * unit(rng);
      fp.box.yaw = 0.0;
      fp.center = Eigen::Vector3d(fp.box.cx, fp.box.cy, fp.box.cz);
      const int k = static_cast<int>(unit(rng) * spec.num_classes) % spec.num_classes;
      fp.feature = random_unit_vector();
      fp.scores = Eigen::VectorXd::Zero(spec.num_classes);
      fp.scores[k] = clamp01(0.3 + 0.2 * std::abs(normal(rng)));
      preds.push_back(std::move(fp));
    }

    out.scenes.push_back(std::move(scene));
    out.predictions.push_back(std::move(preds));
  }
  return out;
}

}  // namespace protomine
