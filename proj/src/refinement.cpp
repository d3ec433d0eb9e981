#include "protomine/refinement.hpp"

#include "protomine/geometry.hpp"

#include <algorithm>
#include <numeric>

namespace protomine {

std::vector<Prediction> score_filter(const std::vector<Prediction>& preds,
                                     double alpha_cls) {
  std::vector<Prediction> out;
  out.reserve(preds.size());
  for (const Prediction& p : preds) {
    if (p.score >= alpha_cls) out.push_back(p);
  }
  return out;
}

std::vector<Prediction> iou_filter(const std::vector<Prediction>& preds,
                                   double alpha_iou) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].score > preds[b].score;
  });

  std::vector<std::size_t> kept_order;
  for (std::size_t idx : order) {
    bool suppressed = false;
    for (std::size_t kept : kept_order) {
      if (overlap(preds[idx].box, preds[kept].box).iou >= alpha_iou) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept_order.push_back(idx);
  }

  std::sort(kept_order.begin(), kept_order.end());
  std::vector<Prediction> out;
  out.reserve(kept_order.size());
  for (std::size_t idx : kept_order) out.push_back(preds[idx]);
  return out;
}

std::vector<Prediction> collision_filter(const std::vector<Prediction>& preds,
                                         const std::vector<LabeledBox>& sparse,
                                         double alpha_col,
                                         CollisionMetric metric) {
  std::vector<Prediction> out;
  out.reserve(preds.size());
  for (const Prediction& p : preds) {
    double worst = 0.0;
    for (const LabeledBox& lb : sparse) {
      const OverlapReport r = overlap(p.box, lb.box);
      const double c =
          metric == CollisionMetric::Iou ? r.iou : r.collision_fraction;
      worst = std::max(worst, c);
    }
    if (worst > alpha_col) continue;  // strict: "exceeding" removes
    out.push_back(p);
  }
  return out;
}

std::vector<PseudoLabel> make_pseudo_labels(const std::vector<Prediction>& preds,
                                            const SceneRecord& scene,
                                            const MiningConfig& cfg) {
  std::vector<Prediction> kept = score_filter(preds, cfg.alpha_cls);
  kept = iou_filter(kept, cfg.alpha_iou);
  kept = collision_filter(kept, scene.sparse_labels, cfg.alpha_col,
                          cfg.collision_metric);
  std::vector<PseudoLabel> out;
  out.reserve(kept.size());
  for (const Prediction& p : kept)
    out.push_back(PseudoLabel{p.class_id, p.box, p.score});
  return out;
}

LabelSet cooperate(const SceneRecord& scene,
                   const std::vector<PseudoLabel>& pseudo,
                   const PrototypeBank& bank, const MiningConfig& cfg) {
  LabelSet labels;
  labels.sparse = scene.sparse_labels;
  labels.pseudo = pseudo;
  if (!is_warmed_up(bank, cfg)) return labels;

  const PropagationResult mined = mine_prototype_labels(scene, bank, cfg);
  // mined.kept already excludes sparse-covered, background, and
  // out-of-range proposals; restrict further to regions no pseudo box
  // labels.
  for (const PrototypeLabel& pl : mined.kept) {
    const auto& center =
        scene.proposals[static_cast<std::size_t>(pl.proposal_index)].center;
    bool in_pseudo = false;
    for (const PseudoLabel& pb : pseudo) {
      if (contains_point(pb.box, center)) {
        in_pseudo = true;
        break;
      }
    }
    if (!in_pseudo) labels.prototype.push_back(pl);
  }
  return labels;
}

}  // namespace protomine
