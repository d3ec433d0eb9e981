#ifndef PROTOMINE_REFINEMENT_HPP_
#define PROTOMINE_REFINEMENT_HPP_

#include "protomine/label_mining.hpp"
#include "protomine/prototype_bank.hpp"
#include "protomine/types.hpp"

namespace protomine {

// One raw detector prediction awaiting refinement.
struct Prediction {
  int class_id = 0;
  double score = 0.0;
  Box3D box;
};

// Keeps predictions with score >= alpha_cls (inclusive), original order.
std::vector<Prediction> score_filter(const std::vector<Prediction>& preds,
                                     double alpha_cls);

// Class-agnostic greedy suppression: visit by descending score (ties by
// original index), drop a prediction whose IoU with any survivor is
// >= alpha_iou. Output keeps the input's relative order.
std::vector<Prediction> iou_filter(const std::vector<Prediction>& preds,
                                   double alpha_iou);

// Drops predictions whose collision with any sparse annotation strictly
// exceeds alpha_col, so ground truth wins on doubly-labeled objects.
std::vector<Prediction> collision_filter(const std::vector<Prediction>& preds,
                                         const std::vector<LabeledBox>& sparse,
                                         double alpha_col,
                                         CollisionMetric metric);

// Score -> IoU -> collision, then promotion to pseudo labels.
std::vector<PseudoLabel> make_pseudo_labels(const std::vector<Prediction>& preds,
                                            const SceneRecord& scene,
                                            const MiningConfig& cfg);

// Three-step label cooperation: foreground separation by score, labeled
// regions from sparse + pseudo boxes, prototype labels for the residual
// foreground. The prototype slot is empty before warm-up.
LabelSet cooperate(const SceneRecord& scene,
                   const std::vector<PseudoLabel>& pseudo,
                   const PrototypeBank& bank, const MiningConfig& cfg);

}  // namespace protomine

#endif  // PROTOMINE_REFINEMENT_HPP_
