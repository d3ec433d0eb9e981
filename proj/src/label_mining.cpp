#include "protomine/label_mining.hpp"

#include "protomine/geometry.hpp"

namespace protomine {

AffinityTensor affinity(const Eigen::MatrixXd& features,
                        const PrototypeBank& bank, const MiningConfig& cfg) {
  if (!is_warmed_up(bank, cfg))
    throw ValidationError("prototype bank has not finished warm-up");
  if (features.cols() != bank.dim())
    throw ValidationError("feature dimension " + std::to_string(features.cols()) +
                          " does not match bank dimension " +
                          std::to_string(bank.dim()));

  AffinityTensor a;
  a.n = static_cast<int>(features.rows());
  a.k = bank.num_classes();
  a.o = bank.per_class();
  a.data.assign(static_cast<std::size_t>(a.n) * a.k * a.o, 0.0);
  for (int k = 0; k < a.k; ++k) {
    // N x O block for class k.
    const Eigen::MatrixXd block =
        features * bank.prototypes[static_cast<std::size_t>(k)].transpose();
    for (int i = 0; i < a.n; ++i)
      for (int o = 0; o < a.o; ++o) a.at(i, k, o) = block(i, o);
  }
  return a;
}

Eigen::MatrixXd reduce_affinity(const AffinityTensor& a) {
  Eigen::MatrixXd out(a.n, a.k);
  for (int i = 0; i < a.n; ++i) {
    for (int k = 0; k < a.k; ++k) {
      double best = a.at(i, k, 0);
      for (int o = 1; o < a.o; ++o) best = std::max(best, a.at(i, k, o));
      out(i, k) = best;
    }
  }
  return out;
}

Propagation propagate(const Eigen::MatrixXd& scores,
                      const Eigen::MatrixXd& affinity_reduced) {
  if (scores.rows() != affinity_reduced.rows() ||
      scores.cols() != affinity_reduced.cols())
    throw ValidationError("score and affinity shapes differ");
  Propagation p;
  p.w = scores.cwiseProduct(affinity_reduced);
  p.labels.resize(static_cast<std::size_t>(p.w.rows()));
  for (Eigen::Index i = 0; i < p.w.rows(); ++i) {
    int best = 0;
    for (Eigen::Index k = 1; k < p.w.cols(); ++k) {
      if (p.w(i, k) > p.w(i, best)) best = static_cast<int>(k);
    }
    p.labels[static_cast<std::size_t>(i)] = best;
  }
  return p;
}

SceneMasks build_masks(const SceneRecord& scene, const Eigen::MatrixXd& scores,
                       const MiningConfig& cfg) {
  const std::size_t n = scene.proposals.size();
  SceneMasks m;
  m.foreground.assign(n, 0);
  m.non_sparse.assign(n, 0);
  m.in_range.assign(n, 0);
  const auto& r = scene.point_range;
  for (std::size_t i = 0; i < n; ++i) {
    const Proposal& p = scene.proposals[i];
    const double max_score =
        scores.cols() > 0 ? scores.row(static_cast<Eigen::Index>(i)).maxCoeff()
                          : 0.0;
    m.foreground[i] = max_score >= cfg.alpha_pro ? 1 : 0;

    bool in_sparse = false;
    for (const LabeledBox& lb : scene.sparse_labels) {
      if (contains_point(lb.box, p.center)) {
        in_sparse = true;
        break;
      }
    }
    m.non_sparse[i] = in_sparse ? 0 : 1;

    const auto& c = p.center;
    m.in_range[i] = (c.x() >= r[0] && c.x() <= r[3] && c.y() >= r[1] &&
                     c.y() <= r[4] && c.z() >= r[2] && c.z() <= r[5])
                        ? 1
                        : 0;
  }
  return m;
}

PropagationResult mine_prototype_labels(const SceneRecord& scene,
                                        const PrototypeBank& bank,
                                        const MiningConfig& cfg) {
  PropagationResult res;
  if (!is_warmed_up(bank, cfg)) return res;  // warm-up gate: nothing mined

  const Eigen::MatrixXd features = feature_matrix(scene);
  const Eigen::MatrixXd scores = score_matrix(scene);
  if (scene.proposals.empty()) return res;
  if (scores.cols() != bank.num_classes())
    throw ValidationError("score length " + std::to_string(scores.cols()) +
                          " does not match bank class count " +
                          std::to_string(bank.num_classes()));

  const AffinityTensor a = affinity(features, bank, cfg);
  res.affinity_reduced = reduce_affinity(a);
  Propagation prop = propagate(scores, res.affinity_reduced);
  res.propagation = std::move(prop.w);
  res.labels = std::move(prop.labels);
  res.masks = build_masks(scene, scores, cfg);

  for (std::size_t i = 0; i < scene.proposals.size(); ++i) {
    if (res.masks.foreground[i] && res.masks.non_sparse[i] &&
        res.masks.in_range[i]) {
      res.kept.push_back(
          PrototypeLabel{static_cast<int>(i), res.labels[i]});
    }
  }
  return res;
}

}  // namespace protomine
