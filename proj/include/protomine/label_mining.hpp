#ifndef PROTOMINE_LABEL_MINING_HPP_
#define PROTOMINE_LABEL_MINING_HPP_

#include "protomine/prototype_bank.hpp"
#include "protomine/types.hpp"

namespace protomine {

// Dense feature-to-prototype affinity, N x K x O, flat row-major.
struct AffinityTensor {
  int n = 0;
  int k = 0;
  int o = 0;
  std::vector<double> data;

  double at(int i, int kk, int oo) const {
    return data[(static_cast<std::size_t>(i) * k + kk) * o + oo];
  }
  double& at(int i, int kk, int oo) {
    return data[(static_cast<std::size_t>(i) * k + kk) * o + oo];
  }
};

// The three filter masks over a scene's proposals. An entry is true when
// the proposal survives that mask.
struct SceneMasks {
  std::vector<char> foreground;  // max score >= alpha_pro
  std::vector<char> non_sparse;  // center inside no sparse-label box
  std::vector<char> in_range;    // center inside point_range, closed bounds
};

// Row-wise propagation output: W = S (.) A' and its per-row argmax.
struct Propagation {
  Eigen::MatrixXd w;
  std::vector<int> labels;
};

// Everything mined from one scene. kept never relabels: it is a subset of
// {(i, labels[i])}.
struct PropagationResult {
  Eigen::MatrixXd affinity_reduced;  // N x K
  Eigen::MatrixXd propagation;       // N x K, equals S (.) A' exactly
  std::vector<int> labels;           // per-proposal class id
  std::vector<PrototypeLabel> kept;  // after all three masks
  SceneMasks masks;
};

// A[i,k,o] = <f_i, p_{k,o}>. Rejects a bank that has not finished warm-up.
AffinityTensor affinity(const Eigen::MatrixXd& features,
                        const PrototypeBank& bank, const MiningConfig& cfg);

// A'[i,k] = max over o of A[i,k,o].
Eigen::MatrixXd reduce_affinity(const AffinityTensor& a);

// W = S (.) A'; labels[i] = argmax_k W[i,:], ties to the lowest class.
Propagation propagate(const Eigen::MatrixXd& scores,
                      const Eigen::MatrixXd& affinity_reduced);

SceneMasks build_masks(const SceneRecord& scene, const Eigen::MatrixXd& scores,
                       const MiningConfig& cfg);

// Full mining pass. Returns an empty kept set (without erroring) when the
// bank has not finished warm-up, so training loops can call it
// unconditionally.
PropagationResult mine_prototype_labels(const SceneRecord& scene,
                                        const PrototypeBank& bank,
                                        const MiningConfig& cfg);

}  // namespace protomine

#endif  // PROTOMINE_LABEL_MINING_HPP_
