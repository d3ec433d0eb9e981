#ifndef PROTOMINE_SYNTH_HPP_
#define PROTOMINE_SYNTH_HPP_

#include "protomine/types.hpp"

namespace protomine {

// Synthetic box-world generator with an oracle detector. Class feature
// directions are the first K basis vectors of R^C (so C >= K); proposal
// features are those directions under angular noise and scores are
// detection-quality-correlated with noise. Every scene carries full gt, so
// label statistics are checkable by construction.
struct SynthSpec {
  int scenes = 100;
  int objects_per_scene = 12;
  int clutter_per_scene = 8;  // background proposals per scene
  int num_classes = 6;        // K
  int feature_dim = 32;       // C, must be >= K

  // Noise levels; 0 gives a perfect detector (argmax score = gt class,
  // exact boxes, no misses, quiet clutter).
  double feature_noise = 0.25;
  double score_noise = 0.3;
  double box_noise = 0.3;
  double miss_rate = 0.3;  // prediction dropout per object

  bool yawed = false;  // rotate boxes (outdoor-style corpora)
  std::uint64_t seed = 0;
};

struct SynthCorpus {
  std::vector<SceneRecord> scenes;                 // gt filled, sparse empty
  std::vector<std::vector<Proposal>> predictions;  // detector outputs per scene
  std::vector<std::string> class_names;
};

// Deterministic for a fixed spec (single generator, fixed draw order).
SynthCorpus synth_corpus(const SynthSpec& spec);

}  // namespace protomine

#endif  // PROTOMINE_SYNTH_HPP_
