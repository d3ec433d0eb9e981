#ifndef PROTOMINE_IO_HPP_
#define PROTOMINE_IO_HPP_

#include "protomine/types.hpp"

#include <filesystem>

namespace protomine {

// Corpus index. scene_files are stored relative to the manifest location.
struct CorpusManifest {
  int format_version = 1;
  int num_classes = 0;   // K
  int feature_dim = 0;   // C
  std::vector<std::string> class_names;
  std::vector<std::string> scene_files;
  std::filesystem::path base_dir;  // set on load, not serialized
};

CorpusManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const CorpusManifest& manifest,
                    const std::filesystem::path& path);

// Scene exchange format: JSON Lines. First line carries scene_id,
// point_range and has_gt; then one line per proposal, sparse_label and
// gt_label record. write -> read -> write is byte-identical; floats use
// the shortest decimal that round-trips.
SceneRecord read_scene(const std::filesystem::path& path, int num_classes,
                       int feature_dim);
void write_scene(const SceneRecord& scene, const std::filesystem::path& path);
std::string scene_to_string(const SceneRecord& scene);
SceneRecord scene_from_string(const std::string& text, int num_classes,
                              int feature_dim, const std::string& origin);

// Label files mirror the scene format: a scene_id header line followed by
// sparse_label / pseudo_label / prototype_label records.
struct SceneLabels {
  std::string scene_id;
  LabelSet labels;
};
SceneLabels read_labels(const std::filesystem::path& path);
void write_labels(const SceneLabels& labels, const std::filesystem::path& path);
std::string labels_to_string(const SceneLabels& labels);
SceneLabels labels_from_string(const std::string& text,
                               const std::string& origin);

// Prediction files reuse the proposal schema (read as proposals).
std::vector<Proposal> read_predictions(const std::filesystem::path& path,
                                       int num_classes, int feature_dim,
                                       std::string* scene_id = nullptr);
void write_predictions(const std::string& scene_id,
                       const std::vector<Proposal>& preds,
                       const std::filesystem::path& path);

// Loads every scene listed by a manifest, in manifest order.
std::vector<SceneRecord> load_corpus(const CorpusManifest& manifest);

enum class SparsifyMode {
  OnePerScene,
  NPerScene,
  OnePerClassPerScene,
};

struct SparsifyResult {
  std::vector<SceneRecord> scenes;
  std::vector<std::string> warnings;
};

// Rebuilds sparse_labels from gt_labels: one uniformly chosen object per
// scene, min(n, |gt|) objects, or one object per class present. Full gt is
// retained for evaluation. Deterministic for a fixed seed; a scene with no
// gt objects is kept with empty sparse labels and a warning.
SparsifyResult sparsify(std::vector<SceneRecord> scenes, SparsifyMode mode,
                        int n, std::uint64_t seed);

}  // namespace protomine

#endif  // PROTOMINE_IO_HPP_
