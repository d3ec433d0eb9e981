#ifndef PROTOMINE_LABEL_STATS_HPP_
#define PROTOMINE_LABEL_STATS_HPP_

#include "protomine/types.hpp"

#include <optional>
#include <string>

namespace protomine {

// Label family selectors, combinable.
using FamilyMask = unsigned;
inline constexpr FamilyMask kFamilySparse = 1u;
inline constexpr FamilyMask kFamilyPseudo = 2u;
inline constexpr FamilyMask kFamilyPrototype = 4u;
inline constexpr FamilyMask kFamilyAll =
    kFamilySparse | kFamilyPseudo | kFamilyPrototype;

// One scene with the labels mined for it. Both pointers borrowed.
struct ScenePair {
  const SceneRecord* scene = nullptr;
  const LabelSet* labels = nullptr;
};

// Integer per-class tallies for one or more scenes. Merging is associative
// and order-free, so scenes may be tallied in parallel.
struct StatsTally {
  int num_classes = 0;
  double iou_thresh = 0.25;
  std::vector<long> gt_count;         // per class
  std::vector<long> sparse_count;     // labels per class
  std::vector<long> pseudo_count;
  std::vector<long> prototype_count;
  std::vector<long> pseudo_correct;   // greedy one-to-one matches
  std::vector<long> prototype_correct;
  // recall_combo[class][c] counts GT objects whose recall pattern is the
  // 3-bit combination c of (sparse, pseudo, prototype) hits.
  std::vector<std::array<long, 8>> recall_combo;
};

StatsTally tally_scene(const SceneRecord& scene, const LabelSet& labels,
                       int num_classes, double iou_thresh);
void merge_tally(StatsTally& into, const StatsTally& from);

struct PerClassRate {
  std::vector<std::optional<double>> per_class;  // nullopt where undefined
  std::optional<double> mean;                    // over defined classes
};

// Precision of pseudo labels: correct when a same-class GT box matches with
// IoU >= iou_thresh under greedy one-to-one matching by descending IoU.
// Classes without pseudo labels are undefined and excluded from the mean.
PerClassRate pseudo_precision(const std::vector<ScenePair>& corpus,
                              int num_classes, double iou_thresh);

// Precision of prototype labels: correct when the proposal center lies
// inside a same-class GT box.
PerClassRate prototype_precision(const std::vector<ScenePair>& corpus,
                                 int num_classes);

struct RecallResult {
  std::vector<std::optional<double>> per_class;  // nullopt where no GT
  double mar = 0.0;  // mean over classes with at least one GT instance
};

// A GT object counts as recalled when an enabled box family (sparse or
// pseudo) overlaps it with IoU >= iou_thresh with the right class, or when
// the prototype family is enabled and a same-class prototype label sits
// center-inside it.
RecallResult recall_with(const std::vector<ScenePair>& corpus, int num_classes,
                         FamilyMask families, double iou_thresh);

struct RecallRow {
  std::string name;
  FamilyMask families = 0;
  RecallResult recall;
};

struct QualityReport {
  int num_classes = 0;
  double iou_thresh = 0.25;
  long sparse_count = 0;
  long pseudo_count = 0;
  long prototype_count = 0;
  std::vector<long> gt_per_class;
  PerClassRate pseudo_prec;
  PerClassRate prototype_prec;
  std::vector<RecallRow> recall_rows;  // the four-row family-subset table
};

// Full report over a corpus; throws when any scene lacks gt_labels or when
// `families` is empty. Rows follow the published table order: sparse,
// sparse+prototype, sparse+pseudo, all (restricted to enabled families).
QualityReport compute_quality(const std::vector<ScenePair>& corpus,
                              int num_classes, double iou_thresh,
                              FamilyMask families = kFamilyAll);

// Deterministic text rendering consumed by the stats CLI command.
std::string report_to_text(const QualityReport& report,
                           const std::vector<std::string>& class_names);

}  // namespace protomine

#endif  // PROTOMINE_LABEL_STATS_HPP_
