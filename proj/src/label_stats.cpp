#include "protomine/label_stats.hpp"

#include "protomine/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace protomine {

namespace {

void require_gt(const SceneRecord& scene) {
  if (!scene.gt_labels.has_value())
    throw ValidationError("scene " + scene.scene_id +
                          " has no gt_labels; statistics need ground truth");
}

StatsTally accumulate(const std::vector<ScenePair>& corpus, int num_classes,
                      double iou_thresh) {
  StatsTally total;
  total.num_classes = num_classes;
  total.iou_thresh = iou_thresh;
  total.gt_count.assign(static_cast<std::size_t>(num_classes), 0);
  total.sparse_count.assign(static_cast<std::size_t>(num_classes), 0);
  total.pseudo_count.assign(static_cast<std::size_t>(num_classes), 0);
  total.prototype_count.assign(static_cast<std::size_t>(num_classes), 0);
  total.pseudo_correct.assign(static_cast<std::size_t>(num_classes), 0);
  total.prototype_correct.assign(static_cast<std::size_t>(num_classes), 0);
  total.recall_combo.assign(static_cast<std::size_t>(num_classes), {});
  for (const ScenePair& pair : corpus) {
    require_gt(*pair.scene);
    merge_tally(total,
                tally_scene(*pair.scene, *pair.labels, num_classes, iou_thresh));
  }
  return total;
}

std::optional<double> ratio(long num, long den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

PerClassRate rate_from(const std::vector<long>& correct,
                       const std::vector<long>& total) {
  PerClassRate r;
  r.per_class.resize(total.size());
  double acc = 0.0;
  long defined = 0;
  for (std::size_t k = 0; k < total.size(); ++k) {
    r.per_class[k] = ratio(correct[k], total[k]);
    if (r.per_class[k]) {
      acc += *r.per_class[k];
      ++defined;
    }
  }
  if (defined > 0) r.mean = acc / static_cast<double>(defined);
  return r;
}

RecallResult recall_from(const StatsTally& t, FamilyMask families) {
  RecallResult r;
  r.per_class.resize(t.gt_count.size());
  double acc = 0.0;
  long defined = 0;
  for (std::size_t k = 0; k < t.gt_count.size(); ++k) {
    if (t.gt_count[k] == 0) continue;
    long hit = 0;
    for (unsigned combo = 1; combo < 8; ++combo) {
      if (combo & families) hit += t.recall_combo[k][combo];
    }
    r.per_class[k] = static_cast<double>(hit) / t.gt_count[k];
    acc += *r.per_class[k];
    ++defined;
  }
  r.mar = defined > 0 ? acc / static_cast<double>(defined) : 0.0;
  return r;
}

std::string fmt_rate(const std::optional<double>& v) {
  if (!v) return "   -  ";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%6.4f", *v);
  return buf;
}

}  // namespace

StatsTally tally_scene(const SceneRecord& scene, const LabelSet& labels,
                       int num_classes, double iou_thresh) {
  require_gt(scene);
  const std::vector<LabeledBox>& gt = *scene.gt_labels;

  StatsTally t;
  t.num_classes = num_classes;
  t.iou_thresh = iou_thresh;
  t.gt_count.assign(static_cast<std::size_t>(num_classes), 0);
  t.sparse_count.assign(static_cast<std::size_t>(num_classes), 0);
  t.pseudo_count.assign(static_cast<std::size_t>(num_classes), 0);
  t.prototype_count.assign(static_cast<std::size_t>(num_classes), 0);
  t.pseudo_correct.assign(static_cast<std::size_t>(num_classes), 0);
  t.prototype_correct.assign(static_cast<std::size_t>(num_classes), 0);
  t.recall_combo.assign(static_cast<std::size_t>(num_classes), {});

  auto check_class = [&](int k, const char* what) {
    if (k < 0 || k >= num_classes)
      throw ValidationError(scene.scene_id + ": " + what +
                            " class id out of range");
  };

  for (const LabeledBox& lb : gt) check_class(lb.class_id, "gt");
  for (const LabeledBox& lb : labels.sparse) check_class(lb.class_id, "sparse");
  for (const PseudoLabel& pl : labels.pseudo) check_class(pl.class_id, "pseudo");
  for (const PrototypeLabel& pl : labels.prototype) {
    check_class(pl.class_id, "prototype");
    if (pl.proposal_index < 0 ||
        pl.proposal_index >= static_cast<int>(scene.proposals.size()))
      throw ValidationError(scene.scene_id +
                            ": prototype label proposal index out of range");
  }

  for (const LabeledBox& lb : labels.sparse)
    t.sparse_count[static_cast<std::size_t>(lb.class_id)]++;
  for (const PseudoLabel& pl : labels.pseudo)
    t.pseudo_count[static_cast<std::size_t>(pl.class_id)]++;
  for (const PrototypeLabel& pl : labels.prototype)
    t.prototype_count[static_cast<std::size_t>(pl.class_id)]++;

  // Pseudo precision: greedy one-to-one matching by descending IoU within
  // each class.
  for (int k = 0; k < num_classes; ++k) {
    struct Cand {
      double iou;
      std::size_t pseudo_idx;
      std::size_t gt_idx;
    };
    std::vector<Cand> cands;
    for (std::size_t p = 0; p < labels.pseudo.size(); ++p) {
      if (labels.pseudo[p].class_id != k) continue;
      for (std::size_t g = 0; g < gt.size(); ++g) {
        if (gt[g].class_id != k) continue;
        const double iou = overlap(labels.pseudo[p].box, gt[g].box).iou;
        if (iou >= iou_thresh) cands.push_back({iou, p, g});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      return a.iou > b.iou;
    });
    std::vector<char> pseudo_used(labels.pseudo.size(), 0);
    std::vector<char> gt_used(gt.size(), 0);
    for (const Cand& c : cands) {
      if (pseudo_used[c.pseudo_idx] || gt_used[c.gt_idx]) continue;
      pseudo_used[c.pseudo_idx] = 1;
      gt_used[c.gt_idx] = 1;
      t.pseudo_correct[static_cast<std::size_t>(k)]++;
    }
  }

  // Prototype precision: center-inside a same-class GT box.
  for (const PrototypeLabel& pl : labels.prototype) {
    const auto& center =
        scene.proposals[static_cast<std::size_t>(pl.proposal_index)].center;
    for (const LabeledBox& g : gt) {
      if (g.class_id != pl.class_id) continue;
      if (contains_point(g.box, center)) {
        t.prototype_correct[static_cast<std::size_t>(pl.class_id)]++;
        break;
      }
    }
  }

  // Recall: one-to-many; record which families hit each GT object.
  for (const LabeledBox& g : gt) {
    unsigned combo = 0;
    for (const LabeledBox& lb : labels.sparse) {
      if (lb.class_id == g.class_id &&
          overlap(lb.box, g.box).iou >= iou_thresh) {
        combo |= kFamilySparse;
        break;
      }
    }
    for (const PseudoLabel& pl : labels.pseudo) {
      if (pl.class_id == g.class_id &&
          overlap(pl.box, g.box).iou >= iou_thresh) {
        combo |= kFamilyPseudo;
        break;
      }
    }
    for (const PrototypeLabel& pl : labels.prototype) {
      if (pl.class_id != g.class_id) continue;
      const auto& center =
          scene.proposals[static_cast<std::size_t>(pl.proposal_index)].center;
      if (contains_point(g.box, center)) {
        combo |= kFamilyPrototype;
        break;
      }
    }
    t.gt_count[static_cast<std::size_t>(g.class_id)]++;
    t.recall_combo[static_cast<std::size_t>(g.class_id)][combo]++;
  }
  return t;
}

void merge_tally(StatsTally& into, const StatsTally& from) {
  if (into.num_classes != from.num_classes)
    throw ValidationError("tally class counts differ");
  for (std::size_t k = 0; k < into.gt_count.size(); ++k) {
    into.gt_count[k] += from.gt_count[k];
    into.sparse_count[k] += from.sparse_count[k];
    into.pseudo_count[k] += from.pseudo_count[k];
    into.prototype_count[k] += from.prototype_count[k];
    into.pseudo_correct[k] += from.pseudo_correct[k];
    into.prototype_correct[k] += from.prototype_correct[k];
    for (int c = 0; c < 8; ++c) into.recall_combo[k][c] += from.recall_combo[k][c];
  }
}

PerClassRate pseudo_precision(const std::vector<ScenePair>& corpus,
                              int num_classes, double iou_thresh) {
  const StatsTally t = accumulate(corpus, num_classes, iou_thresh);
  return rate_from(t.pseudo_correct, t.pseudo_count);
}

PerClassRate prototype_precision(const std::vector<ScenePair>& corpus,
                                 int num_classes) {
  const StatsTally t = accumulate(corpus, num_classes, 0.25);
  return rate_from(t.prototype_correct, t.prototype_count);
}

RecallResult recall_with(const std::vector<ScenePair>& corpus, int num_classes,
                         FamilyMask families, double iou_thresh) {
  if ((families & kFamilyAll) == 0)
    throw ValidationError("recall requires at least one label family");
  const StatsTally t = accumulate(corpus, num_classes, iou_thresh);
  return recall_from(t, families);
}

QualityReport compute_quality(const std::vector<ScenePair>& corpus,
                              int num_classes, double iou_thresh,
                              FamilyMask families) {
  if ((families & kFamilyAll) == 0)
    throw ValidationError("at least one label family must be enabled");
  const StatsTally t = accumulate(corpus, num_classes, iou_thresh);

  QualityReport r;
  r.num_classes = num_classes;
  r.iou_thresh = iou_thresh;
  r.gt_per_class = t.gt_count;
  for (std::size_t k = 0; k < t.gt_count.size(); ++k) {
    r.sparse_count += t.sparse_count[k];
    r.pseudo_count += t.pseudo_count[k];
    r.prototype_count += t.prototype_count[k];
  }
  r.pseudo_prec = rate_from(t.pseudo_correct, t.pseudo_count);
  r.prototype_prec = rate_from(t.prototype_correct, t.prototype_count);

  const std::array<std::pair<const char*, FamilyMask>, 4> rows = {{
      {"sparse", kFamilySparse},
      {"sparse+prototype", kFamilySparse | kFamilyPrototype},
      {"sparse+pseudo", kFamilySparse | kFamilyPseudo},
      {"sparse+prototype+pseudo", kFamilyAll},
  }};
  for (const auto& [name, mask] : rows) {
    if ((mask & families) != mask) continue;
    RecallRow row;
    row.name = name;
    row.families = mask;
    row.recall = recall_from(t, mask);
    r.recall_rows.push_back(std::move(row));
  }
  return r;
}

std::string report_to_text(const QualityReport& report,
                           const std::vector<std::string>& class_names) {
  std::ostringstream os;
  auto name_of = [&](int k) {
    if (k < static_cast<int>(class_names.size())) return class_names[static_cast<std::size_t>(k)];
    return "class_" + std::to_string(k);
  };

  os << "LABEL QUALITY REPORT\n";
  os << "classes: " << report.num_classes
     << "  iou_thresh: " << report.iou_thresh << "\n";
  os << "label counts: sparse=" << report.sparse_count
     << " pseudo=" << report.pseudo_count
     << " prototype=" << report.prototype_count << "\n\n";

  os << "precision per class\n";
  os << "class                     pseudo  prototype\n";
  for (int k = 0; k < report.num_classes; ++k) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-24s  %s  %s\n", name_of(k).c_str(),
                  fmt_rate(report.pseudo_prec.per_class[static_cast<std::size_t>(k)]).c_str(),
                  fmt_rate(report.prototype_prec.per_class[static_cast<std::size_t>(k)]).c_str());
    os << line;
  }
  {
    char line[128];
    std::snprintf(line, sizeof(line), "%-24s  %s  %s\n", "mean",
                  fmt_rate(report.pseudo_prec.mean).c_str(),
                  fmt_rate(report.prototype_prec.mean).c_str());
    os << line;
  }

  os << "\nrecall by label families (mAR)\n";
  os << "families                     mAR\n";
  for (const RecallRow& row : report.recall_rows) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-24s  %6.4f\n", row.name.c_str(),
                  row.recall.mar);
    os << line;
  }

  os << "\nper-class recall\n";
  os << "class                   ";
  for (const RecallRow& row : report.recall_rows) {
    char cell[64];
    std::snprintf(cell, sizeof(cell), "  %-24s", row.name.c_str());
    os << cell;
  }
  os << "\n";
  for (int k = 0; k < report.num_classes; ++k) {
    char head[64];
    std::snprintf(head, sizeof(head), "%-24s", name_of(k).c_str());
    os << head;
    for (const RecallRow& row : report.recall_rows) {
      char cell[64];
      std::snprintf(cell, sizeof(cell), "  %-24s",
                    fmt_rate(row.recall.per_class[static_cast<std::size_t>(k)]).c_str());
      os << cell;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace protomine
