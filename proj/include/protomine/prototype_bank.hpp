#ifndef PROTOMINE_PROTOTYPE_BANK_HPP_
#define PROTOMINE_PROTOTYPE_BANK_HPP_

#include "protomine/types.hpp"

#include <filesystem>
#include <utility>

namespace protomine {

// Class-aware prototype bank: K matrices of O unit-norm rows in R^C plus
// the training clock. Single writer: process_scene calls must be
// serialized; read-only snapshots are safe to share across threads.
struct PrototypeBank {
  std::vector<Eigen::MatrixXd> prototypes;  // K entries, each O x C
  long iteration = 0;                       // scenes processed
  double mu = 0.9;
  std::vector<long> class_update_counts;    // diagnostics, length K

  int num_classes() const { return static_cast<int>(prototypes.size()); }
  int per_class() const {
    return prototypes.empty() ? 0 : static_cast<int>(prototypes[0].rows());
  }
  int dim() const {
    return prototypes.empty() ? 0 : static_cast<int>(prototypes[0].cols());
  }
};

// Per-class result of one clustering pass, for logging.
struct ClassUpdateStats {
  int class_id = 0;
  int feature_count = 0;
  int prototypes_touched = 0;
};

// Draws K*O*C entries from a truncated normal (mean 0, std 0.02, cut at
// +/- 2 std) and unit-normalizes each prototype. Deterministic per seed.
PrototypeBank init_bank(const MiningConfig& cfg);

// Features of proposals matched to sparse labels of class_id: the proposal
// center must lie inside a sparse box of that class and its argmax score
// must equal class_id. May have zero rows; feature_dim fixes the column
// count of an empty result.
Eigen::MatrixXd collect_class_features(const SceneRecord& scene, int class_id,
                                       int feature_dim);

// One clustering pass for one class: Sinkhorn-match features to the class
// prototypes, then pull every prototype that received at least one feature
// toward the mean of its assignees with momentum bank.mu, re-normalizing
// to unit length. Unassigned prototypes are untouched.
PrototypeBank update_class(PrototypeBank bank, int class_id,
                           const Eigen::MatrixXd& features,
                           const MiningConfig& cfg,
                           ClassUpdateStats* stats = nullptr);

// Full Algorithm-1 pass over one scene: per-class collect + update,
// skipping classes with no matched features. Increments bank.iteration by
// exactly 1.
std::pair<PrototypeBank, std::vector<ClassUpdateStats>> process_scene(
    PrototypeBank bank, const SceneRecord& scene, const MiningConfig& cfg);

// True once iteration >= cfg.warmup_iters (inclusive boundary).
bool is_warmed_up(const PrototypeBank& bank, const MiningConfig& cfg);

// PROTOBANK v1 persistence. Header
//   PROTOBANK v1 K=<k> O=<o> C=<c> iter=<n> mu=<m>
// followed by K*O lines of C space-separated shortest round-trip decimals,
// row-major by class then prototype. Lossless to the last digit.
void save_bank(const PrototypeBank& bank, const std::filesystem::path& path);
PrototypeBank load_bank(const std::filesystem::path& path);

std::string bank_to_string(const PrototypeBank& bank);
PrototypeBank bank_from_string(const std::string& text);

}  // namespace protomine

#endif  // PROTOMINE_PROTOTYPE_BANK_HPP_
