#include "protomine/prototype_bank.hpp"

#include "protomine/geometry.hpp"
#include "protomine/sinkhorn.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace protomine {

namespace {

// Shortest decimal that parses back to the exact same double.
std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view token, const char* what) {
  double v = 0.0;
  auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw ValidationError(std::string("bank file: bad ") + what + " value '" +
                          std::string(token) + "'");
  return v;
}

int argmax_index(const Eigen::VectorXd& v) {
  int best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    if (v[j] > v[best]) best = static_cast<int>(j);
  }
  return best;
}

}  // namespace

PrototypeBank init_bank(const MiningConfig& cfg) {
  validate_config(cfg);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 0.02);
  auto truncated = [&]() {
    // Redraw outside +/- 2 std.
    for (;;) {
      const double x = normal(rng);
      if (std::abs(x) <= 0.04) return x;
    }
  };

  PrototypeBank bank;
  bank.mu = cfg.mu;
  bank.iteration = 0;
  bank.class_update_counts.assign(static_cast<std::size_t>(cfg.K), 0);
  bank.prototypes.reserve(static_cast<std::size_t>(cfg.K));
  for (int k = 0; k < cfg.K; ++k) {
    Eigen::MatrixXd p(cfg.O, cfg.C);
    for (int o = 0; o < cfg.O; ++o) {
      for (int c = 0; c < cfg.C; ++c) p(o, c) = truncated();
      const double norm = p.row(o).norm();
      if (norm > 0) p.row(o) /= norm;
    }
    bank.prototypes.push_back(std::move(p));
  }
  return bank;
}

Eigen::MatrixXd collect_class_features(const SceneRecord& scene, int class_id,
                                       int feature_dim) {
  std::vector<int> rows;
  for (std::size_t i = 0; i < scene.proposals.size(); ++i) {
    const Proposal& p = scene.proposals[i];
    if (p.scores.size() == 0) continue;
    if (argmax_index(p.scores) != class_id) continue;
    bool inside = false;
    for (const LabeledBox& lb : scene.sparse_labels) {
      if (lb.class_id == class_id && contains_point(lb.box, p.center)) {
        inside = true;
        break;
      }
    }
    if (inside) rows.push_back(static_cast<int>(i));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), feature_dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::VectorXd& f = scene.proposals[static_cast<std::size_t>(rows[r])].feature;
    if (f.size() != feature_dim)
      throw ValidationError("proposal " + std::to_string(rows[r]) +
                            ": feature length " + std::to_string(f.size()) +
                            " does not match bank dimension " +
                            std::to_string(feature_dim));
    out.row(static_cast<Eigen::Index>(r)) = f.transpose();
  }
  return out;
}

PrototypeBank update_class(PrototypeBank bank, int class_id,
                           const Eigen::MatrixXd& features,
                           const MiningConfig& cfg, ClassUpdateStats* stats) {
  if (class_id < 0 || class_id >= bank.num_classes())
    throw ValidationError("class id out of range");
  if (features.rows() < 1)
    throw ValidationError("update_class requires at least one feature");
  if (features.cols() != bank.dim())
    throw ValidationError("feature dimension " + std::to_string(features.cols()) +
                          " does not match bank dimension " +
                          std::to_string(bank.dim()));

  Eigen::MatrixXd& protos = bank.prototypes[static_cast<std::size_t>(class_id)];
  const Eigen::MatrixXd similarity = features * protos.transpose();  // M x O
  const TransportPlan plan =
      sinkhorn_match(similarity, cfg.kappa, cfg.sinkhorn_steps,
                     uniform_marginal(static_cast<int>(features.rows())),
                     uniform_marginal(static_cast<int>(protos.rows())));
  const std::vector<int> assignment = assign_rows(plan);

  const int o_count = static_cast<int>(protos.rows());
  std::vector<int> counts(static_cast<std::size_t>(o_count), 0);
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(o_count, bank.dim());
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const int o = assignment[static_cast<std::size_t>(i)];
    counts[static_cast<std::size_t>(o)]++;
    sums.row(o) += features.row(i);
  }

  const double mu = bank.mu;
  int touched = 0;
  for (int o = 0; o < o_count; ++o) {
    if (counts[static_cast<std::size_t>(o)] == 0) continue;
    ++touched;
    const Eigen::VectorXd mean =
        sums.row(o).transpose() / counts[static_cast<std::size_t>(o)];
    Eigen::VectorXd updated = mu * protos.row(o).transpose() + (1.0 - mu) * mean;
    const double norm = updated.norm();
    if (norm < 1e-12) continue;  // degenerate cancellation, keep old prototype
    protos.row(o) = (updated / norm).transpose();
  }
  if (stats) {
    stats->class_id = class_id;
    stats->feature_count = static_cast<int>(features.rows());
    stats->prototypes_touched = touched;
  }
  return bank;
}

std::pair<PrototypeBank, std::vector<ClassUpdateStats>> process_scene(
    PrototypeBank bank, const SceneRecord& scene, const MiningConfig& cfg) {
  std::vector<ClassUpdateStats> stats;
  for (int k = 0; k < bank.num_classes(); ++k) {
    Eigen::MatrixXd features;
    try {
      features = collect_class_features(scene, k, bank.dim());
    } catch (const ValidationError& e) {
      throw ValidationError("class " + std::to_string(k) + ": " + e.what());
    }
    if (features.rows() == 0) continue;
    ClassUpdateStats s;
    try {
      bank = update_class(std::move(bank), k, features, cfg, &s);
    } catch (const ValidationError& e) {
      throw ValidationError("class " + std::to_string(k) + ": " + e.what());
    }
    bank.class_update_counts[static_cast<std::size_t>(k)]++;
    stats.push_back(s);
  }
  bank.iteration++;
  return {std::move(bank), std::move(stats)};
}

bool is_warmed_up(const PrototypeBank& bank, const MiningConfig& cfg) {
  return bank.iteration >= cfg.warmup_iters;
}

std::string bank_to_string(const PrototypeBank& bank) {
  std::ostringstream os;
  os << "PROTOBANK v1 K=" << bank.num_classes() << " O=" << bank.per_class()
     << " C=" << bank.dim() << " iter=" << bank.iteration
     << " mu=" << format_double(bank.mu) << "\n";
  for (const Eigen::MatrixXd& protos : bank.prototypes) {
    for (Eigen::Index o = 0; o < protos.rows(); ++o) {
      for (Eigen::Index c = 0; c < protos.cols(); ++c) {
        if (c) os << ' ';
        os << format_double(protos(o, c));
      }
      os << '\n';
    }
  }
  return os.str();
}

PrototypeBank bank_from_string(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header))
    throw ValidationError("bank file: missing header");

  auto field = [&](const std::string& key) -> std::string {
    const std::string tag = key + "=";
    const auto pos = header.find(tag);
    if (pos == std::string::npos)
      throw ValidationError("bank file: header missing " + key);
    auto end = header.find(' ', pos);
    if (end == std::string::npos) end = header.size();
    return header.substr(pos + tag.size(), end - pos - tag.size());
  };
  if (header.rfind("PROTOBANK v1 ", 0) != 0)
    throw ValidationError("bank file: bad magic, expected PROTOBANK v1");

  PrototypeBank bank;
  const long k = std::stol(field("K"));
  const long o = std::stol(field("O"));
  const long c = std::stol(field("C"));
  bank.iteration = std::stol(field("iter"));
  bank.mu = parse_double(field("mu"), "mu");
  if (k < 1 || o < 1 || c < 1)
    throw ValidationError("bank file: non-positive dimensions in header");

  bank.class_update_counts.assign(static_cast<std::size_t>(k), 0);
  bank.prototypes.assign(static_cast<std::size_t>(k), Eigen::MatrixXd(o, c));
  std::string line;
  for (long ki = 0; ki < k; ++ki) {
    for (long oi = 0; oi < o; ++oi) {
      if (!std::getline(is, line))
        throw ValidationError("bank file: truncated at class " +
                              std::to_string(ki) + " prototype " +
                              std::to_string(oi));
      std::istringstream ls(line);
      std::string token;
      for (long ci = 0; ci < c; ++ci) {
        if (!(ls >> token))
          throw ValidationError("bank file: short row at class " +
                                std::to_string(ki) + " prototype " +
                                std::to_string(oi));
        bank.prototypes[static_cast<std::size_t>(ki)](oi, ci) =
            parse_double(token, "prototype");
      }
      if (ls >> token)
        throw ValidationError("bank file: trailing tokens at class " +
                              std::to_string(ki) + " prototype " +
                              std::to_string(oi));
    }
  }
  return bank;
}

void save_bank(const PrototypeBank& bank, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open bank file for writing: " + path.string());
  out << bank_to_string(bank);
  if (!out) throw ValidationError("failed writing bank file: " + path.string());
}

PrototypeBank load_bank(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open bank file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return bank_from_string(buf.str());
}

}  // namespace protomine
