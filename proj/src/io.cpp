#include "protomine/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace protomine {

namespace {

using json = nlohmann::ordered_json;

json box_to_json(const Box3D& b) {
  return json::array({b.cx, b.cy, b.cz, b.dx, b.dy, b.dz, b.yaw});
}

Box3D box_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 7)
    throw ValidationError(what + ": box must be an array of 7 numbers");
  Box3D b;
  b.cx = j[0].get<double>();
  b.cy = j[1].get<double>();
  b.cz = j[2].get<double>();
  b.dx = j[3].get<double>();
  b.dy = j[4].get<double>();
  b.dz = j[5].get<double>();
  b.yaw = j[6].get<double>();
  validate_box(b, what);
  return b;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index expected,
                                 const std::string& what) {
  if (!j.is_array())
    throw ValidationError(what + ": expected a numeric array");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected)
    throw ValidationError(what + ": length " + std::to_string(j.size()) +
                          ", expected " + std::to_string(expected));
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json proposal_to_json(const Proposal& p) {
  json j;
  j["center"] = json::array({p.center.x(), p.center.y(), p.center.z()});
  j["feature"] = vector_to_json(p.feature);
  j["scores"] = vector_to_json(p.scores);
  j["box"] = box_to_json(p.box);
  return j;
}

Proposal proposal_from_json(const json& j, int num_classes, int feature_dim,
                            const std::string& what) {
  Proposal p;
  const Eigen::VectorXd c = vector_from_json(j.at("center"), 3, what + " center");
  p.center = Eigen::Vector3d(c[0], c[1], c[2]);
  p.feature = vector_from_json(j.at("feature"), feature_dim, what + " feature");
  p.scores = vector_from_json(j.at("scores"), num_classes, what + " scores");
  if (!p.feature.allFinite())
    throw ValidationError(what + ": feature has non-finite entries");
  for (Eigen::Index i = 0; i < p.scores.size(); ++i) {
    if (!(p.scores[i] >= 0.0 && p.scores[i] <= 1.0))
      throw ValidationError(what + ": score out of [0, 1]");
  }
  p.box = box_from_json(j.at("box"), what + " box");
  return p;
}

json labeled_box_to_json(const LabeledBox& lb) {
  json j;
  j["class_id"] = lb.class_id;
  j["box"] = box_to_json(lb.box);
  return j;
}

LabeledBox labeled_box_from_json(const json& j, int num_classes,
                                 const std::string& what) {
  LabeledBox lb;
  lb.class_id = j.at("class_id").get<int>();
  if (lb.class_id < 0 || (num_classes >= 0 && lb.class_id >= num_classes))
    throw ValidationError(what + ": class_id out of range");
  lb.box = box_from_json(j.at("box"), what);
  return lb;
}

json parse_line(const std::string& line, const std::string& origin, int lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded())
    throw ValidationError(origin + ":" + std::to_string(lineno) +
                          ": invalid JSON record");
  if (!j.is_object())
    throw ValidationError(origin + ":" + std::to_string(lineno) +
                          ": expected a JSON object");
  return j;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open file for writing: " + path.string());
  out << data;
  if (!out) throw ValidationError("failed writing file: " + path.string());
}

}  // namespace

std::string scene_to_string(const SceneRecord& scene) {
  std::ostringstream os;
  json header;
  header["scene_id"] = scene.scene_id;
  header["point_range"] = json::array({scene.point_range[0], scene.point_range[1],
                                       scene.point_range[2], scene.point_range[3],
                                       scene.point_range[4], scene.point_range[5]});
  header["has_gt"] = scene.gt_labels.has_value();
  os << header.dump() << '\n';
  for (const Proposal& p : scene.proposals) {
    json j;
    j["proposal"] = proposal_to_json(p);
    os << j.dump() << '\n';
  }
  for (const LabeledBox& lb : scene.sparse_labels) {
    json j;
    j["sparse_label"] = labeled_box_to_json(lb);
    os << j.dump() << '\n';
  }
  if (scene.gt_labels) {
    for (const LabeledBox& lb : *scene.gt_labels) {
      json j;
      j["gt_label"] = labeled_box_to_json(lb);
      os << j.dump() << '\n';
    }
  }
  return os.str();
}

SceneRecord scene_from_string(const std::string& text, int num_classes,
                              int feature_dim, const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;

  if (!std::getline(is, line))
    throw ValidationError(origin + ": empty scene file");
  ++lineno;
  json header = parse_line(line, origin, lineno);
  if (!header.contains("scene_id"))
    throw ValidationError(origin + ":1: first record must carry scene_id");

  SceneRecord scene;
  scene.scene_id = header.at("scene_id").get<std::string>();
  const json& pr = header.at("point_range");
  if (!pr.is_array() || pr.size() != 6)
    throw ValidationError(origin + ":1: point_range must have 6 numbers");
  for (int i = 0; i < 6; ++i) scene.point_range[static_cast<std::size_t>(i)] = pr[static_cast<std::size_t>(i)].get<double>();
  for (int axis = 0; axis < 3; ++axis) {
    if (!(scene.point_range[static_cast<std::size_t>(axis)] <
          scene.point_range[static_cast<std::size_t>(axis + 3)]))
      throw ValidationError(origin + ":1: point_range min must be below max");
  }
  const bool has_gt = header.value("has_gt", false);
  if (has_gt) scene.gt_labels.emplace();

  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, origin, lineno);
    const std::string where = origin + ":" + std::to_string(lineno);
    if (j.contains("proposal")) {
      const std::string what =
          where + ": proposal " + std::to_string(scene.proposals.size());
      scene.proposals.push_back(
          proposal_from_json(j.at("proposal"), num_classes, feature_dim, what));
    } else if (j.contains("sparse_label")) {
      scene.sparse_labels.push_back(labeled_box_from_json(
          j.at("sparse_label"), num_classes, where + ": sparse_label"));
    } else if (j.contains("gt_label")) {
      if (!scene.gt_labels)
        throw ValidationError(where + ": gt_label record but has_gt is false");
      scene.gt_labels->push_back(labeled_box_from_json(
          j.at("gt_label"), num_classes, where + ": gt_label"));
    } else {
      throw ValidationError(where + ": unknown record type");
    }
  }

  if (scene.gt_labels) {
    for (std::size_t s = 0; s < scene.sparse_labels.size(); ++s) {
      const LabeledBox& sl = scene.sparse_labels[s];
      const bool found = std::any_of(
          scene.gt_labels->begin(), scene.gt_labels->end(),
          [&](const LabeledBox& g) {
            return g.class_id == sl.class_id && box_equal(g.box, sl.box);
          });
      if (!found)
        throw ValidationError(origin + ": sparse_label " + std::to_string(s) +
                              " has no matching gt_label");
    }
  }
  return scene;
}

SceneRecord read_scene(const std::filesystem::path& path, int num_classes,
                       int feature_dim) {
  return scene_from_string(read_file(path), num_classes, feature_dim,
                           path.string());
}

void write_scene(const SceneRecord& scene, const std::filesystem::path& path) {
  write_file(path, scene_to_string(scene));
}

std::string labels_to_string(const SceneLabels& sl) {
  std::ostringstream os;
  json header;
  header["scene_id"] = sl.scene_id;
  os << header.dump() << '\n';
  for (const LabeledBox& lb : sl.labels.sparse) {
    json j;
    j["sparse_label"] = labeled_box_to_json(lb);
    os << j.dump() << '\n';
  }
  for (const PseudoLabel& pl : sl.labels.pseudo) {
    json j;
    json body;
    body["class_id"] = pl.class_id;
    body["box"] = box_to_json(pl.box);
    body["score"] = pl.score;
    j["pseudo_label"] = body;
    os << j.dump() << '\n';
  }
  for (const PrototypeLabel& pl : sl.labels.prototype) {
    json j;
    json body;
    body["proposal_index"] = pl.proposal_index;
    body["class_id"] = pl.class_id;
    j["prototype_label"] = body;
    os << j.dump() << '\n';
  }
  return os.str();
}

SceneLabels labels_from_string(const std::string& text,
                               const std::string& origin) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(is, line))
    throw ValidationError(origin + ": empty labels file");
  ++lineno;
  json header = parse_line(line, origin, lineno);
  SceneLabels out;
  out.scene_id = header.at("scene_id").get<std::string>();

  std::vector<char> seen_proposal_index;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, origin, lineno);
    const std::string where = origin + ":" + std::to_string(lineno);
    if (j.contains("sparse_label")) {
      out.labels.sparse.push_back(
          labeled_box_from_json(j.at("sparse_label"), -1, where));
    } else if (j.contains("pseudo_label")) {
      const json& body = j.at("pseudo_label");
      PseudoLabel pl;
      pl.class_id = body.at("class_id").get<int>();
      pl.box = box_from_json(body.at("box"), where);
      pl.score = body.at("score").get<double>();
      if (!(pl.score >= 0.0 && pl.score <= 1.0))
        throw ValidationError(where + ": pseudo score out of [0, 1]");
      out.labels.pseudo.push_back(pl);
    } else if (j.contains("prototype_label")) {
      const json& body = j.at("prototype_label");
      PrototypeLabel pl;
      pl.proposal_index = body.at("proposal_index").get<int>();
      pl.class_id = body.at("class_id").get<int>();
      if (pl.proposal_index < 0)
        throw ValidationError(where + ": proposal_index must be non-negative");
      if (pl.proposal_index >= static_cast<int>(seen_proposal_index.size()))
        seen_proposal_index.resize(static_cast<std::size_t>(pl.proposal_index) + 1, 0);
      if (seen_proposal_index[static_cast<std::size_t>(pl.proposal_index)])
        throw ValidationError(where + ": duplicate prototype label for proposal " +
                              std::to_string(pl.proposal_index));
      seen_proposal_index[static_cast<std::size_t>(pl.proposal_index)] = 1;
      out.labels.prototype.push_back(pl);
    } else {
      throw ValidationError(where + ": unknown record type");
    }
  }
  return out;
}

SceneLabels read_labels(const std::filesystem::path& path) {
  return labels_from_string(read_file(path), path.string());
}

void write_labels(const SceneLabels& labels, const std::filesystem::path& path) {
  write_file(path, labels_to_string(labels));
}

std::vector<Proposal> read_predictions(const std::filesystem::path& path,
                                       int num_classes, int feature_dim,
                                       std::string* scene_id) {
  const std::string text = read_file(path);
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(is, line))
    throw ValidationError(path.string() + ": empty predictions file");
  ++lineno;
  json header = parse_line(line, path.string(), lineno);
  if (scene_id) *scene_id = header.at("scene_id").get<std::string>();

  std::vector<Proposal> preds;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, path.string(), lineno);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (!j.contains("proposal"))
      throw ValidationError(where + ": predictions must use proposal records");
    preds.push_back(proposal_from_json(
        j.at("proposal"), num_classes, feature_dim,
        where + ": prediction " + std::to_string(preds.size())));
  }
  return preds;
}

void write_predictions(const std::string& scene_id,
                       const std::vector<Proposal>& preds,
                       const std::filesystem::path& path) {
  std::ostringstream os;
  json header;
  header["scene_id"] = scene_id;
  os << header.dump() << '\n';
  for (const Proposal& p : preds) {
    json j;
    j["proposal"] = proposal_to_json(p);
    os << j.dump() << '\n';
  }
  write_file(path, os.str());
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ValidationError(path.string() + ": invalid manifest JSON");
  CorpusManifest m;
  m.format_version = j.at("format_version").get<int>();
  if (m.format_version != 1)
    throw ValidationError(path.string() + ": unsupported format_version");
  m.num_classes = j.at("K").get<int>();
  m.feature_dim = j.at("C").get<int>();
  m.class_names = j.at("class_names").get<std::vector<std::string>>();
  m.scene_files = j.at("scenes").get<std::vector<std::string>>();
  if (static_cast<int>(m.class_names.size()) != m.num_classes)
    throw ValidationError(path.string() + ": class_names length must equal K");
  if (m.num_classes < 1 || m.feature_dim < 1)
    throw ValidationError(path.string() + ": K and C must be positive");
  m.base_dir = path.parent_path();
  for (const std::string& rel : m.scene_files) {
    if (!std::filesystem::exists(m.base_dir / rel))
      throw ValidationError(path.string() + ": missing scene file " + rel);
  }
  return m;
}

void write_manifest(const CorpusManifest& manifest,
                    const std::filesystem::path& path) {
  json j;
  j["format_version"] = manifest.format_version;
  j["K"] = manifest.num_classes;
  j["C"] = manifest.feature_dim;
  j["class_names"] = manifest.class_names;
  j["scenes"] = manifest.scene_files;
  write_file(path, j.dump(2) + "\n");
}

std::vector<SceneRecord> load_corpus(const CorpusManifest& manifest) {
  std::vector<SceneRecord> scenes;
  scenes.reserve(manifest.scene_files.size());
  for (const std::string& rel : manifest.scene_files) {
    scenes.push_back(read_scene(manifest.base_dir / rel, manifest.num_classes,
                                manifest.feature_dim));
  }
  return scenes;
}

SparsifyResult sparsify(std::vector<SceneRecord> scenes, SparsifyMode mode,
                        int n, std::uint64_t seed) {
  if (mode == SparsifyMode::NPerScene && n < 1)
    throw ValidationError("n_per_scene requires n >= 1");
  std::mt19937_64 rng(seed);
  SparsifyResult out;

  for (SceneRecord& scene : scenes) {
    if (!scene.gt_labels.has_value())
      throw ValidationError("scene " + scene.scene_id +
                            " has no gt_labels; cannot sparsify");
    const std::vector<LabeledBox>& gt = *scene.gt_labels;
    scene.sparse_labels.clear();
    if (gt.empty()) {
      out.warnings.push_back("scene " + scene.scene_id +
                             " has no gt objects; sparse labels left empty");
      continue;
    }

    switch (mode) {
      case SparsifyMode::OnePerScene: {
        std::uniform_int_distribution<std::size_t> pick(0, gt.size() - 1);
        scene.sparse_labels.push_back(gt[pick(rng)]);
        break;
      }
      case SparsifyMode::NPerScene: {
        // Partial Fisher-Yates over indices, then restore gt order.
        std::vector<std::size_t> idx(gt.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n), gt.size());
        for (std::size_t i = 0; i < take; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
          std::swap(idx[i], idx[pick(rng)]);
        }
        std::vector<std::size_t> chosen(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take));
        std::sort(chosen.begin(), chosen.end());
        for (std::size_t i : chosen) scene.sparse_labels.push_back(gt[i]);
        break;
      }
      case SparsifyMode::OnePerClassPerScene: {
        // Classes visited in ascending id for determinism.
        std::vector<std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < gt.size(); ++i) {
          const std::size_t k = static_cast<std::size_t>(gt[i].class_id);
          if (k >= by_class.size()) by_class.resize(k + 1);
          by_class[k].push_back(i);
        }
        for (const std::vector<std::size_t>& members : by_class) {
          if (members.empty()) continue;
          std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
          scene.sparse_labels.push_back(gt[members[pick(rng)]]);
        }
        break;
      }
    }
  }
  out.scenes = std::move(scenes);
  return out;
}

}  // namespace protomine
