#include "protomine/losses.hpp"

#include <cmath>

namespace protomine {

namespace {

constexpr double kProbClamp = 1e-7;

void check_unit(const Eigen::VectorXd& v, const char* what) {
  // Loose tolerance: guards gross misuse without rejecting finite-difference
  // probes of the gradient.
  if (std::abs(v.norm() - 1.0) > 1e-3)
    throw ValidationError(std::string(what) + " must be unit-norm");
}

}  // namespace

LossValue info_nce(const Eigen::VectorXd& anchor,
                   const Eigen::VectorXd& positive,
                   const std::vector<Eigen::VectorXd>& negatives,
                   double temperature) {
  if (!(temperature > 0) || !std::isfinite(temperature))
    throw ValidationError("temperature must be positive");
  if (negatives.empty())
    throw ValidationError("info_nce requires at least one negative");
  check_unit(anchor, "anchor");
  check_unit(positive, "positive");
  for (const auto& n : negatives) {
    check_unit(n, "negative");
    if (n.size() != anchor.size())
      throw ValidationError("negative dimension mismatch");
  }
  if (positive.size() != anchor.size())
    throw ValidationError("positive dimension mismatch");

  const std::size_t total = negatives.size() + 1;
  Eigen::VectorXd logits(static_cast<Eigen::Index>(total));
  logits[0] = anchor.dot(positive) / temperature;
  for (std::size_t i = 0; i < negatives.size(); ++i)
    logits[static_cast<Eigen::Index>(i + 1)] =
        anchor.dot(negatives[i]) / temperature;

  const double hi = logits.maxCoeff();
  double denom = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i)
    denom += std::exp(logits[i] - hi);
  const double lse = hi + std::log(denom);

  LossValue out;
  out.value = lse - logits[0];

  // d/da [lse - logit_0] = (1/tau) * (sum_j q_j v_j - positive), with q the
  // softmax over all candidates.
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(anchor.size());
  for (Eigen::Index j = 0; j < logits.size(); ++j) {
    const double q = std::exp(logits[j] - lse);
    const Eigen::VectorXd& v =
        j == 0 ? positive : negatives[static_cast<std::size_t>(j - 1)];
    grad += q * v;
  }
  grad = (grad - positive) / temperature;
  out.gradients = grad.transpose();
  return out;
}

LossValue focal_loss(double pred_prob, int target, double alpha, double gamma) {
  if (target != 0 && target != 1)
    throw ValidationError("focal target must be 0 or 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ValidationError("focal alpha out of range");
  if (!(gamma >= 0.0)) throw ValidationError("focal gamma must be >= 0");

  const double p = std::clamp(pred_prob, kProbClamp, 1.0 - kProbClamp);
  const double pt = target == 1 ? p : 1.0 - p;
  const double one_minus = 1.0 - pt;

  LossValue out;
  out.value = -alpha * std::pow(one_minus, gamma) * std::log(pt);

  double d_pt;
  if (gamma == 0.0) {
    d_pt = -alpha / pt;
  } else {
    d_pt = alpha * gamma * std::pow(one_minus, gamma - 1.0) * std::log(pt) -
           alpha * std::pow(one_minus, gamma) / pt;
  }
  const double d_p = target == 1 ? d_pt : -d_pt;
  // The clamp zeroes sensitivity outside its band.
  const bool clamped = pred_prob < kProbClamp || pred_prob > 1.0 - kProbClamp;
  out.gradients = Eigen::MatrixXd::Constant(1, 1, clamped ? 0.0 : d_p);
  return out;
}

LossValue prototype_contrastive_batch(const Eigen::MatrixXd& features,
                                      const std::vector<PrototypeLabel>& kept,
                                      const PrototypeBank& bank,
                                      double temperature) {
  LossValue out;
  out.value = 0.0;
  out.gradients = Eigen::MatrixXd::Zero(features.rows(), features.cols());
  if (kept.empty()) return out;

  if (features.rows() != static_cast<Eigen::Index>(kept.size()))
    throw ValidationError("feature rows must align with kept labels");
  if (features.cols() != bank.dim())
    throw ValidationError("feature dimension does not match bank");

  const int k_count = bank.num_classes();
  const int o_count = bank.per_class();
  for (std::size_t e = 0; e < kept.size(); ++e) {
    const int k = kept[e].class_id;
    if (k < 0 || k >= k_count)
      throw ValidationError("kept label class out of range");
    const Eigen::VectorXd anchor =
        features.row(static_cast<Eigen::Index>(e)).transpose();

    // Positive: best-affinity prototype within the assigned class.
    const Eigen::MatrixXd& protos = bank.prototypes[static_cast<std::size_t>(k)];
    int best_o = 0;
    double best_sim = anchor.dot(protos.row(0).transpose());
    for (int o = 1; o < o_count; ++o) {
      const double s = anchor.dot(protos.row(o).transpose());
      if (s > best_sim) {
        best_sim = s;
        best_o = o;
      }
    }

    std::vector<Eigen::VectorXd> negatives;
    negatives.reserve(static_cast<std::size_t>(k_count) * o_count - 1);
    for (int kk = 0; kk < k_count; ++kk) {
      for (int o = 0; o < o_count; ++o) {
        if (kk == k && o == best_o) continue;
        negatives.push_back(
            bank.prototypes[static_cast<std::size_t>(kk)].row(o).transpose());
      }
    }

    const LossValue single =
        info_nce(anchor, protos.row(best_o).transpose(), negatives, temperature);
    out.value += single.value;
    out.gradients.row(static_cast<Eigen::Index>(e)) = single.gradients.row(0);
  }

  const double inv = 1.0 / static_cast<double>(kept.size());
  out.value *= inv;
  out.gradients *= inv;
  return out;
}

}  // namespace protomine
