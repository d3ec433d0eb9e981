#ifndef PROTOMINE_LOSSES_HPP_
#define PROTOMINE_LOSSES_HPP_

#include "protomine/prototype_bank.hpp"
#include "protomine/types.hpp"

namespace protomine {

// Loss value plus analytic gradient. The gradient shape mirrors the
// differentiated input: 1 x C for info_nce (w.r.t. the anchor), 1 x 1 for
// focal_loss (w.r.t. the probability), E x C for the batch op (w.r.t. each
// feature row).
struct LossValue {
  double value = 0.0;
  Eigen::MatrixXd gradients;
};

// -log( exp(<a,p>/tau) / (exp(<a,p>/tau) + sum_n exp(<a,n>/tau)) ),
// computed via log-sum-exp. Gradient is the unconstrained partial
// derivative w.r.t. the anchor coordinates.
LossValue info_nce(const Eigen::VectorXd& anchor,
                   const Eigen::VectorXd& positive,
                   const std::vector<Eigen::VectorXd>& negatives,
                   double temperature);

// -alpha * (1 - p_t)^gamma * log(p_t) with p_t = p for target 1 and 1 - p
// otherwise. The probability is clamped to [1e-7, 1 - 1e-7] first.
LossValue focal_loss(double pred_prob, int target, double alpha, double gamma);

// Mean info_nce over the kept proposals: anchor = features row e, positive
// = the best-affinity prototype within kept[e].class_id, negatives = every
// other prototype in the bank. Rows of `features` align with `kept`. An
// empty kept set is the neutral element: value 0, zero gradients.
LossValue prototype_contrastive_batch(const Eigen::MatrixXd& features,
                                      const std::vector<PrototypeLabel>& kept,
                                      const PrototypeBank& bank,
                                      double temperature);

}  // namespace protomine

#endif  // PROTOMINE_LOSSES_HPP_
