#ifndef PROTOMINE_SINKHORN_HPP_
#define PROTOMINE_SINKHORN_HPP_

#include "protomine/types.hpp"

namespace protomine {

// Result of the entropic matching solve: matrix = diag(u) exp(sim/kappa)
// diag(v) after the requested number of alternating normalization passes.
struct TransportPlan {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd row_marginals;
  Eigen::VectorXd col_marginals;
  int iterations_run = 0;
  double converged_residual = 0.0;  // max marginal violation on exit
};

// Sinkhorn-Knopp on a similarity kernel (maximizes similarity; no cost
// negation). One step = one row pass plus one column pass, starting from
// v = 1. Internally runs in the log domain so small temperatures
// (kappa = 0.05 and below) cannot overflow.
TransportPlan sinkhorn_match(const Eigen::MatrixXd& similarity, double kappa,
                             int steps, const Eigen::VectorXd& row_marginals,
                             const Eigen::VectorXd& col_marginals);

// Argmax column per row, ties broken toward the lowest column index.
std::vector<int> assign_rows(const TransportPlan& plan);

// Length-n simplex vector with equal mass.
Eigen::VectorXd uniform_marginal(int n);

}  // namespace protomine

#endif  // PROTOMINE_SINKHORN_HPP_
