#include "protomine/sinkhorn.hpp"

#include <cmath>
#include <limits>

namespace protomine {

namespace {

void check_simplex(const Eigen::VectorXd& m, const char* name) {
  if (m.size() == 0) throw ValidationError(std::string(name) + " is empty");
  if (!m.allFinite() || m.minCoeff() < 0.0)
    throw ValidationError(std::string(name) + " must be non-negative");
  if (std::abs(m.sum() - 1.0) > 1e-9)
    throw ValidationError(std::string(name) + " must sum to 1");
}

// log(sum(exp(v))) with max shift; -inf entries (zero mass) pass through.
double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v[i] - m);
  return m + std::log(acc);
}

}  // namespace

Eigen::VectorXd uniform_marginal(int n) {
  if (n < 1) throw ValidationError("marginal length must be positive");
  return Eigen::VectorXd::Constant(n, 1.0 / n);
}

TransportPlan sinkhorn_match(const Eigen::MatrixXd& similarity, double kappa,
                             int steps, const Eigen::VectorXd& row_marginals,
                             const Eigen::VectorXd& col_marginals) {
  const Eigen::Index m = similarity.rows();
  const Eigen::Index o = similarity.cols();
  if (m == 0 || o == 0)
    throw ValidationError("similarity matrix must be non-empty");
  if (!similarity.allFinite())
    throw ValidationError("similarity matrix must be finite");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw ValidationError("temperature must be positive");
  if (steps < 1) throw ValidationError("step count must be positive");
  if (row_marginals.size() != m)
    throw ValidationError("row marginal length mismatch");
  if (col_marginals.size() != o)
    throw ValidationError("column marginal length mismatch");
  check_simplex(row_marginals, "row marginals");
  check_simplex(col_marginals, "column marginals");

  const double neg_inf = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd log_r(m), log_c(o);
  for (Eigen::Index i = 0; i < m; ++i)
    log_r[i] = row_marginals[i] > 0 ? std::log(row_marginals[i]) : neg_inf;
  for (Eigen::Index j = 0; j < o; ++j)
    log_c[j] = col_marginals[j] > 0 ? std::log(col_marginals[j]) : neg_inf;

  const Eigen::MatrixXd log_kernel = similarity / kappa;
  Eigen::VectorXd log_u = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd log_v = Eigen::VectorXd::Zero(o);

  for (int it = 0; it < steps; ++it) {
    for (Eigen::Index i = 0; i < m; ++i) {
      log_u[i] = log_r[i] - log_sum_exp(log_kernel.row(i).transpose() + log_v);
    }
    for (Eigen::Index j = 0; j < o; ++j) {
      log_v[j] = log_c[j] - log_sum_exp(log_kernel.col(j) + log_u);
    }
  }

  TransportPlan plan;
  plan.matrix.resize(m, o);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < o; ++j) {
      const double lv = log_u[i] + log_kernel(i, j) + log_v[j];
      plan.matrix(i, j) = std::isfinite(lv) ? std::exp(lv) : 0.0;
    }
  }
  plan.row_marginals = row_marginals;
  plan.col_marginals = col_marginals;
  plan.iterations_run = steps;

  double resid = 0.0;
  const Eigen::VectorXd row_sums = plan.matrix.rowwise().sum();
  const Eigen::VectorXd col_sums = plan.matrix.colwise().sum().transpose();
  for (Eigen::Index i = 0; i < m; ++i)
    resid = std::max(resid, std::abs(row_sums[i] - row_marginals[i]));
  for (Eigen::Index j = 0; j < o; ++j)
    resid = std::max(resid, std::abs(col_sums[j] - col_marginals[j]));
  plan.converged_residual = resid;
  return plan;
}

std::vector<int> assign_rows(const TransportPlan& plan) {
  const Eigen::Index m = plan.matrix.rows();
  const Eigen::Index o = plan.matrix.cols();
  if (m == 0 || o == 0) throw ValidationError("transport plan is empty");
  if (!plan.matrix.allFinite())
    throw ValidationError("transport plan must be finite");
  std::vector<int> out(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    int best = 0;
    double best_v = plan.matrix(i, 0);
    for (Eigen::Index j = 1; j < o; ++j) {
      if (plan.matrix(i, j) > best_v) {
        best_v = plan.matrix(i, j);
        best = static_cast<int>(j);
      }
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

}  // namespace protomine
