#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "fsq/core/errors.hpp"

namespace fsq::analysis {

struct LevenbergMarquardtOptions {
  int max_iterations = 200;
  double step_tolerance = 1e-10;  // relative parameter step
  double initial_damping = 1e-3;
};

struct LevenbergMarquardtResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;  // s^2 (J^T J)^-1 with s^2 = SSR / (n - p)
  double ssr = 0.0;
  int iterations = 0;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) minimization of |r(p)|^2.
/// `model(p, r, J)` fills the residual vector r and its Jacobian J = dr/dp.
template <class Model>
LevenbergMarquardtResult levenberg_marquardt(Model&& model, Eigen::VectorXd p,
                                             const LevenbergMarquardtOptions& opt = {}) {
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  model(p, r, J);
  const Eigen::Index n = r.size(), m = p.size();
  if (n < m) throw FitFailed("fewer residuals than parameters");
  double ssr = r.squaredNorm();
  double lambda = opt.initial_damping;
  bool converged = false;
  int iter = 0;
  Eigen::VectorXd r_new;
  Eigen::MatrixXd J_new;
  for (; iter < opt.max_iterations && !converged; ++iter) {
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-300);
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10;
        continue;
      }
      const Eigen::VectorXd trial = p + step;
      model(trial, r_new, J_new);
      const double ssr_new = r_new.allFinite() ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
      if (ssr_new <= ssr) {
        const double rel = step.norm() / (p.norm() + opt.step_tolerance);
        p = trial;
        r.swap(r_new);
        J.swap(J_new);
        const double improvement = ssr - ssr_new;
        ssr = ssr_new;
        lambda = std::max(lambda / 10, 1e-12);
        accepted = true;
        if (rel < opt.step_tolerance || improvement <= 1e-15 * ssr) converged = true;
      } else {
        lambda *= 10;
      }
    }
    // No downhill step exists at any damping: p is a local minimum to
    // working precision.
    if (!accepted) converged = true;
  }
  if (!converged) throw FitFailed("Levenberg-Marquardt did not converge in " + std::to_string(opt.max_iterations) + " iterations");
  LevenbergMarquardtResult out;
  out.params = p;
  out.ssr = ssr;
  out.iterations = iter;
  const double dof = static_cast<double>(std::max<Eigen::Index>(n - m, 1));
  const Eigen::MatrixXd JtJ = J.transpose() * J;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(JtJ);
  out.covariance = lu.isInvertible() ? Eigen::MatrixXd(lu.inverse() * (ssr / dof))
                                     : Eigen::MatrixXd::Constant(m, m, std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace fsq::analysis
