#include "nkpa/least_squares.hpp"

#include <algorithm>
#include <cmath>

namespace nkpa {

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd p, const LeastSquaresOptions& opt,
                                       const Projection& project) {
    LeastSquaresResult out;
    if (project) project(p);
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    f(p, r, J);
    double cost = r.squaredNorm();
    double lambda = opt.initial_damping;

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (cost <= opt.cost_tolerance) {
            out.converged = true;
            out.message = "residual at round-off";
            break;
        }
        const Eigen::MatrixXd jtj = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        if (!g.allFinite()) {
            out.message = "non-finite gradient";
            break;
        }
        // Gradient relative to the curvature scale: converged when the
        // Gauss-Newton step would not move any parameter meaningfully.
        if ((g.cwiseAbs().array() <= opt.gradient_tolerance * (jtj.diagonal().cwiseSqrt().array() * r.norm() + 1e-300))
                .all()) {
            out.converged = true;
            out.message = "gradient below tolerance";
            break;
        }
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-300);

        bool accepted = false;
        bool small_step = false;
        for (int inner = 0; inner < 60; ++inner) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            const Eigen::VectorXd h = a.ldlt().solve(-g);
            Eigen::VectorXd trial = p + h;
            if (project) project(trial);
            const double step = (trial - p).norm();
            small_step = step <= opt.step_tolerance * (p.norm() + opt.step_tolerance);
            Eigen::VectorXd r_new;
            Eigen::MatrixXd j_new;
            f(trial, r_new, j_new);
            const double cost_new = r_new.allFinite() ? r_new.squaredNorm() : INFINITY;
            if (cost_new < cost) {
                const double decrease = cost - cost_new;
                p = trial;
                r = std::move(r_new);
                J = std::move(j_new);
                cost = cost_new;
                lambda = std::max(lambda / 3.0, 1e-15);
                accepted = true;
                small_step = small_step || decrease <= 1e-15 * cost;
                break;
            }
            if (small_step) break;
            lambda *= 4.0;
        }
        if (small_step) {
            out.converged = true;
            out.message = "parameter step below tolerance";
            ++it;
            break;
        }
        if (!accepted) {
            // No descent direction left at this damping: at the optimum to machine precision.
            out.converged = true;
            out.message = "no further decrease";
            ++it;
            break;
        }
    }
    if (it >= opt.max_iterations && !out.converged) {
        out.message = "iteration limit reached";
    }
    out.parameters = p;
    out.residual = r;
    out.jacobian = J;
    out.cost = cost;
    out.iterations = it;
    return out;
}

Eigen::MatrixXd parameter_covariance(const LeastSquaresResult& result, bool scale_by_reduced_chi2) {
    const Eigen::MatrixXd jtj = result.jacobian.transpose() * result.jacobian;
    Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse();
    if (scale_by_reduced_chi2) {
        const auto dof = result.residual.size() - result.parameters.size();
        if (dof > 0) cov *= result.cost / static_cast<double>(dof);
    }
    return cov;
}

}  // namespace nkpa
