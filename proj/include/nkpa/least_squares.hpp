#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace nkpa {

/// Fills the (already weighted) residual vector and its Jacobian at `p`.
using ResidualFunction = std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& residual, Eigen::MatrixXd& jacobian)>;

/// Maps a trial point back into the feasible set (e.g. non-negative rates).
using Projection = std::function<void(Eigen::VectorXd& p)>;

struct LeastSquaresOptions {
    int max_iterations = 500;
    double initial_damping = 1e-3;
    double step_tolerance = 1e-15;      ///< relative parameter change
    double cost_tolerance = 1e-30;      ///< absolute cost below which the fit is exact
    double gradient_tolerance = 1e-14;  ///< relative to cost scale
};

struct LeastSquaresResult {
    Eigen::VectorXd parameters;
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;
    double cost = 0.0;  ///< sum of squared residuals
    int iterations = 0;
    bool converged = false;
    std::string message;
};

/// Damped Gauss-Newton with Marquardt diagonal scaling. Deterministic.
[[nodiscard]] LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, Eigen::VectorXd start,
                                                     const LeastSquaresOptions& options = {},
                                                     const Projection& project = {});

/// (J^T J)^-1 at the optimum, optionally scaled by the reduced chi-square
/// (use when the residuals were not normalised by known uncertainties).
[[nodiscard]] Eigen::MatrixXd parameter_covariance(const LeastSquaresResult& result, bool scale_by_reduced_chi2);

}  // namespace nkpa
