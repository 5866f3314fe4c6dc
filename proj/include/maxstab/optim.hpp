#pragma once

#include <functional>

#include <Eigen/Dense>

namespace maxstab {

struct Max1dResult {
    double x = 0.0;
    double value = 0.0;
    int evals = 0;
};

// One-dimensional maximization on [lo, hi]: a coarse grid scan to escape
// local modes, then golden-section refinement around the best grid cell.
// The result never falls below the incumbent; exact ties keep the incumbent.
// Non-finite objective values are treated as -inf; if the objective is
// non-finite everywhere on the grid and at the incumbent, throws NumericError.
Max1dResult maximize_1d(const std::function<double(double)>& objective, double lo, double hi,
                        double incumbent_x, double incumbent_value, int grid_points = 32,
                        double xtol = 1e-6);

// Golden-section maximization of a unimodal function on [lo, hi].
Max1dResult golden_section_max(const std::function<double(double)>& objective, double lo,
                               double hi, double xtol);

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Standard Nelder-Mead simplex maximization with the usual reflection,
// expansion, contraction and shrink coefficients. -inf objective values mark
// infeasible points.
NelderMeadResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& objective,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                                 int max_iter = 2000, double ftol = 1e-10);

}  // namespace maxstab
