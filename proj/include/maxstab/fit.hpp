#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "maxstab/model.hpp"
#include "maxstab/panel.hpp"

namespace maxstab {

// Cyclic coordinate-profiling maximization of the pairwise log-likelihood:
// each sweep maximizes one parameter at a time with a grid + golden-section
// search, stopping when a full sweep improves l_p by less than sweep_tol
// (relative) or max_sweeps is hit. The non-differentiable band width is
// handled by an outer grid over spec.transform.bandwidth_grid, refitting the
// smooth parameters per candidate. H, J, sandwich covariance and CLIC are
// filled in at the maximizer when it is interior to the bounds.
FitResult profile_fit(const MaximaPanel& panel, const ModelSpec& spec,
                      std::optional<Eigen::VectorXd> init = std::nullopt);

// H = -sum d2 log f (observed information) via central second differences of
// l_p; J from central-difference scores accumulated per spec.j_mode. Both
// symmetrized. Requires beta at least one derivative step inside the bounds.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> score_and_information(const MaximaPanel& panel,
                                                                  const ModelSpec& spec,
                                                                  const Eigen::VectorXd& beta,
                                                                  double band_width);

struct ClicResult {
    double clic = 0.0;
    double penalty = 0.0;  // 2 tr(H^-1 J)
    bool defined = false;
    std::string note;  // diagnosis of the null direction when H is singular
};

ClicResult composite_clic(const Eigen::MatrixXd& H, const Eigen::MatrixXd& J, double pll);

// Sandwich covariance H^-1 J H^-1, symmetrized.
Eigen::MatrixXd sandwich_covariance(const Eigen::MatrixXd& H, const Eigen::MatrixXd& J);

// Fits every spec and returns results sorted by CLIC ascending (undefined
// CLIC last, ties by spec name). Individual failures are recorded in the
// row's note and never abort the sweep.
std::vector<FitResult> model_sweep(const MaximaPanel& panel, const std::vector<ModelSpec>& specs);

}  // namespace maxstab
