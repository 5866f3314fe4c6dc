#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "maxstab/climate.hpp"
#include "maxstab/correlation.hpp"
#include "maxstab/maxstable.hpp"

namespace maxstab {

struct ParamDef {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    double init = 0.0;
};

// Shape of the climate transform: which optional coordinates enter, whether
// the planar rotation/scaling is fitted at all (false = Euclidean space),
// whether coefficients differ between the two regions, and the candidate
// border band widths. The band width is optimized over this grid because the
// pairwise likelihood is not differentiable in it.
struct TransformTemplate {
    bool fit_rotation = true;
    bool use_elevation = false;
    bool use_region = false;
    bool use_mean_level = false;
    bool per_region = false;
    std::vector<double> bandwidth_grid{0.0};
};

// How the squared-score matrix J is accumulated: scores summed per year
// before the outer product (years as the independent replicates), or one
// outer product per (pair, year) term.
enum class JAccumulation { ByYear, ByPairYear };

struct ModelSpec {
    std::string name;
    ModelFamily family = ModelFamily::Schlather;
    CorrelationSpec corr;        // Schlather only
    bool corr_shape_free = false;  // fit the 2nd correlation parameter
    TransformTemplate transform;
    std::vector<ParamDef> params;  // canonical order; filled by finalize()
    JAccumulation j_mode = JAccumulation::ByYear;
    int grid_points = 32;
    int max_sweeps = 100;
    double sweep_tol = 1e-6;  // relative pairwise-loglik improvement per sweep

    // Builds the free-parameter layout in canonical order, keeping any
    // user-supplied bounds/inits for matching names. Throws ConfigError on
    // inconsistent settings.
    void finalize();

    std::size_t n_params() const { return params.size(); }
    int param_index(const std::string& name) const;  // -1 if absent

    Eigen::VectorXd init_vector() const;
    void check_bounds(const Eigen::VectorXd& beta) const;
};

// Expand a parameter vector into the pieces the likelihood needs.
ClimateTransform transform_from_beta(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                     double band_width);
CorrelationSpec corr_from_beta(const ModelSpec& spec, const Eigen::VectorXd& beta);
// Smith: dep = climate distance / range, i.e. a spherical covariance
// range^2 * I in climate space.
double smith_range_from_beta(const ModelSpec& spec, const Eigen::VectorXd& beta);

struct TraceEntry {
    int sweep = 0;            // 0 = initial point
    double band_width = 0.0;
    std::vector<double> beta;
    double pll = 0.0;
};

struct FitResult {
    std::string spec_name;
    std::vector<std::string> param_names;
    Eigen::VectorXd beta_hat;
    double band_width = 0.0;  // grid-selected; no standard error
    double pll = 0.0;
    Eigen::MatrixXd H;             // observed information of l_p
    Eigen::MatrixXd J;             // squared score statistic
    Eigen::MatrixXd sandwich_cov;  // H^-1 J H^-1
    Eigen::VectorXd se;            // sqrt(diag(sandwich_cov))
    double clic = 0.0;
    double clic_rescaled = 0.0;  // clic / (D - 1)
    std::vector<TraceEntry> trace;
    bool converged = false;
    int n_sweeps = 0;
    std::string note;  // diagnostics: singular H, boundary estimates, ...
};

}  // namespace maxstab
