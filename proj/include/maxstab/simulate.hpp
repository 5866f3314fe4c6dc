#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "maxstab/model.hpp"
#include "maxstab/panel.hpp"

namespace maxstab {

struct SimConfig {
    std::uint64_t seed = 0;
    int n_replicates = 1;
    double g_cap = 5.0;      // Gaussian storm bound for the Schlather stopping rule
    int max_storms = 10000;  // >= 100
    std::optional<double> enlargement;  // Smith storm-center margin, km; default 4 sd of Sigma

    void validate() const;
};

struct SimField {
    std::vector<double> values;  // one unit-Frechet value per station
    int replicate_index = 0;
    bool truncated = false;  // max_storms reached before the stopping rule fired
};

// Schlather process at stations with the given correlation matrix:
// Z(x) = max_i eta_i sqrt(2 pi) max{0, eps_i(x)}, Poisson magnitudes
// eta_i = 1/Gamma_i, eps_i a zero-mean unit-variance Gaussian field drawn by
// Cholesky factorization (diagonal jitter up to 1e-8 if needed). Storm i is
// skipped once eta_i sqrt(2 pi) g_cap cannot beat the accumulated minimum.
// Replicates use per-replicate substreams, so outputs are deterministic and
// thread-count independent; results are ordered by replicate index.
std::vector<SimField> simulate_schlather(const Eigen::MatrixXd& corr, const SimConfig& cfg);
std::vector<SimField> simulate_schlather_serial(const Eigen::MatrixXd& corr,
                                                const SimConfig& cfg);

// Correlation matrix of a point set (rows = stations) under a correlation
// family evaluated on Euclidean distance.
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& points, const CorrelationSpec& corr);

// Smith storm process: centers uniform on the bounding box of the stations
// enlarged by cfg.enlargement, magnitudes eta_i = volume/Gamma_i (the finite
// center region rescales the intensity), Gaussian storm shape with
// covariance Sigma, stopping once eta_i f_max is below the accumulated
// minimum with f_max = (2 pi)^(-d/2) |Sigma|^(-1/2).
std::vector<SimField> simulate_smith(const Eigen::MatrixXd& points, const Eigen::MatrixXd& sigma,
                                     const SimConfig& cfg);
std::vector<SimField> simulate_smith_serial(const Eigen::MatrixXd& points,
                                            const Eigen::MatrixXd& sigma, const SimConfig& cfg);

// A model spec bound to estimated parameters; enough to evaluate dependence
// and simulate at arbitrary stations.
struct FittedModel {
    ModelSpec spec;
    Eigen::VectorXd beta;
    double band_width = 0.0;
};

// Extremal coefficient as a function of climate distance under the fitted
// model: 2 Phi(h / (2 range)) for Smith, 1 + sqrt((1 - rho(h))/2) for
// Schlather.
double model_theta(const FittedModel& fitted, double climate_dist);

// Climate-space coordinates of stations under the fitted transform
// (rows = stations).
Eigen::MatrixXd fitted_points(const FittedModel& fitted,
                              const std::vector<StationRecord>& stations);

// Simulate the fitted max-stable process at the given stations.
std::vector<SimField> simulate_fitted(const FittedModel& fitted,
                                      const std::vector<StationRecord>& stations,
                                      const SimConfig& cfg);

struct EnvelopeResult {
    std::vector<double> observed;    // sorted group-max series, ascending
    std::vector<double> lo_point;    // per-rank 95% pointwise band
    std::vector<double> hi_point;
    std::vector<double> lo_overall;  // simultaneous band (Davison-Hinkley style)
    std::vector<double> hi_overall;
    double overall_coverage = 0.0;   // achieved simultaneous coverage on the sims
    int overall_k = 0;               // order-statistic depth of the overall band
    int n_years = 0;                 // complete years used
};

// Compares the ordered observed group maxima with M simulated series of the
// same length from the fitted model. Group size >= 2 unless
// allow_single_station; M >= 1000 recommended.
EnvelopeResult group_max_envelope(const MaximaPanel& panel, const FittedModel& fitted,
                                  const std::vector<std::string>& group_ids,
                                  const SimConfig& cfg, bool allow_single_station = false);

struct SurvivalEstimate {
    double probability = 0.0;
    double mc_se = 0.0;
    double independence_ref = 0.0;   // r^-|A|
    double full_dependence_ref = 0.0;  // r^-1
    bool analytic = false;  // |A| = 1: probability is exactly 1/r
};

// Pr{ all stations in the group exceed the r-year unit-Frechet return level
// z = -1/log(1 - 1/r) } under the fitted model, with Monte Carlo standard
// error and the independence / full-dependence reference values.
SurvivalEstimate joint_survival(const FittedModel& fitted,
                                const std::vector<StationRecord>& group, double return_period,
                                const SimConfig& cfg);

}  // namespace maxstab
