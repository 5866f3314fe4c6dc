#include "maxstab/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "maxstab/climate.hpp"
#include "maxstab/correlation.hpp"
#include "maxstab/errors.hpp"
#include "maxstab/maxstable.hpp"
#include "maxstab/rng.hpp"

namespace maxstab {

namespace {

constexpr double kSqrt2Pi = 2.50662827463100050242;

Eigen::MatrixXd cholesky_with_jitter(const Eigen::MatrixXd& m) {
    for (double jitter : {0.0, 1e-10, 1e-9, 1e-8}) {
        Eigen::MatrixXd a = m;
        if (jitter > 0.0) a.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) return llt.matrixL();
    }
    throw NumericError("simulate: correlation/covariance matrix not factorizable "
                       "(jitter up to 1e-8 tried)");
}

// Schlather replicate: storms arrive with decreasing magnitude 1/Gamma_i;
// once eta * sqrt(2 pi) g_cap cannot top the accumulated pointwise minimum,
// no later storm can change the field.
void schlather_replicate(const Eigen::MatrixXd& chol_l, const SimConfig& cfg, Rng& rng,
                         SimField& out) {
    const Eigen::Index d = chol_l.rows();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd g(d), eps(d);
    const double w_max = kSqrt2Pi * cfg.g_cap;
    double gamma = 0.0;
    double z_min = 0.0;
    int storms = 0;
    while (true) {
        gamma += rng.exponential();
        const double eta = 1.0 / gamma;
        if (eta * w_max < z_min) break;
        if (storms >= cfg.max_storms) {
            out.truncated = true;
            break;
        }
        ++storms;
        for (Eigen::Index i = 0; i < d; ++i) g[i] = rng.normal();
        eps.noalias() = chol_l * g;
        for (Eigen::Index i = 0; i < d; ++i) {
            const double w = eps[i] > 0.0 ? kSqrt2Pi * eps[i] : 0.0;
            z[i] = std::max(z[i], eta * w);
        }
        z_min = z.minCoeff();
    }
    out.values.assign(z.data(), z.data() + d);
}

void smith_replicate(const Eigen::MatrixXd& points, const Eigen::MatrixXd& chol_l,
                     double f_max, const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi,
                     double volume, const SimConfig& cfg, Rng& rng, SimField& out) {
    const Eigen::Index d = points.rows();
    const Eigen::Index dim = points.cols();
    Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd s(dim), q(dim);
    const auto l_view = chol_l.triangularView<Eigen::Lower>();
    double gamma = 0.0;
    double z_min = 0.0;
    int storms = 0;
    while (true) {
        gamma += rng.exponential();
        const double eta = volume / gamma;
        if (eta * f_max < z_min) break;
        if (storms >= cfg.max_storms) {
            out.truncated = true;
            break;
        }
        ++storms;
        for (Eigen::Index c = 0; c < dim; ++c) s[c] = rng.uniform(box_lo[c], box_hi[c]);
        for (Eigen::Index i = 0; i < d; ++i) {
            q = points.row(i).transpose() - s;
            l_view.solveInPlace(q);
            const double dens = f_max * std::exp(-0.5 * q.squaredNorm());
            z[i] = std::max(z[i], eta * dens);
        }
        z_min = z.minCoeff();
    }
    out.values.assign(z.data(), z.data() + d);
}

template <bool Parallel, typename Replicate>
std::vector<SimField> run_replicates(const SimConfig& cfg, Replicate&& one) {
    cfg.validate();
    std::vector<SimField> fields(static_cast<std::size_t>(cfg.n_replicates));
    std::exception_ptr error;
    const std::ptrdiff_t m_max = cfg.n_replicates;
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::ptrdiff_t m = 0; m < m_max; ++m) {
        try {
            SimField& f = fields[static_cast<std::size_t>(m)];
            f.replicate_index = static_cast<int>(m);
            Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(m));
            one(rng, f);
        } catch (...) {
#pragma omp critical(maxstab_simulate_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return fields;
}

template <bool Parallel>
std::vector<SimField> simulate_schlather_impl(const Eigen::MatrixXd& corr, const SimConfig& cfg) {
    if (corr.rows() != corr.cols() || corr.rows() < 1)
        throw std::invalid_argument("simulate_schlather: correlation matrix must be square");
    const Eigen::MatrixXd chol_l = cholesky_with_jitter(corr);
    return run_replicates<Parallel>(
        cfg, [&](Rng& rng, SimField& f) { schlather_replicate(chol_l, cfg, rng, f); });
}

template <bool Parallel>
std::vector<SimField> simulate_smith_impl(const Eigen::MatrixXd& points,
                                          const Eigen::MatrixXd& sigma, const SimConfig& cfg) {
    const Eigen::Index dim = points.cols();
    if (points.rows() < 1) throw std::invalid_argument("simulate_smith: need stations");
    if (sigma.rows() != dim || sigma.cols() != dim)
        throw std::invalid_argument("simulate_smith: Sigma dimension mismatch");
    const Eigen::MatrixXd chol_l = cholesky_with_jitter(sigma);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const double sd_max = std::sqrt(es.eigenvalues().maxCoeff());
    const double margin = cfg.enlargement.value_or(4.0 * sd_max);
    if (!(margin >= 0.0)) throw std::invalid_argument("simulate_smith: negative enlargement");

    Eigen::VectorXd box_lo(dim), box_hi(dim);
    double volume = 1.0;
    for (Eigen::Index c = 0; c < dim; ++c) {
        box_lo[c] = points.col(c).minCoeff() - margin;
        box_hi[c] = points.col(c).maxCoeff() + margin;
        volume *= box_hi[c] - box_lo[c];
    }
    if (!(volume > 0.0))
        throw std::invalid_argument("simulate_smith: storm-center region has zero volume; "
                                    "increase the enlargement");

    double log_det = 0.0;
    for (Eigen::Index c = 0; c < dim; ++c) log_det += 2.0 * std::log(chol_l(c, c));
    const double f_max =
        std::exp(-0.5 * (static_cast<double>(dim) * std::log(2.0 * M_PI) + log_det));

    return run_replicates<Parallel>(cfg, [&](Rng& rng, SimField& f) {
        smith_replicate(points, chol_l, f_max, box_lo, box_hi, volume, cfg, rng, f);
    });
}

}  // namespace

void SimConfig::validate() const {
    if (n_replicates < 1) throw std::invalid_argument("SimConfig: n_replicates must be >= 1");
    if (max_storms < 100) throw std::invalid_argument("SimConfig: max_storms must be >= 100");
    if (!(g_cap > 0.0)) throw std::invalid_argument("SimConfig: g_cap must be > 0");
}

std::vector<SimField> simulate_schlather(const Eigen::MatrixXd& corr, const SimConfig& cfg) {
    return simulate_schlather_impl<true>(corr, cfg);
}

std::vector<SimField> simulate_schlather_serial(const Eigen::MatrixXd& corr,
                                                const SimConfig& cfg) {
    return simulate_schlather_impl<false>(corr, cfg);
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& points, const CorrelationSpec& corr) {
    const Eigen::Index d = points.rows();
    Eigen::MatrixXd c(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        c(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < d; ++j) {
            const double h = (points.row(i) - points.row(j)).norm();
            c(i, j) = c(j, i) = correlation(corr, h);
        }
    }
    return c;
}

std::vector<SimField> simulate_smith(const Eigen::MatrixXd& points, const Eigen::MatrixXd& sigma,
                                     const SimConfig& cfg) {
    return simulate_smith_impl<true>(points, sigma, cfg);
}

std::vector<SimField> simulate_smith_serial(const Eigen::MatrixXd& points,
                                            const Eigen::MatrixXd& sigma, const SimConfig& cfg) {
    return simulate_smith_impl<false>(points, sigma, cfg);
}

double model_theta(const FittedModel& fitted, double climate_dist) {
    if (fitted.spec.family == ModelFamily::Smith) {
        const double range = smith_range_from_beta(fitted.spec, fitted.beta);
        return smith_extremal_coeff(climate_dist / range);
    }
    const CorrelationSpec corr = corr_from_beta(fitted.spec, fitted.beta);
    return schlather_extremal_coeff(correlation(corr, climate_dist));
}

Eigen::MatrixXd fitted_points(const FittedModel& fitted,
                              const std::vector<StationRecord>& stations) {
    const ClimateTransform t =
        transform_from_beta(fitted.spec, fitted.beta, fitted.band_width);
    if (stations.empty()) throw std::invalid_argument("fitted_points: empty station list");
    Eigen::MatrixXd pts;
    for (std::size_t i = 0; i < stations.size(); ++i) {
        ClimatePoint p;
        try {
            p = transform(stations[i].coords, t);
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " (station '" + stations[i].id + "')");
        }
        if (i == 0) pts.resize(static_cast<Eigen::Index>(stations.size()), p.dim);
        for (int c = 0; c < p.dim; ++c)
            pts(static_cast<Eigen::Index>(i), c) = p.v[static_cast<std::size_t>(c)];
    }
    return pts;
}

std::vector<SimField> simulate_fitted(const FittedModel& fitted,
                                      const std::vector<StationRecord>& stations,
                                      const SimConfig& cfg) {
    const Eigen::MatrixXd pts = fitted_points(fitted, stations);
    if (fitted.spec.family == ModelFamily::Schlather) {
        const CorrelationSpec corr = corr_from_beta(fitted.spec, fitted.beta);
        return simulate_schlather(correlation_matrix(pts, corr), cfg);
    }
    const double range = smith_range_from_beta(fitted.spec, fitted.beta);
    const Eigen::MatrixXd sigma =
        range * range * Eigen::MatrixXd::Identity(pts.cols(), pts.cols());
    return simulate_smith(pts, sigma, cfg);
}

EnvelopeResult group_max_envelope(const MaximaPanel& panel, const FittedModel& fitted,
                                  const std::vector<std::string>& group_ids,
                                  const SimConfig& cfg, bool allow_single_station) {
    if (group_ids.size() < (allow_single_station ? 1u : 2u))
        throw std::invalid_argument("group_max_envelope: group too small");
    std::vector<std::size_t> idx;
    std::vector<StationRecord> group;
    for (const auto& id : group_ids) {
        idx.push_back(panel.station_index(id));
        group.push_back(panel.stations[idx.back()]);
    }

    EnvelopeResult res;
    // Observed group maxima over complete years.
    for (std::size_t k = 0; k < panel.n_years(); ++k) {
        double m = 0.0;
        bool complete = true;
        for (std::size_t i : idx) {
            if (!panel.present(k, i)) {
                complete = false;
                break;
            }
            m = std::max(m, panel.at(k, i));
        }
        if (complete) res.observed.push_back(m);
    }
    std::sort(res.observed.begin(), res.observed.end());
    const std::size_t k_eff = res.observed.size();
    res.n_years = static_cast<int>(k_eff);
    if (k_eff == 0) throw DataError("group_max_envelope: no complete years for the group");

    // M series of length k_eff, each sorted; replicate j of series m is the
    // field draw with substream index m * k_eff + j.
    const int m_series = cfg.n_replicates;
    SimConfig draw_cfg = cfg;
    draw_cfg.n_replicates = m_series * static_cast<int>(k_eff);
    const std::vector<SimField> draws = simulate_fitted(fitted, group, draw_cfg);

    std::vector<std::vector<double>> series(static_cast<std::size_t>(m_series));
    for (int m = 0; m < m_series; ++m) {
        auto& s = series[static_cast<std::size_t>(m)];
        s.resize(k_eff);
        for (std::size_t j = 0; j < k_eff; ++j) {
            const auto& vals = draws[static_cast<std::size_t>(m) * k_eff + j].values;
            s[j] = *std::max_element(vals.begin(), vals.end());
        }
        std::sort(s.begin(), s.end());
    }

    // Per-rank order statistics across series.
    std::vector<std::vector<double>> by_rank(k_eff, std::vector<double>(static_cast<std::size_t>(m_series)));
    for (int m = 0; m < m_series; ++m)
        for (std::size_t j = 0; j < k_eff; ++j)
            by_rank[j][static_cast<std::size_t>(m)] = series[static_cast<std::size_t>(m)][j];
    for (auto& v : by_rank) std::sort(v.begin(), v.end());

    auto rank_at = [&](std::size_t j, int order) {  // order is 1-based depth from each end
        return std::pair<double, double>(by_rank[j][static_cast<std::size_t>(order - 1)],
                                         by_rank[j][static_cast<std::size_t>(m_series - order)]);
    };

    const int k_point = std::max(1, static_cast<int>(std::ceil(0.025 * m_series)));
    res.lo_point.resize(k_eff);
    res.hi_point.resize(k_eff);
    for (std::size_t j = 0; j < k_eff; ++j)
        std::tie(res.lo_point[j], res.hi_point[j]) = rank_at(j, k_point);

    // Simultaneous band: deepest order statistic whose band still contains
    // at least 95% of the simulated series entirely.
    auto coverage = [&](int order) {
        int inside = 0;
        for (int m = 0; m < m_series; ++m) {
            bool ok = true;
            for (std::size_t j = 0; j < k_eff && ok; ++j) {
                const auto [lo, hi] = rank_at(j, order);
                const double v = series[static_cast<std::size_t>(m)][j];
                ok = v >= lo && v <= hi;
            }
            inside += ok ? 1 : 0;
        }
        return static_cast<double>(inside) / static_cast<double>(m_series);
    };
    int k_overall = k_point;
    double cov = coverage(k_overall);
    while (cov < 0.95 && k_overall > 1) {
        --k_overall;
        cov = coverage(k_overall);
    }
    res.overall_k = k_overall;
    res.overall_coverage = cov;
    res.lo_overall.resize(k_eff);
    res.hi_overall.resize(k_eff);
    for (std::size_t j = 0; j < k_eff; ++j)
        std::tie(res.lo_overall[j], res.hi_overall[j]) = rank_at(j, k_overall);
    return res;
}

SurvivalEstimate joint_survival(const FittedModel& fitted,
                                const std::vector<StationRecord>& group, double return_period,
                                const SimConfig& cfg) {
    if (group.empty()) throw std::invalid_argument("joint_survival: empty group");
    if (!(return_period > 1.0))
        throw std::invalid_argument("joint_survival: return period must be > 1");
    SurvivalEstimate out;
    out.independence_ref = std::pow(return_period, -static_cast<double>(group.size()));
    out.full_dependence_ref = 1.0 / return_period;
    if (group.size() == 1) {
        out.probability = 1.0 / return_period;
        out.mc_se = 0.0;
        out.analytic = true;
        return out;
    }
    // r-year return level of the unit Frechet distribution.
    const double z = -1.0 / std::log(1.0 - 1.0 / return_period);
    const std::vector<SimField> draws = simulate_fitted(fitted, group, cfg);
    std::int64_t hits = 0;
    for (const auto& f : draws) {
        bool all = true;
        for (double v : f.values)
            if (!(v > z)) {
                all = false;
                break;
            }
        hits += all ? 1 : 0;
    }
    const double m = static_cast<double>(draws.size());
    out.probability = static_cast<double>(hits) / m;
    out.mc_se = std::sqrt(out.probability * (1.0 - out.probability) / m);
    return out;
}

}  // namespace maxstab
