#include "maxstab/pairwise.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "maxstab/correlation.hpp"
#include "maxstab/errors.hpp"
#include "maxstab/maxstable.hpp"

namespace maxstab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PairPartial {
    double sum = 0.0;
    std::int64_t terms = 0;
    std::int64_t missing = 0;
};

// Sum over years for one station pair, years ascending. The summation order
// here defines the reproducibility contract.
inline PairPartial pair_partial(const MaximaPanel& panel, ModelFamily family, double dep,
                                std::size_t i, std::size_t j) {
    PairPartial p;
    const std::size_t d = panel.n_stations();
    const std::size_t k_max = panel.n_years();
    const double* z = panel.values.data();
    for (std::size_t k = 0; k < k_max; ++k) {
        const double z1 = z[k * d + i];
        const double z2 = z[k * d + j];
        if (std::isnan(z1) || std::isnan(z2)) {
            ++p.missing;
            continue;
        }
        p.sum += family == ModelFamily::Smith ? smith_log_density(z1, z2, dep)
                                              : schlather_log_density(z1, z2, dep);
        ++p.terms;
    }
    return p;
}

void check_frechet_scale(const MaximaPanel& panel) {
    if (panel.scale_tag != MaximaPanel::Scale::Frechet)
        throw std::invalid_argument("pairwise_loglik: panel must be on the unit Frechet scale");
    if (panel.n_stations() < 2)
        throw std::invalid_argument("pairwise_loglik: need at least 2 stations");
}

// Degenerate dependence has no bivariate density; report it before entering
// the parallel region so the error names the offending pair.
void check_dependence(const MaximaPanel& panel, ModelFamily family,
                      const std::vector<double>& dep) {
    const std::size_t d = panel.n_stations();
    std::size_t p = 0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j, ++p) {
            const bool degenerate = family == ModelFamily::Smith
                                        ? dep[p] <= kSmithFullDepA
                                        : dep[p] >= kSchlatherFullDepRho;
            if (degenerate)
                throw NumericError("pairwise_loglik: degenerate dependence for pair ('" +
                                   panel.stations[i].id + "', '" + panel.stations[j].id +
                                   "'): stations coincide in climate space");
        }
    }
}

template <bool Parallel>
double loglik_impl(const MaximaPanel& panel, const ModelSpec& spec, const Eigen::VectorXd& beta,
                   double band_width, PairStats* stats) {
    spec.check_bounds(beta);
    check_frechet_scale(panel);
    const std::vector<double> dep = pair_dependence(panel, spec, beta, band_width);
    check_dependence(panel, spec.family, dep);
    const std::ptrdiff_t n_pairs = static_cast<std::ptrdiff_t>(dep.size());
    const std::size_t d = panel.n_stations();

    std::vector<PairPartial> partial(dep.size());
    // Pair p <-> (i, j) with i < j in lexicographic order.
    std::vector<std::uint32_t> pi(dep.size()), pj(dep.size());
    {
        std::size_t p = 0;
        for (std::size_t i = 0; i + 1 < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j, ++p) {
                pi[p] = static_cast<std::uint32_t>(i);
                pj[p] = static_cast<std::uint32_t>(j);
            }
    }

    std::exception_ptr error;
#pragma omp parallel for schedule(static) if (Parallel)
    for (std::ptrdiff_t p = 0; p < n_pairs; ++p) {
        try {
            const auto q = static_cast<std::size_t>(p);
            partial[q] = pair_partial(panel, spec.family, dep[q], pi[q], pj[q]);
        } catch (...) {
#pragma omp critical(maxstab_pairwise_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);

    double total = 0.0;
    PairStats st;
    for (std::ptrdiff_t p = 0; p < n_pairs; ++p) {
        const PairPartial& pp = partial[static_cast<std::size_t>(p)];
        if (pp.terms == 0) {
            ++st.n_empty_pairs;
        } else {
            total += pp.sum;
        }
        st.n_terms += pp.terms;
        st.n_missing_cells += pp.missing;
    }
    if (stats) *stats = st;
    if (!std::isfinite(total)) return kNegInf;
    return total;
}

}  // namespace

std::vector<double> pair_dependence(const MaximaPanel& panel, const ModelSpec& spec,
                                    const Eigen::VectorXd& beta, double band_width) {
    const std::size_t d = panel.n_stations();
    const ClimateTransform t = transform_from_beta(spec, beta, band_width);

    std::vector<ClimatePoint> pts;
    pts.reserve(d);
    for (const auto& s : panel.stations) {
        try {
            pts.push_back(transform(s.coords, t));
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " (station '" + s.id + "')");
        }
    }

    std::vector<double> dep;
    dep.reserve(d * (d - 1) / 2);
    if (spec.family == ModelFamily::Smith) {
        const double range = smith_range_from_beta(spec, beta);
        for (std::size_t i = 0; i + 1 < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                dep.push_back(distance(pts[i], pts[j]) / range);
    } else {
        const CorrelationSpec corr = corr_from_beta(spec, beta);
        for (std::size_t i = 0; i + 1 < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j)
                dep.push_back(correlation(corr, distance(pts[i], pts[j])));
    }
    return dep;
}

double pairwise_loglik(const MaximaPanel& panel, const ModelSpec& spec,
                       const Eigen::VectorXd& beta, double band_width, PairStats* stats) {
    return loglik_impl<true>(panel, spec, beta, band_width, stats);
}

double pairwise_loglik_serial(const MaximaPanel& panel, const ModelSpec& spec,
                              const Eigen::VectorXd& beta, double band_width, PairStats* stats) {
    return loglik_impl<false>(panel, spec, beta, band_width, stats);
}

std::vector<double> pairwise_loglik_by_year(const MaximaPanel& panel, const ModelSpec& spec,
                                            const Eigen::VectorXd& beta, double band_width) {
    spec.check_bounds(beta);
    check_frechet_scale(panel);
    const std::vector<double> dep = pair_dependence(panel, spec, beta, band_width);
    check_dependence(panel, spec.family, dep);
    const std::size_t d = panel.n_stations();
    const std::ptrdiff_t k_max = static_cast<std::ptrdiff_t>(panel.n_years());
    std::vector<double> by_year(panel.n_years(), 0.0);
    const double* z = panel.values.data();

    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < k_max; ++k) {
        try {
            double sum = 0.0;
            std::size_t p = 0;
            for (std::size_t i = 0; i + 1 < d; ++i) {
                for (std::size_t j = i + 1; j < d; ++j, ++p) {
                    const double z1 = z[static_cast<std::size_t>(k) * d + i];
                    const double z2 = z[static_cast<std::size_t>(k) * d + j];
                    if (std::isnan(z1) || std::isnan(z2)) continue;
                    sum += spec.family == ModelFamily::Smith
                               ? smith_log_density(z1, z2, dep[p])
                               : schlather_log_density(z1, z2, dep[p]);
                }
            }
            by_year[static_cast<std::size_t>(k)] = sum;
        } catch (...) {
#pragma omp critical(maxstab_pairwise_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return by_year;
}

}  // namespace maxstab
