#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace maxstab {

// Generalized extreme-value parameters. The shape xi is treated as exactly
// Gumbel when |xi| < kGumbelXiEps to keep (1 + xi*s)^(-1/xi) stable.
struct GevParams {
    double mu = 0.0;     // location, data units
    double sigma = 1.0;  // scale, data units, > 0
    double xi = 0.0;     // shape, dimensionless

    bool valid() const;
};

inline constexpr double kGumbelXiEps = 1e-8;

// CDF values are clamped into [kCdfClampLo, 1 - kCdfClampLo] before the
// -1/log(G) transform so observations outside the fitted support map to
// finite Frechet values.
inline constexpr double kCdfClampLo = 1e-12;

struct StationSeries {
    std::string station_id;
    std::vector<double> values;  // K annual maxima, data units
    std::vector<int> years;      // K year labels, same length
};

double gev_cdf(double z, const GevParams& p);
double gev_quantile(double u, const GevParams& p);  // u in (0,1)
double gev_log_density(double z, const GevParams& p);
double gev_loglik(std::span<const double> values, const GevParams& p);

double to_unit_frechet(double z, const GevParams& p);
double from_unit_frechet(double zstar, const GevParams& p);

struct GevFit {
    GevParams params;
    std::array<double, 3> se{};  // for (mu, sigma, xi); NaN if info not invertible
    double loglik = 0.0;
    int iterations = 0;
};

// Maximum-likelihood fit of an independent-observations GEV, initialized by
// probability-weighted moments, with xi searched over [-0.5, 0.5].
// Requires K >= 10; a constant series is non-identifiable.
GevFit fit_gev(const StationSeries& series);

// Probability-weighted-moment starting values (Hosking, Wallis & Wood).
GevParams gev_pwm_estimate(std::span<const double> values);

// Kolmogorov-Smirnov statistic of a sample against unit Frechet exp(-1/z).
double ks_statistic_frechet(std::span<const double> sample);

// Asymptotic two-sided KS critical value at level alpha for sample size n.
double ks_critical_value(double alpha, std::size_t n);

}  // namespace maxstab
