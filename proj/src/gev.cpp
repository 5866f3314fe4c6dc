#include "maxstab/gev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "maxstab/errors.hpp"
#include "maxstab/optim.hpp"

#include <Eigen/Dense>

namespace maxstab {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

bool GevParams::valid() const {
    return std::isfinite(mu) && std::isfinite(sigma) && std::isfinite(xi) && sigma > 0.0;
}

double gev_cdf(double z, const GevParams& p) {
    if (!p.valid()) throw std::invalid_argument("gev_cdf: invalid parameters");
    const double s = (z - p.mu) / p.sigma;
    if (std::abs(p.xi) < kGumbelXiEps) {
        return std::exp(-std::exp(-s));
    }
    const double t = 1.0 + p.xi * s;
    if (t <= 0.0) {
        // Outside the support: below the lower endpoint for xi > 0 the CDF is
        // 0, above the upper endpoint for xi < 0 it is 1.
        return p.xi > 0.0 ? 0.0 : 1.0;
    }
    return std::exp(-std::pow(t, -1.0 / p.xi));
}

double gev_quantile(double u, const GevParams& p) {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("gev_quantile: u must be in (0,1)");
    if (!p.valid()) throw std::invalid_argument("gev_quantile: invalid parameters");
    const double y = -std::log(u);
    if (std::abs(p.xi) < kGumbelXiEps) {
        return p.mu - p.sigma * std::log(y);
    }
    return p.mu + p.sigma * (std::pow(y, -p.xi) - 1.0) / p.xi;
}

double gev_log_density(double z, const GevParams& p) {
    const double s = (z - p.mu) / p.sigma;
    if (std::abs(p.xi) < kGumbelXiEps) {
        return -std::log(p.sigma) - s - std::exp(-s);
    }
    const double t = 1.0 + p.xi * s;
    if (t <= 0.0) return kNegInf;
    const double lt = std::log(t);
    return -std::log(p.sigma) - (1.0 + 1.0 / p.xi) * lt - std::exp(-lt / p.xi);
}

double gev_loglik(std::span<const double> values, const GevParams& p) {
    if (!p.valid()) return kNegInf;
    double ll = 0.0;
    for (double z : values) {
        const double l = gev_log_density(z, p);
        if (!std::isfinite(l)) return kNegInf;
        ll += l;
    }
    return ll;
}

double to_unit_frechet(double z, const GevParams& p) {
    double g = gev_cdf(z, p);
    g = std::clamp(g, kCdfClampLo, 1.0 - kCdfClampLo);
    return -1.0 / std::log(g);
}

double from_unit_frechet(double zstar, const GevParams& p) {
    if (!(zstar > 0.0)) throw std::domain_error("from_unit_frechet: zstar must be > 0");
    // G(z) = exp(-1/zstar), so -log G = 1/zstar; invert the CDF directly on
    // that scale instead of round-tripping through a probability.
    const double y = 1.0 / zstar;
    if (std::abs(p.xi) < kGumbelXiEps) {
        return p.mu - p.sigma * std::log(y);
    }
    return p.mu + p.sigma * (std::pow(y, -p.xi) - 1.0) / p.xi;
}

GevParams gev_pwm_estimate(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<double> x(values.begin(), values.end());
    std::sort(x.begin(), x.end());
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w1 = static_cast<double>(j) / static_cast<double>(n - 1);
        const double w2 = (j >= 1)
            ? w1 * static_cast<double>(j - 1) / static_cast<double>(n - 2)
            : 0.0;
        b0 += x[j];
        b1 += w1 * x[j];
        b2 += w2 * x[j];
    }
    b0 /= static_cast<double>(n);
    b1 /= static_cast<double>(n);
    b2 /= static_cast<double>(n);

    GevParams p;
    // Hosking's k equals -xi in the convention used here.
    const double c = (2.0 * b1 - b0) / (3.0 * b2 - b0) - std::log(2.0) / std::log(3.0);
    const double k = 7.8590 * c + 2.9554 * c * c;
    if (std::abs(k) < 1e-6) {
        p.sigma = (2.0 * b1 - b0) / std::log(2.0);
        p.mu = b0 - 0.57721566490153286 * p.sigma;
        p.xi = 0.0;
    } else {
        const double g = std::tgamma(1.0 + k);
        p.sigma = (2.0 * b1 - b0) * k / (g * (1.0 - std::pow(2.0, -k)));
        p.mu = b0 + p.sigma * (g - 1.0) / k;
        p.xi = -k;
    }
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
        // Fall back to moment-style starting values.
        double mean = b0;
        double sd = 0.0;
        for (double v : x) sd += (v - mean) * (v - mean);
        sd = std::sqrt(sd / static_cast<double>(n));
        p.sigma = sd * 0.7797;  // sqrt(6)/pi
        p.mu = mean - 0.5772 * p.sigma;
        p.xi = 0.0;
    }
    p.xi = std::clamp(p.xi, -0.45, 0.45);
    return p;
}

GevFit fit_gev(const StationSeries& series) {
    const std::size_t n = series.values.size();
    if (n != series.years.size())
        throw std::invalid_argument("fit_gev: values/years length mismatch for station " +
                                    series.station_id);
    if (n < 10)
        throw std::invalid_argument("fit_gev: need at least 10 observations, got " +
                                    std::to_string(n) + " for station " + series.station_id);
    const double lo = *std::min_element(series.values.begin(), series.values.end());
    const double hi = *std::max_element(series.values.begin(), series.values.end());
    if (!(hi > lo))
        throw NumericError("fit_gev: constant series is non-identifiable (station " +
                           series.station_id + ")");

    const GevParams init = gev_pwm_estimate(series.values);
    const std::span<const double> vals(series.values);

    // Optimize over (mu, log sigma, xi) with xi boxed to [-0.5, 0.5].
    auto objective = [&](const Eigen::VectorXd& t) -> double {
        GevParams p{t[0], std::exp(t[1]), t[2]};
        if (std::abs(p.xi) > 0.5) return kNegInf;
        return gev_loglik(vals, p);
    };
    Eigen::VectorXd t0(3);
    t0 << init.mu, std::log(init.sigma), init.xi;
    Eigen::VectorXd step(3);
    step << 0.1 * init.sigma, 0.1, 0.1;

    const NelderMeadResult nm = nelder_mead_max(objective, t0, step, 3000, 1e-11);
    if (!nm.converged)
        throw NumericError("fit_gev: optimizer failed to converge for station " +
                           series.station_id + " after " + std::to_string(nm.iterations) +
                           " iterations (best loglik " + std::to_string(nm.value) + ")");

    GevFit fit;
    fit.params = GevParams{nm.x[0], std::exp(nm.x[1]), nm.x[2]};
    fit.loglik = nm.value;
    fit.iterations = nm.iterations;

    // Standard errors from the inverse observed information in the natural
    // (mu, sigma, xi) parameterization, Hessian by central differences.
    Eigen::Vector3d theta(fit.params.mu, fit.params.sigma, fit.params.xi);
    auto ll_nat = [&](const Eigen::Vector3d& v) -> double {
        GevParams p{v[0], v[1], v[2]};
        if (!(p.sigma > 0.0)) return kNegInf;
        return gev_loglik(vals, p);
    };
    Eigen::Vector3d h;
    for (int i = 0; i < 3; ++i) h[i] = std::max(1e-5 * std::abs(theta[i]), 1e-6);
    Eigen::Matrix3d hess;
    const double f0 = ll_nat(theta);
    for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
            double d;
            if (i == j) {
                Eigen::Vector3d tp = theta, tm = theta;
                tp[i] += h[i];
                tm[i] -= h[i];
                d = (ll_nat(tp) - 2.0 * f0 + ll_nat(tm)) / (h[i] * h[i]);
            } else {
                Eigen::Vector3d tpp = theta, tpm = theta, tmp = theta, tmm = theta;
                tpp[i] += h[i]; tpp[j] += h[j];
                tpm[i] += h[i]; tpm[j] -= h[j];
                tmp[i] -= h[i]; tmp[j] += h[j];
                tmm[i] -= h[i]; tmm[j] -= h[j];
                d = (ll_nat(tpp) - ll_nat(tpm) - ll_nat(tmp) + ll_nat(tmm)) /
                    (4.0 * h[i] * h[j]);
            }
            hess(i, j) = d;
            hess(j, i) = d;
        }
    }
    const Eigen::Matrix3d info = -hess;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(info);
    if (lu.isInvertible()) {
        const Eigen::Matrix3d cov = lu.inverse();
        for (int i = 0; i < 3; ++i)
            fit.se[i] = cov(i, i) > 0.0 ? std::sqrt(cov(i, i)) : kNan;
    } else {
        fit.se = {kNan, kNan, kNan};
    }
    return fit;
}

double ks_statistic_frechet(std::span<const double> sample) {
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = x[i] > 0.0 ? std::exp(-1.0 / x[i]) : 0.0;
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

double ks_critical_value(double alpha, std::size_t n) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double sn = std::sqrt(static_cast<double>(n));
    return c / (sn + 0.12 + 0.11 / sn);
}

}  // namespace maxstab
