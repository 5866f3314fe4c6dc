#include "maxstab/correlation.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace maxstab {

namespace {

const std::array<std::string, 9> kFamilyNames = {
    "spherical", "circular",  "cubic",    "gneiting",           "exponential",
    "matern",    "gaussian",  "powered_exponential", "cauchy",
};

}  // namespace

CorrFamily corr_family_from_string(const std::string& name) {
    for (std::size_t i = 0; i < kFamilyNames.size(); ++i)
        if (kFamilyNames[i] == name) return static_cast<CorrFamily>(i);
    throw std::invalid_argument("unknown correlation family: '" + name + "'");
}

const std::string& to_string(CorrFamily family) {
    return kFamilyNames[static_cast<std::size_t>(family)];
}

int family_param_count(CorrFamily family) {
    switch (family) {
        case CorrFamily::Matern:
        case CorrFamily::PoweredExponential:
        case CorrFamily::Cauchy:
            return 2;
        default:
            return 1;
    }
}

bool CorrelationSpec::valid() const {
    if (!(range > 0.0) || !std::isfinite(range)) return false;
    switch (family) {
        case CorrFamily::Matern:
            return shape >= 0.1 && shape <= 5.0;
        case CorrFamily::PoweredExponential:
            return shape > 0.0 && shape <= 2.0;
        case CorrFamily::Cauchy:
            return shape > 0.0 && std::isfinite(shape);
        default:
            return true;
    }
}

CorrelationSpec make_correlation_spec(CorrFamily family, double range) {
    CorrelationSpec s;
    s.family = family;
    s.range = range;
    switch (family) {
        case CorrFamily::Matern:
            s.shape = 1.0;
            s.shape_bounds = {0.1, 5.0};
            break;
        case CorrFamily::PoweredExponential:
            s.shape = 1.0;
            s.shape_bounds = {0.05, 2.0};
            break;
        case CorrFamily::Cauchy:
            s.shape = 1.0;
            s.shape_bounds = {0.05, 5.0};
            break;
        default:
            s.shape = 1.0;
            s.shape_bounds = {1.0, 1.0};
            break;
    }
    return s;
}

double correlation(const CorrelationSpec& spec, double h) {
    if (!(h >= 0.0)) throw std::invalid_argument("correlation: h must be >= 0");
    if (!spec.valid()) throw std::invalid_argument("correlation: invalid parameters");
    const double u = h / spec.range;
    switch (spec.family) {
        case CorrFamily::Spherical:
            if (u >= 1.0) return 0.0;
            return 1.0 - 1.5 * u + 0.5 * u * u * u;
        case CorrFamily::Circular: {
            if (u >= 1.0) return 0.0;
            return 2.0 / M_PI * (std::acos(u) - u * std::sqrt(1.0 - u * u));
        }
        case CorrFamily::Cubic: {
            if (u >= 1.0) return 0.0;
            const double u2 = u * u;
            return 1.0 - u2 * (7.0 - 8.75 * u + u2 * (3.5 * u - 0.75 * u2 * u));
        }
        case CorrFamily::Gneiting: {
            if (u >= 1.0) return 0.0;
            const double omu = 1.0 - u;
            const double omu2 = omu * omu;
            const double omu8 = omu2 * omu2 * omu2 * omu2;
            return (1.0 + u * (8.0 + u * (25.0 + 32.0 * u))) * omu8;
        }
        case CorrFamily::Exponential:
            return std::exp(-u);
        case CorrFamily::Matern: {
            if (u == 0.0) return 1.0;
            const double nu = spec.shape;
            const double v = std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(u, nu) *
                             std::cyl_bessel_k(nu, u);
            // Guard against Bessel under/overflow at extreme arguments.
            if (!std::isfinite(v)) return u > 1.0 ? 0.0 : 1.0;
            return std::fmin(v, 1.0);
        }
        case CorrFamily::Gaussian:
            return std::exp(-u * u);
        case CorrFamily::PoweredExponential:
            return std::exp(-std::pow(u, spec.shape));
        case CorrFamily::Cauchy:
            return std::pow(1.0 + u * u, -spec.shape);
    }
    throw std::invalid_argument("correlation: unknown family");
}

}  // namespace maxstab
