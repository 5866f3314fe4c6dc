#pragma once

#include <string>

namespace maxstab {

// The nine stationary correlation families. All satisfy rho(0+) = 1 and
// rho(h) -> 0 as h -> inf; the first four have compact support.
enum class CorrFamily {
    Spherical,
    Circular,
    Cubic,
    Gneiting,
    Exponential,
    Matern,
    Gaussian,
    PoweredExponential,
    Cauchy,
};

// Lowercase names used in config files ("powered_exponential" etc.).
CorrFamily corr_family_from_string(const std::string& name);
const std::string& to_string(CorrFamily family);

// 1 for range-only families, 2 where a smoothness/shape parameter exists
// (matern, powered_exponential, cauchy; the cauchy shape defaults to 1).
int family_param_count(CorrFamily family);

struct ParamBounds {
    double lo = 0.0;
    double hi = 0.0;
};

struct CorrelationSpec {
    CorrFamily family = CorrFamily::Exponential;
    double range = 1.0;
    double shape = 1.0;  // matern smoothness / powexp exponent / cauchy shape
    ParamBounds range_bounds{1e-2, 1e5};
    ParamBounds shape_bounds{0.0, 0.0};  // filled by make_correlation_spec

    bool valid() const;
};

// Spec with family-default shape and bounds (matern smoothness in [0.1, 5],
// powered-exponential exponent in (0, 2], cauchy shape in [0.05, 5]).
CorrelationSpec make_correlation_spec(CorrFamily family, double range = 1.0);

// rho(h) for h >= 0; exactly 0 beyond the range for the compactly supported
// families. Throws std::invalid_argument on out-of-validity parameters.
double correlation(const CorrelationSpec& spec, double h);

}  // namespace maxstab
