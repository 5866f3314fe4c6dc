#include "maxstab/maxstable.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

const std::array<std::string, 2> kModelNames = {"smith", "schlather"};

inline void check_z(double z1, double z2) {
    if (!(z1 > 0.0) || !(z2 > 0.0))
        throw std::domain_error("max-stable pair: z values must be > 0");
}
}  // namespace

ModelFamily model_family_from_string(const std::string& name) {
    if (name == "smith") return ModelFamily::Smith;
    if (name == "schlather") return ModelFamily::Schlather;
    throw std::invalid_argument("unknown model family: '" + name + "'");
}

const std::string& to_string(ModelFamily family) {
    return kModelNames[static_cast<std::size_t>(family)];
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double smith_bivariate_cdf(double z1, double z2, double a) {
    check_z(z1, z2);
    if (!(a >= 0.0)) throw std::domain_error("smith_bivariate_cdf: a must be >= 0");
    if (a <= kSmithFullDepA) return std::exp(-1.0 / std::fmin(z1, z2));
    if (a >= kSmithIndepA) return std::exp(-1.0 / z1 - 1.0 / z2);
    const double la = std::log(z2 / z1);
    const double q1 = 0.5 * a + la / a;
    const double q2 = 0.5 * a - la / a;
    return std::exp(-normal_cdf(q1) / z1 - normal_cdf(q2) / z2);
}

double schlather_bivariate_cdf(double z1, double z2, double rho) {
    check_z(z1, z2);
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::domain_error("schlather_bivariate_cdf: rho must be in [-1, 1]");
    const double s = z1 + z2;
    double radicand = 1.0 - 2.0 * (rho + 1.0) * z1 * z2 / (s * s);
    if (radicand < 0.0) {
        if (radicand < -1e-12)
            throw NumericError("schlather_bivariate_cdf: negative radicand");
        radicand = 0.0;
    }
    return std::exp(-0.5 * (1.0 / z1 + 1.0 / z2) * (1.0 + std::sqrt(radicand)));
}

double smith_extremal_coeff(double a) {
    if (!(a >= 0.0)) throw std::domain_error("smith_extremal_coeff: a must be >= 0");
    return 2.0 * normal_cdf(0.5 * a);
}

double schlather_extremal_coeff(double rho) {
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::domain_error("schlather_extremal_coeff: rho must be in [-1, 1]");
    return 1.0 + std::sqrt(0.5 * (1.0 - rho));
}

// With V the exponent measure (F = exp(-V)), the density is
// f = F (V1 V2 - V12), so log f = -V + log(V1 V2 - V12). The partial
// derivatives below were obtained by differentiating the bivariate CDFs
// symbolically; the finite-difference tests pin them to the CDFs.
double smith_log_density(double z1, double z2, double a) {
    check_z(z1, z2);
    if (!(a >= 0.0)) throw std::domain_error("smith_log_density: a must be >= 0");
    if (a <= kSmithFullDepA)
        throw NumericError("smith_log_density: degenerate model (full dependence)");
    if (a >= kSmithIndepA) {
        // Independence: product of unit Frechet densities z^-2 exp(-1/z).
        return -1.0 / z1 - 1.0 / z2 - 2.0 * std::log(z1 * z2);
    }
    const double la = std::log(z2 / z1);
    const double q1 = 0.5 * a + la / a;
    const double q2 = 0.5 * a - la / a;
    const double cdf1 = normal_cdf(q1);
    const double cdf2 = normal_cdf(q2);
    const double pdf1 = normal_pdf(q1);
    const double pdf2 = normal_pdf(q2);
    const double v = cdf1 / z1 + cdf2 / z2;
    const double a1 = cdf1 / (z1 * z1) + pdf1 / (a * z1 * z1) - pdf2 / (a * z1 * z2);
    const double a2 = cdf2 / (z2 * z2) + pdf2 / (a * z2 * z2) - pdf1 / (a * z1 * z2);
    const double b = q2 * pdf1 / (a * a * z1 * z1 * z2) + q1 * pdf2 / (a * a * z1 * z2 * z2);
    const double arg = a1 * a2 + b;
    if (!(arg > 0.0)) return kNegInf;
    return -v + std::log(arg);
}

double schlather_log_density(double z1, double z2, double rho) {
    check_z(z1, z2);
    if (!(rho >= -1.0 && rho <= 1.0))
        throw std::domain_error("schlather_log_density: rho must be in [-1, 1]");
    if (rho >= kSchlatherFullDepRho)
        throw NumericError("schlather_log_density: degenerate model (full dependence)");
    // b = sqrt(z1^2 - 2 rho z1 z2 + z2^2) > 0 for rho < 1.
    const double b = std::sqrt(z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2);
    const double v = (z1 + z2 + b) / (2.0 * z1 * z2);
    const double v1 = (rho * z1 - z2 - b) / (2.0 * z1 * z1 * b);
    const double v2 = (rho * z2 - z1 - b) / (2.0 * z2 * z2 * b);
    const double v12 = (rho * rho - 1.0) / (2.0 * b * b * b);
    const double arg = v1 * v2 - v12;
    if (!(arg > 0.0)) return kNegInf;
    return -v + std::log(arg);
}

double bivariate_cdf(ModelFamily family, const PairInput& p) {
    return family == ModelFamily::Smith ? smith_bivariate_cdf(p.z1, p.z2, p.dep)
                                        : schlather_bivariate_cdf(p.z1, p.z2, p.dep);
}

double bivariate_log_density(ModelFamily family, const PairInput& p) {
    return family == ModelFamily::Smith ? smith_log_density(p.z1, p.z2, p.dep)
                                        : schlather_log_density(p.z1, p.z2, p.dep);
}

}  // namespace maxstab
