#pragma once

#include <string>

namespace maxstab {

enum class ModelFamily { Smith, Schlather };

ModelFamily model_family_from_string(const std::string& name);
const std::string& to_string(ModelFamily family);

// z1, z2 on the unit Frechet scale; dep is the Mahalanobis/climate distance a
// for the Smith model and the correlation rho for the Schlather model.
struct PairInput {
    double z1 = 1.0;
    double z2 = 1.0;
    double dep = 1.0;
};

// Dependence-scalar branch thresholds: the bivariate formulas lose precision
// through their 1/a factors near full dependence and independence, so those
// limits are exact branches.
inline constexpr double kSmithFullDepA = 1e-6;
inline constexpr double kSmithIndepA = 1e2;
inline constexpr double kSchlatherFullDepRho = 1.0 - 1e-12;

double normal_cdf(double x);
double normal_pdf(double x);

double smith_bivariate_cdf(double z1, double z2, double a);
double schlather_bivariate_cdf(double z1, double z2, double rho);

double smith_extremal_coeff(double a);        // 2 Phi(a/2), in [1, 2]
double schlather_extremal_coeff(double rho);  // 1 + sqrt((1 - rho)/2)

// Closed-form log of the mixed second partial of the bivariate CDF.
// Degenerate dependence (a below the full-dependence threshold, rho above)
// has no bivariate density and raises NumericError.
double smith_log_density(double z1, double z2, double a);
double schlather_log_density(double z1, double z2, double rho);

double bivariate_cdf(ModelFamily family, const PairInput& p);
double bivariate_log_density(ModelFamily family, const PairInput& p);

}  // namespace maxstab
