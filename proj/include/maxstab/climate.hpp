#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

namespace maxstab {

// Station position in geographic + covariate space. Distances are in km so
// that weights like "elevation per km" have the magnitudes reported for the
// fitted models.
struct StationCoords {
    double lon = 0.0;                 // easting, km
    double lat = 0.0;                 // northing, km
    double elev = 0.0;                // elevation, km
    double region_signed_dist = 0.0;  // signed distance to region border, km; > 0 = north
    std::optional<double> mean_level; // station mean of the modeled variable, data units
};

struct CoordMask {
    bool elevation = false;
    bool region = false;
    bool mean_level = false;

    int dimension() const { return 2 + (elevation ? 1 : 0) + (region ? 1 : 0) + (mean_level ? 1 : 0); }
    bool operator==(const CoordMask&) const = default;
};

// Per-region affine coefficients: rotation angle, latitude weight, elevation
// weight and mean-level weight. The longitude weight is fixed to 1 for
// identifiability.
struct RegionParams {
    double alpha = 0.0;  // radians
    double c2 = 1.0;     // latitude, > 0
    double c3 = 0.0;     // per km elevation, >= 0
    double c5 = 0.0;     // per data unit of mean level, >= 0
};

struct ClimateTransform {
    RegionParams north;
    RegionParams south;
    double c4 = 0.0;         // region-number weight, >= 0 (north side fixed at 0)
    double band_width = 0.0; // border band width w, km, >= 0
    CoordMask mask;
    bool shared_regions = true;  // forces north == south

    bool valid() const;
};

// Transformed station position; at most 5 active coordinates
// (rotated/scaled lon-lat, weighted elevation, region, mean level).
struct ClimatePoint {
    std::array<double, 5> v{};
    int dim = 2;
};

// Region coordinate: 0 on the far north side, 1 on the far south side,
// linear across a band of width w centered on the border. w = 0 gives the
// hard 0/1 indicator (border itself maps to 0.5 by the midpoint convention).
double region_coordinate(double region_signed_dist, double band_width);
double region_coordinate(const StationCoords& x, double band_width);

// Effective coefficients at a station: north, south, or the convex
// combination weighted by the region coordinate inside the band.
RegionParams local_params(const StationCoords& x, const ClimateTransform& t);

ClimatePoint transform(const StationCoords& x, const ClimateTransform& t);

double climate_distance(const StationCoords& x1, const StationCoords& x2,
                        const ClimateTransform& t);
double distance(const ClimatePoint& a, const ClimatePoint& b);

// Mahalanobis distance sqrt((x1-x2)^T Sigma^{-1} (x1-x2)).
double mahalanobis(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                   const Eigen::MatrixXd& sigma);

// Planar covariance matrix equivalent to the transform's lon/lat block:
// Sigma = lambda1 (V^T V)^{-1}, using the shared/north rotation block.
Eigen::Matrix2d sigma_from_transform(const ClimateTransform& t, double lambda1);

}  // namespace maxstab
