#include "maxstab/climate.hpp"

#include <cmath>
#include <stdexcept>

#include "maxstab/errors.hpp"

namespace maxstab {

bool ClimateTransform::valid() const {
    auto region_ok = [](const RegionParams& r) {
        return std::isfinite(r.alpha) && r.c2 > 0.0 && r.c3 >= 0.0 && r.c5 >= 0.0;
    };
    if (!region_ok(north) || !region_ok(south)) return false;
    if (!(c4 >= 0.0) || !(band_width >= 0.0)) return false;
    if (shared_regions) {
        if (north.alpha != south.alpha || north.c2 != south.c2 || north.c3 != south.c3 ||
            north.c5 != south.c5)
            return false;
    }
    return true;
}

double region_coordinate(double region_signed_dist, double band_width) {
    if (!(band_width >= 0.0)) throw std::invalid_argument("region_coordinate: band width must be >= 0");
    if (band_width == 0.0) {
        if (region_signed_dist > 0.0) return 0.0;
        if (region_signed_dist < 0.0) return 1.0;
        return 0.5;
    }
    // Positive signed distance = north side = coordinate 0.
    const double u = 0.5 - region_signed_dist / band_width;
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u;
}

double region_coordinate(const StationCoords& x, double band_width) {
    return region_coordinate(x.region_signed_dist, band_width);
}

RegionParams local_params(const StationCoords& x, const ClimateTransform& t) {
    if (t.shared_regions) return t.north;
    const double u = region_coordinate(x, t.band_width);
    if (u == 0.0) return t.north;
    if (u == 1.0) return t.south;
    RegionParams r;
    r.alpha = (1.0 - u) * t.north.alpha + u * t.south.alpha;
    r.c2 = (1.0 - u) * t.north.c2 + u * t.south.c2;
    r.c3 = (1.0 - u) * t.north.c3 + u * t.south.c3;
    r.c5 = (1.0 - u) * t.north.c5 + u * t.south.c5;
    return r;
}

ClimatePoint transform(const StationCoords& x, const ClimateTransform& t) {
    const RegionParams r = local_params(x, t);
    ClimatePoint p;
    const double ca = std::cos(r.alpha);
    const double sa = std::sin(r.alpha);
    p.v[0] = ca * x.lon - sa * x.lat;
    p.v[1] = r.c2 * (sa * x.lon + ca * x.lat);
    int d = 2;
    if (t.mask.elevation) p.v[d++] = r.c3 * x.elev;
    if (t.mask.region) p.v[d++] = t.c4 * region_coordinate(x, t.band_width);
    if (t.mask.mean_level) {
        if (!x.mean_level)
            throw DataError("transform: mean_level coordinate requested but missing");
        p.v[d++] = r.c5 * *x.mean_level;
    }
    p.dim = d;
    return p;
}

double distance(const ClimatePoint& a, const ClimatePoint& b) {
    if (a.dim != b.dim) throw std::invalid_argument("distance: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) {
        const double d = a.v[static_cast<std::size_t>(i)] - b.v[static_cast<std::size_t>(i)];
        s += d * d;
    }
    return std::sqrt(s);
}

double climate_distance(const StationCoords& x1, const StationCoords& x2,
                        const ClimateTransform& t) {
    // Each station is mapped with its own locally interpolated coefficients;
    // the distance is the norm of the difference of the transformed points.
    return distance(transform(x1, t), transform(x2, t));
}

double mahalanobis(const Eigen::VectorXd& x1, const Eigen::VectorXd& x2,
                   const Eigen::MatrixXd& sigma) {
    if (x1.size() != x2.size() || sigma.rows() != x1.size() || sigma.cols() != x1.size())
        throw std::invalid_argument("mahalanobis: dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw NumericError("mahalanobis: Sigma is not positive-definite");
    const Eigen::VectorXd d = x1 - x2;
    // a^2 = d^T Sigma^{-1} d = |L^{-1} d|^2 with Sigma = L L^T.
    const Eigen::VectorXd y = llt.matrixL().solve(d);
    return y.norm();
}

Eigen::Matrix2d sigma_from_transform(const ClimateTransform& t, double lambda1) {
    const RegionParams& r = t.north;
    const double ca = std::cos(r.alpha);
    const double sa = std::sin(r.alpha);
    Eigen::Matrix2d v;
    v << ca, -sa, r.c2 * sa, r.c2 * ca;
    const Eigen::Matrix2d vtv = v.transpose() * v;
    Eigen::FullPivLU<Eigen::Matrix2d> lu(vtv);
    if (!lu.isInvertible())
        throw NumericError("sigma_from_transform: singular planar transform block");
    return lambda1 * lu.inverse();
}

}  // namespace maxstab
