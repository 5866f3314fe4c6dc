#include "maxstab/model.hpp"

#include <algorithm>
#include <cmath>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {

// Default boxes per parameter kind; magnitudes follow the km / data-unit
// coordinate convention.
ParamDef default_def(const std::string& name) {
    if (name.starts_with("alpha")) return {name, -1.5707963267948966, 1.5707963267948966, 0.0};
    if (name.starts_with("c2")) return {name, 0.05, 20.0, 1.0};
    if (name.starts_with("c3")) return {name, 0.0, 1000.0, 50.0};
    if (name.starts_with("c4")) return {name, 0.0, 1500.0, 10.0};
    if (name.starts_with("c5")) return {name, 0.0, 50.0, 1.0};
    if (name == "range") return {name, 1e-2, 1e5, 100.0};
    if (name == "shape") return {name, 0.05, 5.0, 1.0};
    throw ConfigError("no default bounds for parameter '" + name + "'");
}

}  // namespace

void ModelSpec::finalize() {
    const std::vector<ParamDef> overrides = params;
    params.clear();

    if (transform.bandwidth_grid.empty()) transform.bandwidth_grid = {0.0};
    if (!transform.per_region && !transform.use_region) {
        // No border-dependent piece: a band width would be inert.
        transform.bandwidth_grid = {0.0};
    }
    for (double w : transform.bandwidth_grid)
        if (!(w >= 0.0)) throw ConfigError("spec '" + name + "': band widths must be >= 0");

    std::vector<std::string> names;
    auto add = [&](const std::string& base) {
        if (transform.per_region) {
            names.push_back(base + "_north");
            names.push_back(base + "_south");
        } else {
            names.push_back(base);
        }
    };
    if (transform.fit_rotation) {
        add("alpha");
        add("c2");
    }
    if (transform.use_elevation) add("c3");
    if (transform.use_region) names.push_back("c4");  // north side fixed at 0
    if (transform.use_mean_level) add("c5");

    names.push_back("range");
    if (family == ModelFamily::Schlather) {
        if (corr_shape_free && family_param_count(corr.family) < 2)
            throw ConfigError("spec '" + name + "': correlation family '" +
                              to_string(corr.family) + "' has no shape parameter");
        if (corr_shape_free) names.push_back("shape");
    } else if (corr_shape_free) {
        throw ConfigError("spec '" + name + "': Smith model has no correlation shape");
    }

    for (const auto& n : names) {
        ParamDef def = default_def(n);
        if (n == "range") {
            def.lo = corr.range_bounds.lo;
            def.hi = corr.range_bounds.hi;
            def.init = std::clamp(def.init, def.lo, def.hi);
        } else if (n == "shape") {
            def.lo = corr.shape_bounds.lo;
            def.hi = corr.shape_bounds.hi;
            def.init = std::clamp(corr.shape, def.lo, def.hi);
        }
        for (const auto& o : overrides)
            if (o.name == n) def = o;
        if (!(def.lo < def.hi))
            throw ConfigError("spec '" + name + "': degenerate bounds for '" + n + "'");
        if (!std::isfinite(def.lo) || !std::isfinite(def.hi))
            throw ConfigError("spec '" + name + "': bounds must be finite for '" + n + "'");
        if (def.init < def.lo || def.init > def.hi)
            throw ConfigError("spec '" + name + "': init outside bounds for '" + n + "'");
        params.push_back(def);
    }
    for (const auto& o : overrides) {
        if (std::none_of(params.begin(), params.end(),
                         [&](const ParamDef& d) { return d.name == o.name; }))
            throw ConfigError("spec '" + name + "': unknown parameter override '" + o.name + "'");
    }
    if (params.empty()) throw ConfigError("spec '" + name + "': no free parameters");
}

int ModelSpec::param_index(const std::string& pname) const {
    for (std::size_t i = 0; i < params.size(); ++i)
        if (params[i].name == pname) return static_cast<int>(i);
    return -1;
}

Eigen::VectorXd ModelSpec::init_vector() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) v[static_cast<Eigen::Index>(i)] = params[i].init;
    return v;
}

void ModelSpec::check_bounds(const Eigen::VectorXd& beta) const {
    if (beta.size() != static_cast<Eigen::Index>(params.size()))
        throw std::invalid_argument("spec '" + name + "': parameter vector has length " +
                                    std::to_string(beta.size()) + ", expected " +
                                    std::to_string(params.size()));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double b = beta[static_cast<Eigen::Index>(i)];
        if (!(b >= params[i].lo && b <= params[i].hi))
            throw std::invalid_argument("spec '" + name + "': parameter '" + params[i].name +
                                        "' = " + std::to_string(b) + " outside [" +
                                        std::to_string(params[i].lo) + ", " +
                                        std::to_string(params[i].hi) + "]");
    }
}

ClimateTransform transform_from_beta(const ModelSpec& spec, const Eigen::VectorXd& beta,
                                     double band_width) {
    auto get = [&](const std::string& n, double fallback) {
        const int i = spec.param_index(n);
        return i >= 0 ? beta[i] : fallback;
    };
    ClimateTransform t;
    t.mask.elevation = spec.transform.use_elevation;
    t.mask.region = spec.transform.use_region;
    t.mask.mean_level = spec.transform.use_mean_level;
    t.band_width = band_width;
    t.shared_regions = !spec.transform.per_region;
    if (t.shared_regions) {
        RegionParams r;
        r.alpha = get("alpha", 0.0);
        r.c2 = get("c2", 1.0);
        r.c3 = get("c3", 0.0);
        r.c5 = get("c5", 0.0);
        t.north = t.south = r;
    } else {
        t.north.alpha = get("alpha_north", 0.0);
        t.north.c2 = get("c2_north", 1.0);
        t.north.c3 = get("c3_north", 0.0);
        t.north.c5 = get("c5_north", 0.0);
        t.south.alpha = get("alpha_south", 0.0);
        t.south.c2 = get("c2_south", 1.0);
        t.south.c3 = get("c3_south", 0.0);
        t.south.c5 = get("c5_south", 0.0);
    }
    t.c4 = get("c4", 0.0);
    return t;
}

CorrelationSpec corr_from_beta(const ModelSpec& spec, const Eigen::VectorXd& beta) {
    CorrelationSpec c = spec.corr;
    const int ri = spec.param_index("range");
    if (ri >= 0) c.range = beta[ri];
    const int si = spec.param_index("shape");
    if (si >= 0) c.shape = beta[si];
    return c;
}

double smith_range_from_beta(const ModelSpec& spec, const Eigen::VectorXd& beta) {
    const int ri = spec.param_index("range");
    if (ri < 0) throw std::invalid_argument("spec '" + spec.name + "': missing range parameter");
    return beta[ri];
}

}  // namespace maxstab
