#include "maxstab/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {

// Complete (both present) pairs, order preserved.
std::pair<std::vector<double>, std::vector<double>> complete_pairs(std::span<const double> z1,
                                                                   std::span<const double> z2) {
    if (z1.size() != z2.size())
        throw std::invalid_argument("theta estimator: series length mismatch");
    std::vector<double> a, b;
    for (std::size_t k = 0; k < z1.size(); ++k) {
        if (std::isnan(z1[k]) || std::isnan(z2[k])) continue;
        a.push_back(z1[k]);
        b.push_back(z2[k]);
    }
    if (a.size() < 5)
        throw DataError("theta estimator: need >= 5 complete common years, got " +
                        std::to_string(a.size()));
    return {std::move(a), std::move(b)};
}

std::vector<double> rank_probs(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> p(n);
    for (std::size_t r = 0; r < n; ++r)
        p[idx[r]] = (static_cast<double>(r) + 1.0) / (static_cast<double>(n) + 1.0);
    return p;
}

}  // namespace

double madogram_theta(std::span<const double> z1, std::span<const double> z2, bool use_ranks) {
    auto [a, b] = complete_pairs(z1, z2);
    const std::size_t n = a.size();
    double nu = 0.0;
    if (use_ranks) {
        const std::vector<double> fa = rank_probs(a);
        const std::vector<double> fb = rank_probs(b);
        for (std::size_t k = 0; k < n; ++k) nu += std::abs(fa[k] - fb[k]);
    } else {
        for (std::size_t k = 0; k < n; ++k)
            nu += std::abs(std::exp(-1.0 / a[k]) - std::exp(-1.0 / b[k]));
    }
    nu /= 2.0 * static_cast<double>(n);
    const double theta = (1.0 + 2.0 * nu) / (1.0 - 2.0 * nu);
    return std::clamp(theta, 1.0, 2.0);
}

double naive_theta(std::span<const double> z1, std::span<const double> z2) {
    auto [a, b] = complete_pairs(z1, z2);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += 1.0 / std::fmax(a[k], b[k]);
    if (!(s > 0.0)) throw NumericError("naive_theta: degenerate max series");
    const double theta = static_cast<double>(a.size()) / s;
    return std::clamp(theta, 1.0, 2.0);
}

std::vector<PairEstimate> pair_estimates(const MaximaPanel& panel,
                                         const std::vector<double>& pair_distances,
                                         ThetaMethod method, bool use_ranks) {
    const std::size_t d = panel.n_stations();
    if (pair_distances.size() != d * (d - 1) / 2)
        throw std::invalid_argument("pair_estimates: distance vector has wrong length");
    std::vector<PairEstimate> out;
    out.reserve(pair_distances.size());
    // Column views of the panel matrix, missing kept as NaN for alignment.
    std::vector<std::vector<double>> cols(d);
    for (std::size_t i = 0; i < d; ++i) {
        cols[i].resize(panel.n_years());
        for (std::size_t k = 0; k < panel.n_years(); ++k) cols[i][k] = panel.at(k, i);
    }
    std::size_t p = 0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j, ++p) {
            PairEstimate e;
            e.id1 = panel.stations[i].id;
            e.id2 = panel.stations[j].id;
            e.distance = pair_distances[p];
            e.method = method;
            int n_common = 0;
            for (std::size_t k = 0; k < panel.n_years(); ++k)
                if (!std::isnan(cols[i][k]) && !std::isnan(cols[j][k])) ++n_common;
            e.n_years = n_common;
            e.theta = method == ThetaMethod::Madogram ? madogram_theta(cols[i], cols[j], use_ranks)
                                                      : naive_theta(cols[i], cols[j]);
            out.push_back(std::move(e));
        }
    }
    return out;
}

std::vector<BinnedPoint> binned_curve(std::vector<PairEstimate> estimates, int n_bins) {
    if (n_bins < 1) throw std::invalid_argument("binned_curve: n_bins must be >= 1");
    if (estimates.empty()) return {};
    std::stable_sort(estimates.begin(), estimates.end(),
                     [](const PairEstimate& a, const PairEstimate& b) {
                         return a.distance < b.distance;
                     });
    const std::size_t n = estimates.size();
    const std::size_t bins = std::min<std::size_t>(static_cast<std::size_t>(n_bins), n);

    // Equal-count boundaries, then merge short bins (< 10 pairs) leftward.
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::size_t lo = b * n / bins;
        const std::size_t hi = (b + 1) * n / bins;
        if (hi > lo) ranges.emplace_back(lo, hi);
    }
    // Tied distances cannot straddle a quantile edge: merge bins whose
    // boundary value repeats, so identical-distance inputs give one bin.
    for (std::size_t b = ranges.size(); b-- > 1;) {
        if (estimates[ranges[b].first].distance == estimates[ranges[b].first - 1].distance) {
            ranges[b - 1].second = ranges[b].second;
            ranges.erase(ranges.begin() + static_cast<std::ptrdiff_t>(b));
        }
    }
    for (std::size_t b = ranges.size(); b-- > 1;) {
        if (ranges[b].second - ranges[b].first < 10) {
            ranges[b - 1].second = ranges[b].second;
            ranges.erase(ranges.begin() + static_cast<std::ptrdiff_t>(b));
        }
    }
    if (ranges.size() > 1 && ranges[0].second - ranges[0].first < 10) {
        ranges[1].first = ranges[0].first;
        ranges.erase(ranges.begin());
    }

    std::vector<BinnedPoint> out;
    out.reserve(ranges.size());
    for (const auto& [lo, hi] : ranges) {
        BinnedPoint pt;
        for (std::size_t k = lo; k < hi; ++k) {
            pt.mean_distance += estimates[k].distance;
            pt.mean_theta += estimates[k].theta;
        }
        pt.count = static_cast<int>(hi - lo);
        pt.mean_distance /= static_cast<double>(pt.count);
        pt.mean_theta /= static_cast<double>(pt.count);
        out.push_back(pt);
    }
    return out;
}

}  // namespace maxstab
