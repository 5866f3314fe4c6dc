#pragma once

#include <span>
#include <string>
#include <vector>

#include "maxstab/panel.hpp"

namespace maxstab {

enum class ThetaMethod { Madogram, Naive };

struct PairEstimate {
    std::string id1;
    std::string id2;
    double distance = 0.0;  // climate or Euclidean, caller's choice
    double theta = 1.0;     // clamped to [1, 2]
    ThetaMethod method = ThetaMethod::Madogram;
    int n_years = 0;  // complete common years used
};

// F-madogram estimator on unit-Frechet series: nu = mean |F(z1k) - F(z2k)| / 2
// with F(z) = exp(-1/z), theta = (1 + 2 nu) / (1 - 2 nu), clamped to [1, 2].
// With use_ranks, F is replaced by empirical ranks of the pooled pair; this is
// the robustness variant. Missing cells (NaN) are dropped pairwise; fewer
// than 5 complete common years is an error.
double madogram_theta(std::span<const double> z1, std::span<const double> z2,
                      bool use_ranks = false);

// Naive estimator from Pr{max(Z1,Z2) <= z} = exp(-theta/z):
// theta = n / sum_k 1/max(z1k, z2k), clamped to [1, 2].
double naive_theta(std::span<const double> z1, std::span<const double> z2);

// All-pairs estimates on a Frechet panel; distances supplied by the caller
// (length D(D-1)/2, lexicographic pair order).
std::vector<PairEstimate> pair_estimates(const MaximaPanel& panel,
                                         const std::vector<double>& pair_distances,
                                         ThetaMethod method, bool use_ranks = false);

struct BinnedPoint {
    double mean_distance = 0.0;
    double mean_theta = 0.0;
    int count = 0;
};

// Equal-count (quantile) distance bins; bins with fewer than 10 pairs are
// merged with their neighbor. Empty input gives empty output.
std::vector<BinnedPoint> binned_curve(std::vector<PairEstimate> estimates, int n_bins);

}  // namespace maxstab
