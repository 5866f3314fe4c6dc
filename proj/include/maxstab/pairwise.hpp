#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "maxstab/model.hpp"
#include "maxstab/panel.hpp"

namespace maxstab {

struct PairStats {
    std::int64_t n_terms = 0;          // (pair, year) cells that contributed
    std::int64_t n_missing_cells = 0;  // cells skipped because a value is missing
    std::int64_t n_empty_pairs = 0;    // pairs with no complete year at all
};

// Dependence scalar per station pair (row-major upper triangle, pairs in
// lexicographic (i, j) order): Mahalanobis distance / range for Smith,
// correlation of the climate distance for Schlather.
std::vector<double> pair_dependence(const MaximaPanel& panel, const ModelSpec& spec,
                                    const Eigen::VectorXd& beta, double band_width);

// Pairwise log-likelihood: sum over station pairs (lexicographic) of the
// per-pair sum over years of the bivariate log-density. The parallel kernel
// computes per-pair partial sums and reduces them in pair order, so results
// are bit-identical to the serial reference for any thread count.
double pairwise_loglik(const MaximaPanel& panel, const ModelSpec& spec,
                       const Eigen::VectorXd& beta, double band_width,
                       PairStats* stats = nullptr);
double pairwise_loglik_serial(const MaximaPanel& panel, const ModelSpec& spec,
                              const Eigen::VectorXd& beta, double band_width,
                              PairStats* stats = nullptr);

// Per-year sums of the pairwise log-density (length K); used by the
// finite-difference score accumulation. Parallel over years, deterministic.
std::vector<double> pairwise_loglik_by_year(const MaximaPanel& panel, const ModelSpec& spec,
                                            const Eigen::VectorXd& beta, double band_width);

}  // namespace maxstab
