#include "maxstab/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maxstab/errors.hpp"
#include "maxstab/optim.hpp"
#include "maxstab/pairwise.hpp"

namespace maxstab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Map numerical failures (degenerate dependence at extreme candidate values)
// to -inf so the 1-d searches treat them as infeasible points.
double eval_pll(const MaximaPanel& panel, const ModelSpec& spec, const Eigen::VectorXd& beta,
                double w) {
    try {
        return pairwise_loglik(panel, spec, beta, w);
    } catch (const NumericError&) {
        return kNegInf;
    }
}

double fd_step(double value) { return std::max(1e-5 * std::abs(value), 1e-7); }

struct BandFit {
    Eigen::VectorXd beta;
    double pll = kNegInf;
    bool converged = false;
    int sweeps = 0;
    std::vector<TraceEntry> trace;
};

BandFit fit_one_bandwidth(const MaximaPanel& panel, const ModelSpec& spec,
                          const Eigen::VectorXd& init, double w) {
    const std::size_t r_count = spec.n_params();
    BandFit out;
    out.beta = init;
    out.pll = eval_pll(panel, spec, out.beta, w);

    auto record = [&](int sweep) {
        TraceEntry e;
        e.sweep = sweep;
        e.band_width = w;
        e.beta.assign(out.beta.data(), out.beta.data() + out.beta.size());
        e.pll = out.pll;
        out.trace.push_back(std::move(e));
    };
    record(0);

    for (int sweep = 1; sweep <= spec.max_sweeps; ++sweep) {
        const double pll_before = out.pll;
        for (std::size_t r = 0; r < r_count; ++r) {
            const auto ri = static_cast<Eigen::Index>(r);
            Eigen::VectorXd candidate = out.beta;
            auto objective = [&](double x) {
                candidate[ri] = x;
                return eval_pll(panel, spec, candidate, w);
            };
            const Max1dResult m =
                maximize_1d(objective, spec.params[r].lo, spec.params[r].hi, out.beta[ri],
                            out.pll, spec.grid_points);
            if (m.value > out.pll) {
                out.beta[ri] = m.x;
                out.pll = m.value;
            }
        }
        out.sweeps = sweep;
        record(sweep);
        const double scale = std::max(std::abs(out.pll), 1.0);
        if (out.pll - pll_before < spec.sweep_tol * scale) {
            out.converged = std::isfinite(out.pll);
            break;
        }
    }
    return out;
}

}  // namespace

FitResult profile_fit(const MaximaPanel& panel, const ModelSpec& spec,
                      std::optional<Eigen::VectorXd> init) {
    if (spec.params.empty())
        throw std::invalid_argument("profile_fit: spec '" + spec.name + "' not finalized");
    const Eigen::VectorXd start = init ? *init : spec.init_vector();
    spec.check_bounds(start);

    FitResult fit;
    fit.spec_name = spec.name;
    for (const auto& p : spec.params) fit.param_names.push_back(p.name);

    BandFit best;
    bool first = true;
    for (double w : spec.transform.bandwidth_grid) {
        BandFit bf = fit_one_bandwidth(panel, spec, start, w);
        fit.trace.insert(fit.trace.end(), bf.trace.begin(), bf.trace.end());
        if (first || bf.pll > best.pll) {
            best = std::move(bf);
            fit.band_width = w;
            first = false;
        }
    }

    fit.beta_hat = best.beta;
    fit.pll = best.pll;
    fit.converged = best.converged;
    fit.n_sweeps = best.sweeps;

    const auto r = static_cast<Eigen::Index>(spec.n_params());
    fit.H = Eigen::MatrixXd::Constant(r, r, kNan);
    fit.J = Eigen::MatrixXd::Constant(r, r, kNan);
    fit.sandwich_cov = Eigen::MatrixXd::Constant(r, r, kNan);
    fit.se = Eigen::VectorXd::Constant(r, kNan);
    fit.clic = kNan;
    fit.clic_rescaled = kNan;

    if (!std::isfinite(fit.pll)) {
        fit.note = "pairwise log-likelihood not finite at the returned point";
        fit.converged = false;
        return fit;
    }

    try {
        auto [h, j] = score_and_information(panel, spec, fit.beta_hat, fit.band_width);
        fit.H = h;
        fit.J = j;
        fit.sandwich_cov = sandwich_covariance(h, j);
        for (Eigen::Index i = 0; i < r; ++i) {
            const double v = fit.sandwich_cov(i, i);
            fit.se[i] = v >= 0.0 ? std::sqrt(v) : kNan;
        }
        const ClicResult c = composite_clic(h, j, fit.pll);
        if (c.defined) {
            fit.clic = c.clic;
            fit.clic_rescaled = c.clic / (static_cast<double>(panel.n_stations()) - 1.0);
        } else {
            fit.note = c.note;
        }
    } catch (const BoundaryError& e) {
        fit.note = e.what();
    } catch (const NumericError& e) {
        fit.note = e.what();
    }
    return fit;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> score_and_information(const MaximaPanel& panel,
                                                                  const ModelSpec& spec,
                                                                  const Eigen::VectorXd& beta,
                                                                  double band_width) {
    spec.check_bounds(beta);
    const auto r = static_cast<Eigen::Index>(spec.n_params());
    const std::size_t k_count = panel.n_years();

    for (Eigen::Index i = 0; i < r; ++i) {
        const double h = fd_step(beta[i]);
        const auto& def = spec.params[static_cast<std::size_t>(i)];
        if (beta[i] - h < def.lo || beta[i] + h > def.hi)
            throw BoundaryError("score_and_information: parameter '" + def.name +
                                "' too close to its bound for a two-sided step");
    }

    // Per-year scores by central differences; l_p(beta +/- h e_r) falls out
    // of the same passes for the Hessian diagonal.
    Eigen::MatrixXd scores(static_cast<Eigen::Index>(k_count), r);
    Eigen::VectorXd pll_plus(r), pll_minus(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double h = fd_step(beta[i]);
        Eigen::VectorXd bp = beta, bm = beta;
        bp[i] += h;
        bm[i] -= h;
        const std::vector<double> yp = pairwise_loglik_by_year(panel, spec, bp, band_width);
        const std::vector<double> ym = pairwise_loglik_by_year(panel, spec, bm, band_width);
        double sp = 0.0, sm = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            scores(static_cast<Eigen::Index>(k), i) = (yp[k] - ym[k]) / (2.0 * h);
            sp += yp[k];
            sm += ym[k];
        }
        pll_plus[i] = sp;
        pll_minus[i] = sm;
    }

    Eigen::MatrixXd j_mat = Eigen::MatrixXd::Zero(r, r);
    if (spec.j_mode == JAccumulation::ByYear) {
        for (std::size_t k = 0; k < k_count; ++k) {
            const auto s = scores.row(static_cast<Eigen::Index>(k));
            j_mat.noalias() += s.transpose() * s;
        }
    } else {
        // Literal reading of the double sum: one outer product per
        // (pair, year) term. Comparison mode, not the hot path.
        const std::size_t d = panel.n_stations();
        std::vector<std::vector<double>> dep_p(static_cast<std::size_t>(r)),
            dep_m(static_cast<std::size_t>(r));
        for (Eigen::Index i = 0; i < r; ++i) {
            const double h = fd_step(beta[i]);
            Eigen::VectorXd bp = beta, bm = beta;
            bp[i] += h;
            bm[i] -= h;
            dep_p[static_cast<std::size_t>(i)] = pair_dependence(panel, spec, bp, band_width);
            dep_m[static_cast<std::size_t>(i)] = pair_dependence(panel, spec, bm, band_width);
        }
        Eigen::VectorXd g(r);
        std::size_t p = 0;
        for (std::size_t s1 = 0; s1 + 1 < d; ++s1) {
            for (std::size_t s2 = s1 + 1; s2 < d; ++s2, ++p) {
                for (std::size_t k = 0; k < k_count; ++k) {
                    if (!panel.present(k, s1) || !panel.present(k, s2)) continue;
                    const double z1 = panel.at(k, s1);
                    const double z2 = panel.at(k, s2);
                    for (Eigen::Index i = 0; i < r; ++i) {
                        const double h = fd_step(beta[i]);
                        const double lp = bivariate_log_density(
                            spec.family, {z1, z2, dep_p[static_cast<std::size_t>(i)][p]});
                        const double lm = bivariate_log_density(
                            spec.family, {z1, z2, dep_m[static_cast<std::size_t>(i)][p]});
                        g[i] = (lp - lm) / (2.0 * h);
                    }
                    j_mat.noalias() += g * g.transpose();
                }
            }
        }
    }

    // Hessian of l_p by central second differences.
    const double f0 = pairwise_loglik(panel, spec, beta, band_width);
    Eigen::MatrixXd h_mat(r, r);
    for (Eigen::Index i = 0; i < r; ++i) {
        const double hi = fd_step(beta[i]);
        h_mat(i, i) = (pll_plus[i] - 2.0 * f0 + pll_minus[i]) / (hi * hi);
        for (Eigen::Index j = i + 1; j < r; ++j) {
            const double hj = fd_step(beta[j]);
            Eigen::VectorXd bpp = beta, bpm = beta, bmp = beta, bmm = beta;
            bpp[i] += hi; bpp[j] += hj;
            bpm[i] += hi; bpm[j] -= hj;
            bmp[i] -= hi; bmp[j] += hj;
            bmm[i] -= hi; bmm[j] -= hj;
            const double d2 =
                (pairwise_loglik(panel, spec, bpp, band_width) -
                 pairwise_loglik(panel, spec, bpm, band_width) -
                 pairwise_loglik(panel, spec, bmp, band_width) +
                 pairwise_loglik(panel, spec, bmm, band_width)) /
                (4.0 * hi * hj);
            h_mat(i, j) = d2;
            h_mat(j, i) = d2;
        }
    }
    Eigen::MatrixXd info = -h_mat;  // H(beta) = -d2 l_p
    info = 0.5 * (info + info.transpose()).eval();
    j_mat = 0.5 * (j_mat + j_mat.transpose()).eval();
    return {info, j_mat};
}

ClicResult composite_clic(const Eigen::MatrixXd& h, const Eigen::MatrixXd& j, double pll) {
    ClicResult out;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
    if (!lu.isInvertible()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
        Eigen::Index null_dir = 0;
        es.eigenvalues().cwiseAbs().minCoeff(&null_dir);
        std::string dir = "[";
        for (Eigen::Index i = 0; i < h.rows(); ++i) {
            dir += std::to_string(es.eigenvectors()(i, null_dir));
            if (i + 1 < h.rows()) dir += ", ";
        }
        dir += "]";
        out.note = "CLIC undefined: H is singular; null direction approx " + dir;
        return out;
    }
    out.penalty = 2.0 * (lu.solve(j)).trace();
    out.clic = -2.0 * pll + out.penalty;
    out.defined = true;
    return out;
}

Eigen::MatrixXd sandwich_covariance(const Eigen::MatrixXd& h, const Eigen::MatrixXd& j) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(h);
    if (!lu.isInvertible())
        throw NumericError("sandwich_covariance: H is singular");
    const Eigen::MatrixXd hinv = lu.inverse();
    Eigen::MatrixXd cov = hinv * j * hinv;
    return 0.5 * (cov + cov.transpose());
}

std::vector<FitResult> model_sweep(const MaximaPanel& panel, const std::vector<ModelSpec>& specs) {
    if (specs.empty()) throw std::invalid_argument("model_sweep: empty spec list");
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = i + 1; j < specs.size(); ++j)
            if (specs[i].name == specs[j].name)
                throw ConfigError("model_sweep: duplicate spec name '" + specs[i].name + "'");

    std::vector<FitResult> rows(specs.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(specs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto q = static_cast<std::size_t>(i);
        try {
            rows[q] = profile_fit(panel, specs[q]);
        } catch (const std::exception& e) {
            FitResult fail;
            fail.spec_name = specs[q].name;
            fail.converged = false;
            fail.pll = kNan;
            fail.clic = kNan;
            fail.clic_rescaled = kNan;
            fail.note = std::string("fit failed: ") + e.what();
            rows[q] = std::move(fail);
        }
    }

    std::stable_sort(rows.begin(), rows.end(), [](const FitResult& a, const FitResult& b) {
        const bool da = std::isfinite(a.clic), db = std::isfinite(b.clic);
        if (da != db) return da;
        if (da && a.clic != b.clic) return a.clic < b.clic;
        return a.spec_name < b.spec_name;
    });
    return rows;
}

}  // namespace maxstab
