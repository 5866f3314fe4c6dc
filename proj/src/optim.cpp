#include "maxstab/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "maxstab/errors.hpp"

namespace maxstab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const std::function<double(double)>& f, double x, int& evals) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : kNegInf;
}
}  // namespace

Max1dResult golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                               double xtol) {
    constexpr double invphi = 0.6180339887498949;  // 1/phi
    int evals = 0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = safe_eval(f, x1, evals);
    double f2 = safe_eval(f, x2, evals);
    while (b - a > xtol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = safe_eval(f, x1, evals);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = safe_eval(f, x2, evals);
        }
    }
    Max1dResult r;
    if (f1 >= f2) {
        r.x = x1;
        r.value = f1;
    } else {
        r.x = x2;
        r.value = f2;
    }
    r.evals = evals;
    return r;
}

Max1dResult maximize_1d(const std::function<double(double)>& f, double lo, double hi,
                        double incumbent_x, double incumbent_value, int grid_points,
                        double xtol) {
    if (!(lo < hi)) throw std::invalid_argument("maximize_1d: need lo < hi");
    if (grid_points < 2) throw std::invalid_argument("maximize_1d: need >= 2 grid points");

    int evals = 0;
    if (!std::isfinite(incumbent_value)) incumbent_value = kNegInf;

    // Grid scan, endpoints included.
    std::vector<double> xs(static_cast<std::size_t>(grid_points));
    std::vector<double> fs(static_cast<std::size_t>(grid_points));
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    int best = -1;
    double best_val = kNegInf;
    for (int i = 0; i < grid_points; ++i) {
        xs[static_cast<std::size_t>(i)] = (i == grid_points - 1) ? hi : lo + step * i;
        fs[static_cast<std::size_t>(i)] = safe_eval(f, xs[static_cast<std::size_t>(i)], evals);
        if (fs[static_cast<std::size_t>(i)] > best_val) {
            best_val = fs[static_cast<std::size_t>(i)];
            best = i;
        }
    }

    if (best_val == kNegInf && incumbent_value == kNegInf)
        throw NumericError("maximize_1d: objective non-finite on the whole grid");

    Max1dResult result;
    result.x = incumbent_x;
    result.value = incumbent_value;

    if (best >= 0 && best_val > kNegInf) {
        // Refine within the bracket formed by the neighbors of the best cell.
        const double a = xs[static_cast<std::size_t>(std::max(0, best - 1))];
        const double b = xs[static_cast<std::size_t>(std::min(grid_points - 1, best + 1))];
        Max1dResult g = golden_section_max(f, a, b, xtol);
        evals += g.evals;
        if (g.value > best_val) {
            best_val = g.value;
            if (g.value > result.value) {
                result.x = g.x;
                result.value = g.value;
            }
        }
        if (best_val > result.value) {
            result.x = xs[static_cast<std::size_t>(best)];
            result.value = best_val;
        }
    }
    result.evals = evals;
    return result;
}

NelderMeadResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& objective,
                                 const Eigen::VectorXd& x0, const Eigen::VectorXd& step,
                                 int max_iter, double ftol) {
    const int n = static_cast<int>(x0.size());
    auto f = [&](const Eigen::VectorXd& x) {
        const double v = objective(x);
        return std::isfinite(v) ? v : kNegInf;
    };

    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), x0);
    std::vector<double> fv(static_cast<std::size_t>(n + 1));
    for (int i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)][i] += step[i];
    for (int i = 0; i <= n; ++i) fv[static_cast<std::size_t>(i)] = f(simplex[static_cast<std::size_t>(i)]);

    auto order = [&]() {
        std::vector<int> idx(static_cast<std::size_t>(n + 1));
        for (int i = 0; i <= n; ++i) idx[static_cast<std::size_t>(i)] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return fv[static_cast<std::size_t>(a)] > fv[static_cast<std::size_t>(b)]; });
        std::vector<Eigen::VectorXd> s2;
        std::vector<double> f2;
        s2.reserve(static_cast<std::size_t>(n + 1));
        f2.reserve(static_cast<std::size_t>(n + 1));
        for (int i : idx) {
            s2.push_back(simplex[static_cast<std::size_t>(i)]);
            f2.push_back(fv[static_cast<std::size_t>(i)]);
        }
        simplex.swap(s2);
        fv.swap(f2);
    };

    NelderMeadResult res;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        order();
        const double fbest = fv.front();
        const double fworst = fv.back();
        if (std::isfinite(fbest) && std::isfinite(fworst) &&
            fbest - fworst <= ftol * (std::abs(fbest) + ftol)) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) centroid += simplex[static_cast<std::size_t>(i)];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd& worst = simplex[static_cast<std::size_t>(n)];
        Eigen::VectorXd xr = centroid + (centroid - worst);  // reflection
        const double fr = f(xr);
        if (fr > fv[0]) {
            Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst);  // expansion
            const double fe = f(xe);
            if (fe > fr) {
                simplex[static_cast<std::size_t>(n)] = xe;
                fv[static_cast<std::size_t>(n)] = fe;
            } else {
                simplex[static_cast<std::size_t>(n)] = xr;
                fv[static_cast<std::size_t>(n)] = fr;
            }
        } else if (fr > fv[static_cast<std::size_t>(n - 1)]) {
            simplex[static_cast<std::size_t>(n)] = xr;
            fv[static_cast<std::size_t>(n)] = fr;
        } else {
            Eigen::VectorXd xc = centroid + 0.5 * (worst - centroid);  // contraction
            const double fc = f(xc);
            if (fc > fv[static_cast<std::size_t>(n)]) {
                simplex[static_cast<std::size_t>(n)] = xc;
                fv[static_cast<std::size_t>(n)] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {  // shrink toward the best point
                    simplex[static_cast<std::size_t>(i)] =
                        simplex[0] + 0.5 * (simplex[static_cast<std::size_t>(i)] - simplex[0]);
                    fv[static_cast<std::size_t>(i)] = f(simplex[static_cast<std::size_t>(i)]);
                }
            }
        }
    }
    order();
    res.x = simplex[0];
    res.value = fv[0];
    res.iterations = iter;
    return res;
}

}  // namespace maxstab
