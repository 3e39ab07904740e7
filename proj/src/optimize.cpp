#include "qfboot/optimize.hpp"

#include "qfboot/errors.hpp"
#include "qfboot/rng.hpp"

#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace qfboot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

void check_box(const Box& box) {
    if (box.lower.size() == 0 || box.lower.size() != box.upper.size()) {
        throw DimensionError("optimizer box bounds must be nonempty and of equal length");
    }
    if (((box.upper - box.lower).array() < 0.0).any()) {
        throw InvalidArgumentError("optimizer box has an upper bound below its lower bound");
    }
}

MinimizeResult nelder_mead_single(const ObjectiveFn& f, const Box& box, const Eigen::VectorXd& start,
                                  const OptimizerOptions& options) {
    const Eigen::Index q = box.dim();
    const Eigen::VectorXd width = (box.upper - box.lower).cwiseMax(1e-12);
    std::vector<Eigen::VectorXd> simplex;
    std::vector<double> values;
    simplex.push_back(box.clamp(start));
    for (Eigen::Index k = 0; k < q; ++k) {
        Eigen::VectorXd v = simplex.front();
        const double step = 0.1 * width(k);
        v(k) = (v(k) + step <= box.upper(k)) ? v(k) + step : v(k) - step;
        simplex.push_back(box.clamp(v));
    }
    for (const auto& v : simplex) {
        values.push_back(finite_or_inf(f(v)));
    }
    std::vector<std::size_t> order(simplex.size());
    MinimizeResult result;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[order.size() - 2];

        double diameter = 0.0;
        for (const auto& v : simplex) {
            diameter = std::max(diameter, ((v - simplex[best]).array() / width.array()).abs().maxCoeff());
        }
        const double spread = values[worst] - values[best];
        result.iterations = iter;
        if (diameter <= options.x_tol ||
            (std::isfinite(spread) && spread <= options.f_tol * (std::abs(values[best]) + 1e-300) && diameter < 1e-6)) {
            result.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(q);
        for (std::size_t i : order) {
            if (i != worst) {
                centroid += simplex[i];
            }
        }
        centroid /= static_cast<double>(q);

        const Eigen::VectorXd reflected = box.clamp(centroid + (centroid - simplex[worst]));
        const double f_reflected = finite_or_inf(f(reflected));
        if (f_reflected < values[best]) {
            const Eigen::VectorXd expanded = box.clamp(centroid + 2.0 * (centroid - simplex[worst]));
            const double f_expanded = finite_or_inf(f(expanded));
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < values[second]) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        const bool outside = f_reflected < values[worst];
        const Eigen::VectorXd contracted = outside ? box.clamp(centroid + 0.5 * (reflected - centroid))
                                                   : box.clamp(centroid + 0.5 * (simplex[worst] - centroid));
        const double f_contracted = finite_or_inf(f(contracted));
        if (f_contracted < (outside ? f_reflected : values[worst])) {
            simplex[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i != best) {
                simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
                values[i] = finite_or_inf(f(simplex[i]));
            }
        }
    }
    const auto best_it = std::min_element(values.begin(), values.end());
    result.x = simplex[static_cast<std::size_t>(std::distance(values.begin(), best_it))];
    result.value = *best_it;
    result.converged = result.converged && std::isfinite(result.value);
    return result;
}

}  // namespace

MinimizeResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                               const OptimizerOptions& options) {
    if (!(lo <= hi)) {
        throw InvalidArgumentError("minimize_scalar: empty interval");
    }
    MinimizeResult result;
    result.x = Eigen::VectorXd::Constant(1, lo);
    result.value = kInf;
    if (lo == hi) {
        result.value = finite_or_inf(f(lo));
        result.converged = std::isfinite(result.value);
        return result;
    }
    const std::size_t grid = std::max<std::size_t>(options.grid_points, 3);
    const double step = (hi - lo) / static_cast<double>(grid - 1);
    std::size_t best = 0;
    std::vector<double> grid_values(grid);
    for (std::size_t k = 0; k < grid; ++k) {
        const double x = k + 1 == grid ? hi : lo + step * static_cast<double>(k);
        grid_values[k] = finite_or_inf(f(x));
        if (grid_values[k] < grid_values[best]) {
            best = k;
        }
    }
    double a = lo + step * static_cast<double>(best == 0 ? 0 : best - 1);
    double b = best + 1 >= grid ? hi : lo + step * static_cast<double>(best + 1);
    result.x(0) = best + 1 == grid ? hi : lo + step * static_cast<double>(best);
    result.value = grid_values[best];

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = finite_or_inf(f(c));
    double fd = finite_or_inf(f(d));
    const double tol = options.x_tol * (hi - lo);
    std::size_t iter = 0;
    for (; iter < options.max_iterations && (b - a) > tol; ++iter) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = finite_or_inf(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = finite_or_inf(f(d));
        }
    }
    const double x_mid = 0.5 * (a + b);
    const double f_mid = finite_or_inf(f(x_mid));
    for (const auto& [x, fx] : {std::pair{c, fc}, std::pair{d, fd}, std::pair{x_mid, f_mid}}) {
        if (fx < result.value) {
            result.value = fx;
            result.x(0) = x;
        }
    }
    result.iterations = iter;
    result.converged = (b - a) <= tol && std::isfinite(result.value);
    return result;
}

MinimizeResult nelder_mead_box(const ObjectiveFn& f, const Box& box, const OptimizerOptions& options) {
    check_box(box);
    Engine engine = make_engine(RngState{0x4E454C444552ULL, 0, 0});
    boost::random::uniform_real_distribution<double> jitter(-0.25, 0.25);
    const std::size_t starts = std::max<std::size_t>(options.restarts, 1);
    MinimizeResult best;
    best.value = kInf;
    for (std::size_t s = 0; s < starts; ++s) {
        Eigen::VectorXd start = box.center();
        if (s > 0) {
            for (Eigen::Index k = 0; k < start.size(); ++k) {
                start(k) += jitter(engine) * (box.upper(k) - box.lower(k));
            }
        }
        MinimizeResult run = nelder_mead_single(f, box, start, options);
        if (s == 0 || run.value < best.value) {
            best = std::move(run);
        }
    }
    return best;
}

MinimizeResult minimize_box(const ObjectiveFn& f, const Box& box, const OptimizerOptions& options) {
    check_box(box);
    if (box.dim() == 1) {
        Eigen::VectorXd x(1);
        return minimize_scalar(
            [&](double t) {
                x(0) = t;
                return f(x);
            },
            box.lower(0), box.upper(0), options);
    }
    return nelder_mead_box(f, box, options);
}

}  // namespace qfboot
