#include "qprobe/detail/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qprobe::detail {

namespace {

std::vector<double> clipped(std::vector<double> x, const std::vector<double>& lo,
                            const std::vector<double>& hi)
{
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
}

} // namespace

NelderMeadResult nelder_mead_maximize(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& start,
                                      const std::vector<double>& lower,
                                      const std::vector<double>& upper,
                                      const NelderMeadOptions& opts)
{
    const std::size_t dim = start.size();
    if (dim == 0 || lower.size() != dim || upper.size() != dim)
        throw std::invalid_argument("nelder_mead_maximize: inconsistent dimensions");

    const int max_iterations =
        opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(200 * dim);

    NelderMeadResult result;
    auto evaluate = [&](const std::vector<double>& x) {
        ++result.evaluations;
        return -f(x); // minimize the negated objective
    };

    // Initial simplex: the start plus one step along each coordinate.
    std::vector<std::vector<double>> simplex;
    simplex.push_back(clipped(start, lower, upper));
    for (std::size_t i = 0; i < dim; ++i) {
        std::vector<double> vertex = simplex[0];
        double step = opts.init_step > 0.0 ? opts.init_step : 0.05 * (upper[i] - lower[i]);
        if (step <= 0.0) step = 0.1;
        // Step away from the nearer bound so the vertex actually moves.
        vertex[i] += (vertex[i] + step <= upper[i]) ? step : -step;
        simplex.push_back(clipped(std::move(vertex), lower, upper));
    }
    std::vector<double> value(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) value[i] = evaluate(simplex[i]);

    std::vector<std::size_t> order(simplex.size());
    const auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    };

    constexpr double alpha = 1.0; // reflection
    constexpr double gamma = 2.0; // expansion
    constexpr double beta = 0.5;  // contraction
    constexpr double delta = 0.5; // shrink

    for (int iter = 0; iter < max_iterations; ++iter) {
        sort_simplex();
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[order.size() - 2];
        ++result.iterations;

        double spread = value[worst] - value[best];
        double extent = 0.0;
        for (std::size_t i = 0; i < simplex.size(); ++i)
            for (std::size_t k = 0; k < dim; ++k)
                extent = std::max(extent, std::abs(simplex[i][k] - simplex[best][k]));
        if (spread <= opts.f_tol && extent <= opts.x_tol) {
            result.converged = true;
            result.history.push_back(-value[best]);
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto along = [&](double coeff) {
            std::vector<double> x(dim);
            for (std::size_t k = 0; k < dim; ++k)
                x[k] = centroid[k] + coeff * (centroid[k] - simplex[worst][k]);
            return clipped(std::move(x), lower, upper);
        };

        const std::vector<double> reflected = along(alpha);
        const double f_reflected = evaluate(reflected);
        if (f_reflected < value[best]) {
            const std::vector<double> expanded = along(gamma);
            const double f_expanded = evaluate(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                value[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                value[worst] = f_reflected;
            }
        } else if (f_reflected < value[second_worst]) {
            simplex[worst] = reflected;
            value[worst] = f_reflected;
        } else {
            const bool outside = f_reflected < value[worst];
            const std::vector<double> contracted = along(outside ? beta : -beta);
            const double f_contracted = evaluate(contracted);
            if (f_contracted < std::min(f_reflected, value[worst])) {
                simplex[worst] = contracted;
                value[worst] = f_contracted;
            } else {
                for (std::size_t i = 0; i < simplex.size(); ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < dim; ++k)
                        simplex[i][k] =
                            simplex[best][k] + delta * (simplex[i][k] - simplex[best][k]);
                    simplex[i] = clipped(std::move(simplex[i]), lower, upper);
                    value[i] = evaluate(simplex[i]);
                }
            }
        }
        const double running_best = -*std::min_element(value.begin(), value.end());
        if (result.history.empty())
            result.history.push_back(running_best);
        else
            result.history.push_back(std::max(result.history.back(), running_best));
    }

    // The best vertex is never discarded, so it is also the best point seen.
    sort_simplex();
    result.x = simplex[order.front()];
    result.value = -value[order.front()];
    return result;
}

} // namespace qprobe::detail
