#ifndef NSPLAN_TESTS_GRADCHECK_HPP
#define NSPLAN_TESTS_GRADCHECK_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "nsplan/tensor/tensor.hpp"

namespace nsplan::testing {

// Central finite differences against analytic gradients. `forward` must
// evaluate the scalar loss from the current parameter values; `params`
// are perturbed in place. Returns the largest relative error seen.
inline double finite_difference_check(
    const std::function<double()>& forward,
    const std::vector<nsplan::Tensor<double>*>& params,
    const std::vector<nsplan::Tensor<double>>& analytic, double eps = 1e-5) {
    double worst = 0.0;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        nsplan::Tensor<double>& p = *params[pi];
        for (std::size_t j = 0; j < p.size(); ++j) {
            double saved = p[j];
            p[j] = saved + eps;
            double up = forward();
            p[j] = saved - eps;
            double down = forward();
            p[j] = saved;
            double numeric = (up - down) / (2.0 * eps);
            double a = analytic[pi][j];
            double err = std::fabs(a - numeric) /
                         std::max({std::fabs(a), std::fabs(numeric), 1e-6});
            worst = std::max(worst, err);
        }
    }
    return worst;
}

}  // namespace nsplan::testing

#endif
