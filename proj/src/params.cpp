#include "kwise/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kwise {

Params::Params(int d, int K, double q, std::vector<double> lambda,
               std::vector<double> mu, double beta)
    : d(d), K(K), q(q), lambda(std::move(lambda)), mu(std::move(mu)), beta(beta) {
    validate();
}

void Params::validate() const {
    if (d < 1) throw InvalidArgument("Params: dimension must be >= 1");
    if (K < 3) throw InvalidArgument("Params: need at least 3 components");
    if (!(q >= 1.0)) throw InvalidArgument("Params: interaction exponent q must be >= 1");
    if (static_cast<int>(lambda.size()) != K || static_cast<int>(mu.size()) != K)
        throw InvalidArgument("Params: lambda and mu must have K entries");
    for (double l : lambda)
        if (!(l > 0.0)) throw InvalidArgument("Params: lambda entries must be positive");
    for (double m : mu)
        if (!(m > 0.0)) throw InvalidArgument("Params: mu entries must be positive");
    if (d >= 3) {
        const double qmax = 2.0 * d / (K * (d - 2.0));
        if (!(q < qmax))
            throw InvalidArgument("Params: q = " + std::to_string(q) +
                                  " violates subcriticality q < 2d/(K(d-2)) = " +
                                  std::to_string(qmax));
    }
}

double Params::default_rmax() const {
    const double lmin = *std::min_element(lambda.begin(), lambda.end());
    return 30.0 / std::sqrt(lmin);
}

GridPtr Params::make_default_grid(int n) const {
    return RadialGrid::make(default_rmax(), n, d);
}

}  // namespace kwise
