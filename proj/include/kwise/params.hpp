#pragma once

#include <vector>

#include "kwise/grid.hpp"

namespace kwise {

// Full problem datum for the K-component coupled system
//   -Delta u_i + lambda_i u_i
//       = mu_i |u_i|^{Kq-2} u_i + beta |u_i|^{q-2} u_i prod_{j != i} |u_j|^q.
struct Params {
    int d = 2;
    int K = 3;
    double q = 2.0;
    std::vector<double> lambda;
    std::vector<double> mu;
    double beta = 0.0;

    Params() : lambda(3, 1.0), mu(3, 1.0) {}
    Params(int d, int K, double q, std::vector<double> lambda,
           std::vector<double> mu, double beta);

    double kq() const { return K * q; }

    // Decay length of the slowest component sets the default truncation.
    double default_rmax() const;
    GridPtr make_default_grid(int n = 4000) const;

    Params with_beta(double b) const {
        Params p = *this;
        p.beta = b;
        return p;
    }

    void validate() const;
};

}  // namespace kwise
