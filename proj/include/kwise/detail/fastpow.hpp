#pragma once

#include <cmath>

namespace kwise::detail {

// |x|^e with a multiply chain for small integer exponents; the energy
// loops evaluate these per node and std::pow would dominate them.
inline double pow_abs(double x, double e) {
    x = std::abs(x);
    const int ie = static_cast<int>(e);
    if (static_cast<double>(ie) == e && ie >= 0 && ie <= 32) {
        double r = 1.0, b = x;
        int k = ie;
        while (k > 0) {
            if (k & 1) r *= b;
            b *= b;
            k >>= 1;
        }
        return r;
    }
    return std::pow(x, e);
}

// |x|^e sign(x), with sign(0) = 0.
inline double spow(double x, double e) {
    if (x == 0.0) return 0.0;
    const double a = pow_abs(x, e);
    return x > 0.0 ? a : -a;
}

}  // namespace kwise::detail
