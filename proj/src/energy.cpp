#include "kwise/energy.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "kwise/detail/fastpow.hpp"
#include <string>

namespace kwise {

namespace {

void check_state(const SystemState& u, const Params& params) {
    if (u.num_components() != params.K)
        throw InvalidArgument("state has " + std::to_string(u.num_components()) +
                              " components, params expect " + std::to_string(params.K));
    if (u.grid()->dimension() != params.d)
        throw InvalidArgument("grid dimension does not match params");
}

struct Integrals {
    std::vector<double> norms;  // a_i = ||u_i||_i^2
    std::vector<double> lp;     // b_i = mu_i |u_i|_{Kq}^{Kq}
    double prod = 0.0;          // P = |prod u_i|_q^q
};

Integrals integrals_of(const SystemState& u, const Params& params) {
    Integrals I;
    const int K = params.K;
    const double kq = params.kq();
    I.norms.resize(K);
    I.lp.resize(K);
    for (int i = 0; i < K; ++i) {
        I.norms[i] = weighted_norm_sq(u.comps[i], params.lambda[i]);
        I.lp[i] = params.mu[i] * std::pow(lp_norm(u.comps[i], kq, 1.0), kq);
    }
    I.prod = product_integral(u, params.q);
    return I;
}

}  // namespace

EnergyReport energy(const SystemState& u, const Params& params) {
    check_state(u, params);
    const Integrals I = integrals_of(u, params);
    EnergyReport rep;
    rep.per_component_norms = I.norms;
    rep.per_component_lp = I.lp;
    rep.interaction = I.prod;
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < params.K; ++i) {
        sa += I.norms[i];
        sb += I.lp[i];
    }
    rep.total = 0.5 * sa - sb / params.kq() - (params.beta / params.q) * I.prod;
    rep.nehari_residual = sa - sb - params.K * params.beta * I.prod;
    rep.g_residuals.resize(params.K);
    for (int i = 0; i < params.K; ++i)
        rep.g_residuals[i] = I.norms[i] - I.lp[i] - params.beta * I.prod;
    return rep;
}

SystemState grad_energy(const SystemState& u, const Params& params) {
    check_state(u, params);
    const int K = params.K;
    const int n = u.grid()->size();
    const double q = params.q;
    const double kq = params.kq();
    const auto& w = u.grid()->weights();

    std::vector<std::vector<double>> qpow(K, std::vector<double>(n));
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < n; ++j) qpow[i][j] = detail::pow_abs(u.comps[i].v[j], q);

    std::vector<RadialField> out;
    out.reserve(K);
    std::vector<double> lin;
    for (int i = 0; i < K; ++i) {
        RadialField g(u.grid());
        u.grid()->apply_shifted(params.lambda[i], u.comps[i].v, lin);
        for (int j = 0; j < n; ++j) {
            double others = 1.0;
            for (int k = 0; k < K && others != 0.0; ++k)
                if (k != i) others *= qpow[k][j];
            const double ui = u.comps[i].v[j];
            g.v[j] = lin[j] - w[j] * (params.mu[i] * detail::spow(ui, kq - 1.0) +
                                      params.beta * detail::spow(ui, q - 1.0) * others);
        }
        out.push_back(std::move(g));
    }
    return SystemState(std::move(out));
}

std::vector<double> constraints_G(const SystemState& u, const Params& params) {
    check_state(u, params);
    const Integrals I = integrals_of(u, params);
    std::vector<double> g(params.K);
    for (int i = 0; i < params.K; ++i) g[i] = I.norms[i] - I.lp[i] - params.beta * I.prod;
    return g;
}

NehariProjection nehari_project(const SystemState& u, const Params& params) {
    check_state(u, params);
    const Integrals I = integrals_of(u, params);
    double sa = 0.0, sb = 0.0;
    for (int i = 0; i < params.K; ++i) {
        sa += I.norms[i];
        sb += I.lp[i];
    }
    if (!(sa > 0.0)) throw InvalidState("nehari_project: zero state");
    const double denom = sb + params.K * params.beta * I.prod;
    if (!(denom > 0.0))
        throw NotProjectable("nehari_project: non-positive scaling denominator", {denom});
    NehariProjection out;
    out.t = std::pow(sa / denom, 1.0 / (params.kq() - 2.0));
    out.state = u;
    for (auto& f : out.state.comps)
        for (auto& x : f.v) x *= out.t;
    return out;
}

ComponentProjection m_project(const SystemState& u, const Params& params) {
    check_state(u, params);
    const int K = params.K;
    const double q = params.q;
    const double kq = params.kq();
    const Integrals I = integrals_of(u, params);
    for (int i = 0; i < K; ++i)
        if (!(I.lp[i] > 0.0))
            throw InvalidState("m_project: component " + std::to_string(i) + " vanishes");

    // Decoupled scaling; exact whenever the interaction term is absent.
    std::vector<double> t(K);
    for (int i = 0; i < K; ++i) t[i] = std::pow(I.norms[i] / I.lp[i], 1.0 / (kq - 2.0));
    const bool decoupled = params.beta == 0.0 || I.prod == 0.0;

    if (!decoupled) {
        // Newton on x = log t for
        //   F_i = a_i e^{2 x_i} - b_i e^{Kq x_i} - beta P e^{q sum x}.
        Eigen::VectorXd x(K);
        for (int i = 0; i < K; ++i) x[i] = std::log(t[i]);
        Eigen::VectorXd F(K);
        Eigen::MatrixXd J(K, K);
        auto fill_F = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& Fv) {
            const double coupling = params.beta * I.prod * std::exp(q * xv.sum());
            for (int i = 0; i < K; ++i)
                Fv[i] = I.norms[i] * std::exp(2.0 * xv[i]) - I.lp[i] * std::exp(kq * xv[i]) -
                        coupling;
            return coupling;
        };
        double coupling = fill_F(x, F);
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            // each constraint is measured against its own component's
            // magnitude: a collapsing component satisfies its equation in
            // absolute terms without ever reaching the constraint set
            bool small = true;
            for (int i = 0; i < K; ++i) {
                const double scale_i = I.norms[i] * std::exp(2.0 * x[i]) +
                                       I.lp[i] * std::exp(kq * x[i]) + std::abs(coupling);
                if (std::abs(F[i]) > 1e-13 * scale_i) small = false;
            }
            if (small) {
                ok = true;
                break;
            }
            for (int i = 0; i < K; ++i) {
                for (int j = 0; j < K; ++j) J(i, j) = -q * coupling;
                J(i, i) += 2.0 * I.norms[i] * std::exp(2.0 * x[i]) -
                           kq * I.lp[i] * std::exp(kq * x[i]);
            }
            Eigen::VectorXd dx = J.partialPivLu().solve(F);
            if (!dx.allFinite()) break;
            const double cap = dx.lpNorm<Eigen::Infinity>();
            if (cap > 1.0) dx *= 1.0 / cap;
            double step = 1.0;
            bool improved = false;
            const double f0 = F.lpNorm<Eigen::Infinity>();
            Eigen::VectorXd xn(K), Fn(K);
            for (int bt = 0; bt < 12; ++bt) {
                xn = x - step * dx;
                const double cn = fill_F(xn, Fn);
                if (Fn.lpNorm<Eigen::Infinity>() < f0) {
                    x = xn;
                    F = Fn;
                    coupling = cn;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!improved) break;
        }
        if (!ok) {
            std::vector<double> res(F.data(), F.data() + K);
            throw NotProjectable("m_project: Newton did not converge", res);
        }
        for (int i = 0; i < K; ++i) t[i] = std::exp(x[i]);
    }

    ComponentProjection out;
    out.t = t;
    out.state = u;
    for (int i = 0; i < K; ++i)
        for (auto& xv : out.state.comps[i].v) xv *= t[i];
    return out;
}

InteractionMatrix interaction_matrix(const SystemState& u, const Params& params) {
    check_state(u, params);
    const Integrals I = integrals_of(u, params);
    double scale = 1.0;
    for (int i = 0; i < params.K; ++i) scale = std::max(scale, I.norms[i]);
    for (int i = 0; i < params.K; ++i) {
        const double g = I.norms[i] - I.lp[i] - params.beta * I.prod;
        if (std::abs(g) > 1e-8 * scale)
            throw InvalidState("interaction_matrix: state is off the constraint set");
    }
    const int K = params.K;
    const double q = params.q;
    const double kq = params.kq();
    InteractionMatrix M;
    M.entries.assign(K, std::vector<double>(K, -q * params.beta * I.prod));
    for (int i = 0; i < K; ++i)
        M.entries[i][i] = (2.0 - kq) * I.lp[i] + (2.0 - q) * params.beta * I.prod;

    Eigen::MatrixXd E(K, K);
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) E(i, j) = M.entries[i][j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(E);
    M.max_eigenvalue = es.eigenvalues().maxCoeff();
    return M;
}

double energy_limit(const SystemState& u, const Params& params) {
    check_state(u, params);
    const Integrals I = integrals_of(u, params);
    double s = 0.0;
    for (int i = 0; i < params.K; ++i) s += 0.5 * I.norms[i] - I.lp[i] / params.kq();
    return s;
}

double quotient_Ibar(const SystemState& u, const Params& params) {
    check_state(u, params);
    const Integrals I = integrals_of(u, params);
    const double kq = params.kq();
    double s = 0.0;
    for (int i = 0; i < params.K; ++i) {
        if (!(I.lp[i] > 0.0))
            throw InvalidState("quotient_Ibar: component " + std::to_string(i) + " vanishes");
        // (||u_i||_i / |u_i|_{Kq,i})^{2Kq/(Kq-2)} = (a_i / b_i^{2/Kq})^{Kq/(Kq-2)}
        s += std::pow(I.norms[i] / std::pow(I.lp[i], 2.0 / kq), kq / (kq - 2.0));
    }
    return s;
}

}  // namespace kwise
