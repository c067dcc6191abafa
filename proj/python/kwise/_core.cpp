#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kwise/experiments.hpp"

namespace py = pybind11;
using namespace kwise;

namespace {

// pybind11 holders cannot carry shared_ptr-to-const; a tiny handle works
struct PyGrid {
    GridPtr p;
};

SystemState to_state(const GridPtr& grid, const std::vector<std::vector<double>>& comps) {
    std::vector<RadialField> fields;
    fields.reserve(comps.size());
    for (const auto& v : comps) fields.emplace_back(grid, v);
    return SystemState(std::move(fields));
}

std::vector<std::vector<double>> from_state(const SystemState& u) {
    std::vector<std::vector<double>> out;
    out.reserve(u.comps.size());
    for (const auto& f : u.comps) out.push_back(f.v);
    return out;
}

ScalarDomain parse_domain(const std::string& kind, double inner, double outer) {
    if (kind == "full_space") return ScalarDomain::full_space();
    if (kind == "ball") return ScalarDomain::ball(outer);
    if (kind == "annulus") return ScalarDomain::annulus(inner, outer);
    if (kind == "exterior") return ScalarDomain::exterior(inner);
    throw InvalidArgument("domain must be full_space | ball | annulus | exterior");
}

std::string classification_str(const ClassificationResult& c) {
    switch (c.kind) {
        case Classification::FullyNonTrivial:
            return "fully-non-trivial";
        case Classification::SemiTrivial:
            return "semi-trivial";
        case Classification::Degenerate:
            return "degenerate";
    }
    return "?";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "least-energy solutions of K-wise coupled Schrodinger systems";

    py::register_exception<InvalidArgument>(m, "InvalidArgumentError", PyExc_ValueError);
    py::register_exception<InvalidState>(m, "InvalidStateError", PyExc_ValueError);
    py::register_exception<NotProjectable>(m, "NotProjectableError", PyExc_RuntimeError);
    py::register_exception<ConvergenceFailure>(m, "ConvergenceError", PyExc_RuntimeError);

    py::class_<PyGrid>(m, "Grid")
        .def_property_readonly("rmax", [](const PyGrid& g) { return g.p->rmax(); })
        .def_property_readonly("n", [](const PyGrid& g) { return g.p->size(); })
        .def_property_readonly("d", [](const PyGrid& g) { return g.p->dimension(); })
        .def_property_readonly("nodes", [](const PyGrid& g) { return g.p->nodes(); })
        .def_property_readonly("weights", [](const PyGrid& g) { return g.p->weights(); });

    m.def(
        "make_grid",
        [](double rmax, int n, int d) { return PyGrid{RadialGrid::make(rmax, n, d)}; },
        py::arg("rmax"), py::arg("n"), py::arg("d"));

    py::class_<Params>(m, "Params")
        .def(py::init<int, int, double, std::vector<double>, std::vector<double>, double>(),
             py::arg("d"), py::arg("K"), py::arg("q"), py::arg("lam"), py::arg("mu"),
             py::arg("beta"))
        .def_readwrite("d", &Params::d)
        .def_readwrite("K", &Params::K)
        .def_readwrite("q", &Params::q)
        .def_readwrite("lam", &Params::lambda)
        .def_readwrite("mu", &Params::mu)
        .def_readwrite("beta", &Params::beta)
        .def("default_rmax", &Params::default_rmax)
        .def("with_beta", &Params::with_beta);

    m.def(
        "weighted_norm_sq",
        [](const PyGrid& g, const std::vector<double>& v, double lam) {
            return weighted_norm_sq(RadialField(g.p, v), lam);
        },
        py::arg("grid"), py::arg("values"), py::arg("lam"));
    m.def(
        "lp_norm",
        [](const PyGrid& g, const std::vector<double>& v, double p, double mu) {
            return lp_norm(RadialField(g.p, v), p, mu);
        },
        py::arg("grid"), py::arg("values"), py::arg("p"), py::arg("mu"));
    m.def(
        "product_integral",
        [](const PyGrid& g, const std::vector<std::vector<double>>& comps, double q) {
            return product_integral(to_state(g.p, comps), q);
        },
        py::arg("grid"), py::arg("components"), py::arg("q"));

    py::class_<ScalarSolution>(m, "ScalarSolution")
        .def_property_readonly("profile", [](const ScalarSolution& s) { return s.profile.v; })
        .def_readonly("c_value", &ScalarSolution::c_value)
        .def_readonly("energy", &ScalarSolution::energy)
        .def_readonly("residual", &ScalarSolution::residual)
        .def_readonly("iterations", &ScalarSolution::iterations)
        .def_readonly("truncation_warning", &ScalarSolution::truncation_warning);

    m.def(
        "solve_scalar_ground_state",
        [](double p, double lam, double mu, const PyGrid& grid, const std::string& domain,
           double inner, double outer) {
            return solve_scalar_ground_state({p, lam, mu, parse_domain(domain, inner, outer)},
                                             grid.p);
        },
        py::arg("p"), py::arg("lam"), py::arg("mu"), py::arg("grid"),
        py::arg("domain") = "full_space", py::arg("inner") = 0.0, py::arg("outer") = 0.0);
    m.def(
        "compute_c",
        [](double p, double lam, double mu, const PyGrid& grid, const std::string& domain,
           double inner, double outer) {
            return compute_c({p, lam, mu, parse_domain(domain, inner, outer)}, grid.p);
        },
        py::arg("p"), py::arg("lam"), py::arg("mu"), py::arg("grid"),
        py::arg("domain") = "full_space", py::arg("inner") = 0.0, py::arg("outer") = 0.0);

    py::class_<SignChangingSolution>(m, "SignChangingSolution")
        .def_readonly("positive_part", &SignChangingSolution::positive_part)
        .def_readonly("negative_part", &SignChangingSolution::negative_part)
        .def_readonly("interface_radius", &SignChangingSolution::interface_radius)
        .def_readonly("total_energy", &SignChangingSolution::total_energy)
        .def_readonly("positive_in_ball", &SignChangingSolution::positive_in_ball);
    m.def(
        "solve_sign_changing",
        [](double l1, double l2, double m1, double m2, double p, const PyGrid& g) {
            return solve_sign_changing(l1, l2, m1, m2, p, g.p);
        },
        py::arg("lam1"), py::arg("lam2"), py::arg("mu1"), py::arg("mu2"), py::arg("p"),
        py::arg("grid"));

    py::class_<EnergyReport>(m, "EnergyReport")
        .def_readonly("total", &EnergyReport::total)
        .def_readonly("per_component_norms", &EnergyReport::per_component_norms)
        .def_readonly("per_component_lp", &EnergyReport::per_component_lp)
        .def_readonly("interaction", &EnergyReport::interaction)
        .def_readonly("nehari_residual", &EnergyReport::nehari_residual)
        .def_readonly("g_residuals", &EnergyReport::g_residuals);

    m.def(
        "energy",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& comps) {
            return energy(to_state(g.p, comps), p);
        },
        py::arg("params"), py::arg("grid"), py::arg("components"));
    m.def(
        "grad_energy",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& comps) {
            return from_state(grad_energy(to_state(g.p, comps), p));
        },
        py::arg("params"), py::arg("grid"), py::arg("components"));
    m.def(
        "constraints",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& comps) {
            return constraints_G(to_state(g.p, comps), p);
        },
        py::arg("params"), py::arg("grid"), py::arg("components"));
    m.def(
        "nehari_project",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& comps) {
            auto proj = nehari_project(to_state(g.p, comps), p);
            return py::make_tuple(proj.t, from_state(proj.state));
        },
        py::arg("params"), py::arg("grid"), py::arg("components"));
    m.def(
        "m_project",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& comps) {
            auto proj = m_project(to_state(g.p, comps), p);
            return py::make_tuple(proj.t, from_state(proj.state));
        },
        py::arg("params"), py::arg("grid"), py::arg("components"));
    m.def(
        "interaction_matrix",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& comps) {
            auto M = interaction_matrix(to_state(g.p, comps), p);
            return py::make_tuple(M.entries, M.max_eigenvalue);
        },
        py::arg("params"), py::arg("grid"), py::arg("components"));
    m.def(
        "energy_limit",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& comps) {
            return energy_limit(to_state(g.p, comps), p);
        },
        py::arg("params"), py::arg("grid"), py::arg("components"));
    m.def(
        "quotient_ibar",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& comps) {
            return quotient_Ibar(to_state(g.p, comps), p);
        },
        py::arg("params"), py::arg("grid"), py::arg("components"));

    m.def("reduced_quotient", &reduced_quotient, py::arg("s"), py::arg("K"), py::arg("q"));
    py::class_<ReducedMinimum>(m, "ReducedMinimum")
        .def_readonly("value", &ReducedMinimum::value)
        .def_readonly("argmin", &ReducedMinimum::argmin)
        .def_readonly("local_minima", &ReducedMinimum::local_minima)
        .def_readonly("boundary_min", &ReducedMinimum::boundary_min);
    m.def("minimize_reduced_quotient", &minimize_reduced_quotient, py::arg("K"), py::arg("q"),
          py::arg("seed") = 1234u);

    m.def(
        "compute_s_bar",
        [](const Params& p, const PyGrid& g) { return compute_s_bar(p, g.p); },
        py::arg("params"), py::arg("grid"));
    m.def(
        "compute_c_bar",
        [](const Params& p, const PyGrid& g) {
            auto r = compute_c_bar(p, g.p);
            return py::make_tuple(r.value, r.partition_radius);
        },
        py::arg("params"), py::arg("grid"));
    m.def("compute_ubar_beta", &compute_ubar_beta, py::arg("params"), py::arg("s_bar"),
          py::arg("c_bar"));
    m.def("compute_L", &compute_L, py::arg("params"), py::arg("s_bar"), py::arg("c_bar"));

    py::class_<ThresholdReport>(m, "ThresholdReport")
        .def_readonly("s_bar", &ThresholdReport::s_bar)
        .def_readonly("c_bar", &ThresholdReport::c_bar)
        .def_readonly("ubar_beta", &ThresholdReport::ubar_beta)
        .def_readonly("l_value", &ThresholdReport::l_value)
        .def_readonly("has_l", &ThresholdReport::has_l)
        .def_readonly("beta_bar_lower", &ThresholdReport::beta_bar_lower)
        .def_readonly("beta_bar_upper", &ThresholdReport::beta_bar_upper)
        .def_readonly("reduced_minimum", &ThresholdReport::reduced_minimum)
        .def_readonly("provenance", &ThresholdReport::provenance);
    m.def(
        "compute_thresholds",
        [](const Params& p, const PyGrid& g, unsigned seed) {
            return compute_thresholds(p, g.p, seed);
        },
        py::arg("params"), py::arg("grid"), py::arg("seed") = 1234u);

    py::class_<Solution>(m, "Solution")
        .def_property_readonly("state", [](const Solution& s) { return from_state(s.state); })
        .def_readonly("level", &Solution::level)
        .def_property_readonly(
            "classification",
            [](const Solution& s) { return classification_str(s.classification); })
        .def_property_readonly(
            "trivial_components",
            [](const Solution& s) { return s.classification.trivial_components; })
        .def_readonly("multipliers", &Solution::multipliers)
        .def_readonly("multiplier_residual", &Solution::multiplier_residual)
        .def_readonly("constraint_residual", &Solution::constraint_residual)
        .def_readonly("converged", &Solution::converged)
        .def_readonly("iterations", &Solution::iterations);

    m.def(
        "minimize_on_nehari",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& init,
           int max_iters) {
            MinimizeOptions opts;
            opts.max_iters = max_iters;
            return minimize_on_nehari(p, to_state(g.p, init), opts);
        },
        py::arg("params"), py::arg("grid"), py::arg("init"), py::arg("max_iters") = 4000);
    m.def(
        "minimize_on_mr",
        [](const Params& p, const PyGrid& g, const std::vector<std::vector<double>>& init,
           int max_iters) {
            MinimizeOptions opts;
            opts.max_iters = max_iters;
            return minimize_on_Mr(p, to_state(g.p, init), opts);
        },
        py::arg("params"), py::arg("grid"), py::arg("init"), py::arg("max_iters") = 4000);
    m.def(
        "default_seed_states",
        [](const Params& p, const PyGrid& g, unsigned seed) {
            std::vector<std::vector<std::vector<double>>> out;
            for (auto& s : default_seed_states(p, g.p, seed)) out.push_back(from_state(s));
            return out;
        },
        py::arg("params"), py::arg("grid"), py::arg("seed") = 1u);

    py::class_<LimitStructure>(m, "LimitStructure")
        .def_readonly("exterior_index", &LimitStructure::exterior_index)
        .def_readonly("ball_index", &LimitStructure::ball_index)
        .def_readonly("interface_radius", &LimitStructure::interface_radius)
        .def_readonly("level", &LimitStructure::level)
        .def_property_readonly("assembled",
                               [](const LimitStructure& l) { return from_state(l.assembled); });
    m.def(
        "minimize_limit_problem",
        [](const Params& p, const PyGrid& g) { return minimize_limit_problem(p, g.p); },
        py::arg("params"), py::arg("grid"));

    m.def(
        "build_disjoint_test_state",
        [](const Params& p, double R, const PyGrid& g) {
            auto fam = build_disjoint_test_state(p, R, g.p);
            return py::make_tuple(from_state(fam.state), fam.radial_energy,
                                  fam.translated_energy);
        },
        py::arg("params"), py::arg("R"), py::arg("grid"));
    m.def(
        "overlap_mass",
        [](const PyGrid& g, const std::vector<std::vector<double>>& comps, int i, int j,
           double kq) { return overlap_mass(to_state(g.p, comps), i, j, kq); },
        py::arg("grid"), py::arg("components"), py::arg("i"), py::arg("j"), py::arg("kq"));

    m.def(
        "run_experiment_text",
        [](const std::string& config_text, const std::string& experiment,
           const std::string& out_dir) {
            auto cfg = ExperimentConfig::from_text(config_text, experiment);
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            return run_experiment(cfg);
        },
        py::arg("config_text"), py::arg("experiment"), py::arg("out_dir") = "");

    m.attr("__version__") = "0.1.0";
}
