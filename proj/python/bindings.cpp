#include "kerrnet/config.hpp"
#include "kerrnet/dynamics.hpp"
#include "kerrnet/measures.hpp"
#include "kerrnet/scenarios.hpp"
#include "kerrnet/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace kerrnet;

namespace {

CapKind cap_kind(const std::string& name) {
    if (name == "exact") return CapKind::exact;
    if (name == "at_most") return CapKind::at_most;
    throw ContractError("basis kind must be 'exact' or 'at_most'");
}

PureState state_from(const NetworkParams& p, const std::string& kind, const CVector& amplitudes) {
    return {p.make_basis(cap_kind(kind)), amplitudes};
}

NoiseSpec noise_from(const std::string& kind, double gamma) {
    NoiseSpec n;
    n.kind = noise_kind_from_string(kind);
    n.gamma_a = n.gamma_b = n.gamma = gamma;
    return n;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kerr cavity network: Hamiltonians, spectra, passages and MES entanglement";
    m.attr("__version__") = KERRNET_VERSION;
    m.attr("SCHEMA_VERSION") = kSchemaVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_MemoryError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::enum_<Topology>(m, "Topology")
        .value("open_chain", Topology::open_chain)
        .value("periodic", Topology::periodic);

    py::class_<NetworkParams>(m, "NetworkParams")
        .def(py::init<>())
        .def_static("balanced", &NetworkParams::balanced, py::arg("k"))
        .def_readwrite("n_cavities", &NetworkParams::n_cavities)
        .def_readwrite("hopping", &NetworkParams::hopping)
        .def_readwrite("phi_a", &NetworkParams::phi_a)
        .def_readwrite("phi_b", &NetworkParams::phi_b)
        .def_readwrite("k_a", &NetworkParams::k_a)
        .def_readwrite("k_b", &NetworkParams::k_b)
        .def_readwrite("k_int", &NetworkParams::k_int)
        .def_readwrite("topology", &NetworkParams::topology)
        .def_readwrite("n_max", &NetworkParams::n_max)
        .def_readwrite("species_total", &NetworkParams::species_total)
        .def("validate", &NetworkParams::validate)
        .def("bond_count", &NetworkParams::bond_count)
        .def("__repr__", [](const NetworkParams& p) {
            return "NetworkParams(n_cavities=" + std::to_string(p.n_cavities) + ", k_a=" + std::to_string(p.k_a) +
                   ", k_b=" + std::to_string(p.k_b) + ", k_int=" + std::to_string(p.k_int) + ")";
        });

    m.def(
        "basis_occupations",
        [](const NetworkParams& p, const std::string& kind) {
            const auto b = p.make_basis(cap_kind(kind));
            std::vector<std::vector<int>> out;
            for (std::size_t i = 0; i < b->dimension(); ++i) {
                const auto occ = b->occupation(i);
                out.emplace_back(occ.begin(), occ.end());
            }
            return out;
        },
        py::arg("params"), py::arg("kind") = "exact",
        "Occupation vectors of the basis, species-major (a-modes then b-modes).");

    m.def(
        "hamiltonian",
        [](const NetworkParams& p, std::optional<double> phi_a, std::optional<double> phi_b, const std::string& kind) {
            const auto b = p.make_basis(cap_kind(kind));
            return build_hamiltonian(p, b, phi_a.value_or(p.phi_a), phi_b.value_or(p.phi_b)).dense();
        },
        py::arg("params"), py::arg("phi_a") = py::none(), py::arg("phi_b") = py::none(), py::arg("kind") = "exact",
        "Dense Hamiltonian; phases default to those stored in params.");

    m.def(
        "mes_state",
        [](const NetworkParams& p, int mes_m, const std::string& kind) {
            return mes_state(p.make_basis(cap_kind(kind)), mes_m, p.species_total).amplitudes();
        },
        py::arg("params"), py::arg("m") = 3, py::arg("kind") = "exact");

    m.def(
        "mes_residuals",
        [](const NetworkParams& p, int mes_m) {
            const auto r = verify_mes_conditions(p, mes_m);
            return py::dict(py::arg("hop") = r.hop_residual, py::arg("int") = r.int_residual,
                            py::arg("total") = r.total_residual);
        },
        py::arg("params"), py::arg("m") = 3);

    m.def("mes_phase_sum", &mes_phase_sum, py::arg("m"), py::arg("n_cavities"));

    m.def(
        "eigen_sweep",
        [](const NetworkParams& p, const std::vector<double>& grid, int n_levels) {
            return eigen_sweep(p, grid, n_levels).levels;
        },
        py::arg("params"), py::arg("phi_grid"), py::arg("n_levels") = 0,
        "Eigenvalues of H(phi, phi) per grid point, one row per phase.");

    m.def(
        "detect_alc",
        [](const NetworkParams& p, const std::vector<double>& grid, int lower) {
            py::list out;
            for (const auto& a : detect_alc(eigen_sweep(p, grid, lower + 2), lower)) {
                out.append(py::dict(py::arg("phi_star") = a.phi_star, py::arg("gap") = a.gap,
                                    py::arg("grid_index") = a.grid_index));
            }
            return out;
        },
        py::arg("params"), py::arg("phi_grid"), py::arg("lower_level") = 0);

    m.def(
        "global_negativity",
        [](const NetworkParams& p, const CVector& psi, const std::string& kind) {
            return global_negativity(state_from(p, kind, psi));
        },
        py::arg("params"), py::arg("psi"), py::arg("kind") = "exact");

    m.def(
        "pairwise_negativity",
        [](const NetworkParams& p, const CVector& psi, std::pair<int, int> i, std::pair<int, int> j,
           const std::string& kind) {
            return pairwise_negativity(state_from(p, kind, psi), {i.first, i.second}, {j.first, j.second});
        },
        py::arg("params"), py::arg("psi"), py::arg("i"), py::arg("j"), py::arg("kind") = "exact",
        "Site-modes are (mode, cavity) pairs; mode 0 is a, mode 1 is b.");

    m.def(
        "pi_tangle",
        [](const NetworkParams& p, const CVector& psi, int species, const std::string& kind) {
            return pi_tangle(state_from(p, kind, psi), species);
        },
        py::arg("params"), py::arg("psi"), py::arg("species") = 0, py::arg("kind") = "exact");

    m.def(
        "schmidt_number",
        [](const NetworkParams& p, const CVector& psi, const std::string& kind) {
            const auto s = state_from(p, kind, psi);
            return schmidt_number(s, Partition::species_split(*s.basis()));
        },
        py::arg("params"), py::arg("psi"), py::arg("kind") = "exact");

    m.def(
        "passage_peak_fidelity",
        [](const NetworkParams& p, double alpha, const std::string& noise, double gamma, double dt_closed,
           double dt_open) {
            PassageSettings s;
            s.dt_closed = dt_closed;
            s.dt_open = dt_open;
            return passage_peak_fidelity(p, noise_from(noise, gamma), alpha, s);
        },
        py::arg("params"), py::arg("alpha"), py::arg("noise") = "none", py::arg("gamma") = 0.0,
        py::arg("dt_closed") = 1e-3, py::arg("dt_open") = 5e-4, py::call_guard<py::gil_scoped_release>());

    m.def("preset_names", &preset_names);
    m.def(
        "preset_text",
        [](const std::string& name) {
            const auto t = preset_text(name);
            if (!t) throw ContractError("unknown preset '" + name + "'");
            return *t;
        },
        py::arg("name"));

    m.def(
        "resolve_config",
        [](const std::string& text, const std::vector<std::string>& overrides) {
            return parse_config(text, "<python>", overrides).to_json().dump();
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
        "Validated, fully resolved config as a JSON string.");

    m.def(
        "run",
        [](const std::string& subcommand, const std::string& config_text, const std::vector<std::string>& overrides,
           const std::filesystem::path& out_dir) {
            const auto cfg = parse_config(config_text, "<python>", overrides);
            ScenarioResult result;
            {
                py::gil_scoped_release release;
                result = run_scenario(subcommand, cfg);
            }
            return write_outputs(result, cfg, out_dir);
        },
        py::arg("subcommand"), py::arg("config_text") = "{}", py::arg("overrides") = std::vector<std::string>{},
        py::arg("out_dir") = "out", "Runs a scenario and writes CSV tables with JSON sidecars; returns the paths.");
}
