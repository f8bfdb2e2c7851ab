// Acceptance criteria for the core library. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Tolerances are pinned below.

#include "kerrnet/dynamics.hpp"
#include "kerrnet/measures.hpp"
#include "kerrnet/spectral.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace kerrnet;
using std::numbers::pi;

namespace {

// Pinned tolerances and limits.
constexpr double kMesResidualTol = 1e-10;
constexpr double kMesAmplitudeTol = 1e-12;
constexpr double kMesRuntime = 1.0;
constexpr double kAlcWindow = 0.05;
constexpr double kAlcRuntime = 10.0;
constexpr double kNonAdiabaticTarget = 0.98;
constexpr double kNonAdiabaticTol = 0.02;
constexpr double kNonAdiabaticRuntime = 1800.0;
constexpr double kGammaCLo = 0.01;
constexpr double kGammaCHi = 0.04;
constexpr double kGammaCRuntime = 1800.0;
constexpr double kLossWindow = 5.0;
constexpr double kLossStrictAt = 1.0;
constexpr double kFlipTol = 1e-8;
constexpr double kFlipStandardBelow = 0.9;
constexpr double kNgTol = 1e-8;
constexpr double kPairTol = 1e-10;
constexpr double kPiTangleTol = 1e-8;
constexpr double kOracleTol = 1e-8;
constexpr double kInvariantRuntime = 300.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

int failures = 0;

void criterion(const std::string& name, const std::function<Outcome()>& body, double runtime_limit = 0.0) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (runtime_limit > 0.0 && secs > runtime_limit) {
        o.pass = false;
        o.detail += fmt("; runtime over limit %.0f s", runtime_limit);
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << fmt(" [%.2f s]", secs) << std::endl;
}

// ---------------------------------------------------------------------------

Outcome mes_zero_energy() {
    NetworkParams p = NetworkParams::balanced(1.0);
    p.phi_a = p.phi_b = pi / 2;
    const auto b = p.make_basis(CapKind::exact);
    const auto mes = mes_state(b, 3, 2);
    const double residual = (build_hamiltonian(p, b, pi / 2, pi / 2).matrix() * mes.amplitudes()).norm();
    int count = 0;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < mes.amplitudes().size(); ++i) {
        const cplx a = mes.amplitudes()(i);
        if (std::abs(a) > 1e-6) {
            ++count;
            worst = std::max(worst, std::abs(a - 1.0 / std::sqrt(6.0)));
        }
    }
    const bool ok = residual <= kMesResidualTol && count == 6 && worst <= kMesAmplitudeTol;
    return {ok, fmt("||H|MES>|| = %.3e", residual) + ", nonzero amplitudes = " + std::to_string(count) +
                    fmt(", max |a - 1/sqrt6| = %.3e", worst)};
}

Outcome alc_positions() {
    const NetworkParams p = NetworkParams::balanced(1.0);
    const auto sweep = eigen_sweep(p, uniform_grid(0.0, pi, 721), 2);
    const auto alcs = detect_alc(sweep, 0);
    auto near = [&](double target) {
        for (const auto& a : alcs)
            if (std::abs(a.phi_star - target) <= kAlcWindow) return true;
        return false;
    };
    std::ostringstream os;
    os << "gap minima at phi/pi =";
    for (const auto& a : alcs) os << fmt(" %.4f", a.phi_star / pi);
    os << "; expected 1/3 and 5/6 within 0.05 rad";
    return {near(pi / 3) && near(5 * pi / 6), os.str()};
}

Outcome non_adiabatic() {
    const NetworkParams p = NetworkParams::balanced(1.0 / 16.0);
    PassageSettings s;
    const double peak = passage_peak_fidelity(p, NoiseSpec{}, 3e-4, s);
    return {std::abs(peak - kNonAdiabaticTarget) <= kNonAdiabaticTol,
            fmt("peak fidelity %.6f (target 0.98 +/- 0.02)", peak)};
}

Outcome gamma_critical() {
    const NetworkParams p = NetworkParams::balanced(1.0);
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.0025 * i);
    GammaCriticalSettings s;
    const auto found = find_gamma_critical(p, 0.15, grid, s);
    std::ostringstream os;
    os << "probes:";
    for (const auto& pr : found.probes) os << fmt(" %.4f", pr.gamma) << (pr.has_interior_maximum ? "(max)" : "(none)");
    if (!found.gamma_c) return {false, "no critical rate on the grid; " + os.str()};
    const double g = *found.gamma_c;
    return {g >= kGammaCLo && g <= kGammaCHi, fmt("gamma_c = %.4f J; ", g) + os.str()};
}

std::pair<Trajectory, Trajectory> robustness_pair(double k, bool loss, double t_max) {
    const NetworkParams p = NetworkParams::balanced(k);
    const auto b = p.make_basis(loss ? CapKind::at_most : CapKind::exact);
    const auto mes = mes_state(b, 3, 2);
    Observers obs;
    obs.target = mes;
    obs.cadence = 100;
    NoiseSpec standard;
    standard.kind = loss ? NoiseKind::single_mode_loss : NoiseKind::phase_flip_single;
    standard.gamma_a = standard.gamma_b = 1.0;
    NoiseSpec coupled;
    coupled.kind = loss ? NoiseKind::coupled_two_mode_loss : NoiseKind::phase_flip_coupled;
    coupled.gamma = 1.0;
    const RampSchedule hold{0.0, pi / 2, pi / 2};
    const auto rho0 = DensityMatrix::from_pure(mes);
    return {evolve_lindblad(p, hold, rho0, standard, 5e-4, t_max, obs).trajectory,
            evolve_lindblad(p, hold, rho0, coupled, 5e-4, t_max, obs).trajectory};
}

Outcome loss_ordering() {
    const auto [standard, coupled] = robustness_pair(0.5, true, kLossWindow);
    bool dominates = true;
    double strict_gap = -1.0;
    for (std::size_t i = 0; i < standard.size(); ++i) {
        dominates = dominates && coupled.fidelity[i] >= standard.fidelity[i];
        if (std::abs(standard.t[i] - kLossStrictAt) < 1e-9) strict_gap = coupled.fidelity[i] - standard.fidelity[i];
    }
    return {dominates && strict_gap > 0.0,
            std::string(dominates ? "coupled >= standard at every sample" : "ordering violated") +
                fmt("; F_coupled - F_standard at t=1 is %.4e", strict_gap) +
                fmt(", at t=5: %.4f", coupled.fidelity.back()) + fmt(" vs %.4f", standard.fidelity.back())};
}

Outcome phase_flip_protection() {
    const auto [standard, coupled] = robustness_pair(1.0, false, 10.0);
    double worst = 0.0;
    for (double f : coupled.fidelity) worst = std::max(worst, std::abs(f - 1.0));
    double low = 1.0;
    for (double f : standard.fidelity) low = std::min(low, f);
    return {worst <= kFlipTol && low < kFlipStandardBelow,
            fmt("max |F_coupled - 1| = %.3e", worst) + fmt(", min F_standard = %.4f", low)};
}

// Brute-force partial-transpose negativity on the full grid, independent of the library reductions.
double dense_species_negativity(const PureState& psi) {
    const CVector full = embed(psi);
    const int d = psi.basis()->local_dim();
    const int half = psi.basis()->n_cavities();
    Eigen::Index da = 1;
    for (int i = 0; i < half; ++i) da *= d;
    const Eigen::Index db = da;
    CMatrix pt(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < db; ++j)
            for (Eigen::Index k = 0; k < da; ++k)
                for (Eigen::Index l = 0; l < db; ++l)
                    pt(i * db + j, k * db + l) = full(i * db + l) * std::conj(full(k * db + j));
    Eigen::SelfAdjointEigenSolver<CMatrix> s(pt, Eigen::EigenvaluesOnly);
    double neg = 0.0;
    for (Eigen::Index i = 0; i < s.eigenvalues().size(); ++i) neg += std::max(0.0, -s.eigenvalues()(i));
    return neg;
}

Outcome mes_entanglement() {
    const auto b = NetworkParams{}.make_basis(CapKind::exact);
    const auto mes = mes_state(b, 3, 2);
    const double ng = global_negativity(mes);
    const double dense = dense_species_negativity(mes);
    const double pair = pairwise_negativity(mes, {0, 0}, {0, 1});
    const double tangle = pi_tangle(mes, 0);
    const int schmidt = schmidt_number(mes, Partition::species_split(*b));
    const bool ok = std::abs(ng - 2.5) <= kNgTol && std::abs(dense - 2.5) <= kNgTol && pair <= kPairTol &&
                    std::abs(tangle) <= kPiTangleTol && schmidt == 6;
    return {ok, fmt("N_G = %.12f", ng) + fmt(" (dense %.12f)", dense) + fmt(", N_a1a2 = %.2e", pair) +
                    fmt(", pi-tangle = %.2e", tangle) + ", Schmidt number = " + std::to_string(schmidt)};
}

CMatrix seeded_density(std::mt19937& rng, Eigen::Index n) {
    std::normal_distribution<double> g;
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx{g(rng), g(rng)};
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

Outcome oracle_equivalence() {
    NetworkParams p = NetworkParams::balanced(1.0);
    p.n_cavities = 2;
    p.n_max = 1;
    const auto b = p.make_basis(CapKind::at_most);
    std::mt19937 rng(2024);
    const DensityMatrix rho0(b, seeded_density(rng, static_cast<Eigen::Index>(b->dimension())));
    double worst = 0.0;
    for (auto kind : {NoiseKind::single_mode_loss, NoiseKind::coupled_two_mode_loss, NoiseKind::phase_flip_single,
                      NoiseKind::phase_flip_coupled}) {
        NoiseSpec n;
        n.kind = kind;
        n.gamma_a = n.gamma_b = n.gamma = 1.0;
        const auto g = superoperator_oracle(p, b, pi / 2, n);
        Observers obs;
        obs.cadence = 100;
        for (double t : {0.1, 1.0, 5.0}) {
            const auto rk = evolve_lindblad(p, RampSchedule{0.0, pi / 2, pi / 2}, rho0, n, 5e-4, t, obs);
            const auto exact = evolve_exact(g, rho0, t);
            worst = std::max(worst, (rk.final_state.matrix() - exact.matrix()).cwiseAbs().maxCoeff());
        }
    }
    return {worst <= kOracleTol,
            "dimension " + std::to_string(b->dimension()) + fmt(", max entrywise deviation %.3e", worst)};
}

Outcome invariant_suite() {
    std::vector<std::string> broken;
    std::mt19937 rng(77);
    const NetworkParams p = NetworkParams::balanced(1.0);

    // Norm conservation and energy at fixed phase.
    {
        const auto b = p.make_basis(CapKind::exact);
        std::normal_distribution<double> g;
        CVector v(36);
        for (auto& x : v) x = cplx{g(rng), g(rng)};
        const PureState psi(b, v.normalized());
        Observers obs;
        obs.cadence = 1000;
        const auto run = evolve_closed(p, RampSchedule{0.0, 0.7, std::nullopt}, psi, 1e-3, 10.0, obs);
        for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
            if (std::abs(run.trajectory.trace[i] - 1.0) > 1e-10 * std::max(1.0, run.trajectory.t[i]))
                broken.push_back("norm");
            if (std::abs(run.trajectory.energy[i] - run.trajectory.energy[0]) > 1e-8) broken.push_back("energy");
        }
    }
    // Trace, Hermiticity and positivity under each channel.
    {
        const auto b = p.make_basis(CapKind::at_most);
        const DensityMatrix rho0(b, seeded_density(rng, 100));
        for (auto kind : {NoiseKind::single_mode_loss, NoiseKind::coupled_two_mode_loss,
                          NoiseKind::phase_flip_single, NoiseKind::phase_flip_coupled}) {
            NoiseSpec n;
            n.kind = kind;
            n.gamma_a = n.gamma_b = n.gamma = 0.5;
            Observers obs;
            obs.cadence = 200;
            const auto run = evolve_lindblad(p, RampSchedule{0.3, 0.0, pi / 2}, rho0, n, 5e-4, 2.0, obs);
            for (double tr : run.trajectory.trace)
                if (std::abs(tr - 1.0) > 1e-8) broken.push_back("trace " + to_string(kind));
            if (run.final_state.hermiticity_error() != 0.0) broken.push_back("hermiticity " + to_string(kind));
            if (run.final_state.min_eigenvalue() < -1e-6) broken.push_back("positivity " + to_string(kind));
        }
    }
    // Fourth-order convergence under dt halving.
    {
        const auto psi0 = ground_state(p, 0.0);
        Observers obs;
        obs.cadence = 1000000;
        auto final = [&](double dt) {
            return evolve_closed(p, RampSchedule{0.5, 0.0, pi / 2}, psi0, dt, 4.0, obs).final_state.amplitudes();
        };
        const CVector c = final(0.04), m = final(0.02), f = final(0.01);
        const double ratio = (c - m).norm() / (m - f).norm();
        if (ratio < 12.0 || ratio > 20.0) broken.push_back(fmt("dt halving ratio %.2f", ratio));
    }
    // Local-unitary invariance of negativity: local phases on every site-mode, random mixed state.
    {
        const auto b = p.make_basis(CapKind::at_most);
        const DensityMatrix rho(b, seeded_density(rng, 100));
        const Partition part = Partition::species_split(*b);
        std::uniform_real_distribution<double> ang(-pi, pi);
        SparseOperator u = SparseOperator::identity(b);
        for (const auto& sm : b->all_site_modes()) {
            const double t1 = ang(rng), t2 = ang(rng);
            u = compose(u, local_diagonal_op(b, sm, [&](int n) { return std::polar(1.0, n == 1 ? t1 : n * t2); }));
        }
        const CMatrix U = u.dense();
        const double before = global_negativity(rho);
        const double after = global_negativity(DensityMatrix(b, U * rho.matrix() * U.adjoint()));
        if (std::abs(before - after) > 1e-9) broken.push_back("local-unitary invariance");
    }
    std::string detail = broken.empty() ? "norm, energy, trace, Hermiticity, positivity, dt halving, local unitaries"
                                        : "broken:";
    for (const auto& s : broken) detail += " " + s + ";";
    return {broken.empty(), detail};
}

}  // namespace

int main() {
    std::cout << "kerrnet acceptance " << KERRNET_VERSION << std::endl;
    criterion("mes-zero-energy", mes_zero_energy, kMesRuntime);
    criterion("spectrum-alc", alc_positions, kAlcRuntime);
    criterion("mes-entanglement", mes_entanglement);
    criterion("oracle-equivalence", oracle_equivalence);
    criterion("phase-flip-protection", phase_flip_protection);
    criterion("loss-reservoir-ordering", loss_ordering);
    criterion("invariant-suite", invariant_suite, kInvariantRuntime);
    criterion("gamma-critical", gamma_critical, kGammaCRuntime);
    criterion("non-adiabatic-preparation", non_adiabatic, kNonAdiabaticRuntime);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
