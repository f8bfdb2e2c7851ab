#include "kerrnet/dynamics.hpp"

#include "kerrnet/errors.hpp"
#include "kerrnet/parallel.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kerrnet {

namespace {

constexpr cplx kI{0.0, 1.0};

std::size_t step_count(double dt, double t_max) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ContractError("integrator.dt must be positive and finite");
    }
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
        throw ContractError("integrator.t_max must be finite and >= 0");
    }
    return static_cast<std::size_t>(std::ceil(t_max / dt - 1e-9));
}

void check_cadence(const Observers& obs) {
    if (obs.cadence < 1) {
        throw ContractError("observer cadence must be >= 1");
    }
}

std::string at_time(double t) { return " at t = " + std::to_string(t); }

bool is_silent(const NoiseSpec& noise) {
    switch (noise.kind) {
        case NoiseKind::none: return true;
        case NoiseKind::single_mode_loss:
        case NoiseKind::phase_flip_single: return noise.gamma_a == 0.0 && noise.gamma_b == 0.0;
        case NoiseKind::coupled_two_mode_loss:
        case NoiseKind::phase_flip_coupled: return noise.gamma == 0.0;
    }
    return false;
}

}  // namespace

void RampSchedule::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ContractError("ramp.alpha must be finite and >= 0");
    }
    if (!std::isfinite(phi_start)) {
        throw ContractError("ramp.phi_start must be finite");
    }
    if (phi_target && (!std::isfinite(*phi_target) || *phi_target < phi_start)) {
        throw ContractError("ramp.phi_target must be finite and >= phi_start");
    }
}

double RampSchedule::phi_at(double t) const {
    const double phi = phi_start + alpha * t;
    return phi_target ? std::min(phi, *phi_target) : phi;
}

double RampSchedule::arrival_time() const {
    if (!phi_target || alpha == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return (*phi_target - phi_start) / alpha;
}

double Trajectory::peak_fidelity() const {
    if (fidelity.empty()) {
        throw ContractError("trajectory has no fidelity record");
    }
    return *std::max_element(fidelity.begin(), fidelity.end());
}

// ---------------------------------------------------------------------------
// Closed dynamics

ClosedRun evolve_closed(const NetworkParams& params, const RampSchedule& ramp, const PureState& psi0, double dt,
                        double t_max, const Observers& observers) {
    ramp.validate();
    check_cadence(observers);
    const std::size_t steps = step_count(dt, t_max);
    if (std::abs(psi0.norm() - 1.0) > PureState::kNormTolerance) {
        throw ContractError("evolve_closed: initial state is not normalized");
    }
    const BasisPtr& basis = psi0.basis();
    const auto terms = HamiltonianTerms::build(params, basis);
    std::optional<PureState> target;
    if (observers.target) {
        target = observers.target->basis()->same_as(*basis) ? *observers.target : transfer(*observers.target, basis);
    }

    Trajectory traj;
    for (const auto& [name, fn] : observers.pure) {
        traj.extra[name];
    }
    for (const auto& [name, fn] : observers.mixed) {
        traj.extra[name];
    }
    CVector psi = psi0.amplitudes();
    CVector hpsi(psi.size());

    auto record = [&](double t) {
        const double phi = ramp.phi_at(t);
        terms.apply(phi, phi, psi, hpsi);
        traj.t.push_back(t);
        traj.phi.push_back(phi);
        traj.energy.push_back(psi.dot(hpsi).real());
        traj.trace.push_back(psi.squaredNorm());
        traj.purity.push_back(1.0);
        if (target) {
            traj.fidelity.push_back(std::clamp(std::norm(target->amplitudes().dot(psi)), 0.0, 1.0));
        }
        if (!observers.pure.empty() || !observers.mixed.empty()) {
            const PureState state(basis, psi, Normalization::allow_unnormalized);
            for (const auto& [name, fn] : observers.pure) {
                traj.extra[name].push_back(fn(state));
            }
            if (!observers.mixed.empty()) {
                const auto rho = DensityMatrix::from_pure(state);
                for (const auto& [name, fn] : observers.mixed) {
                    traj.extra[name].push_back(fn(rho));
                }
            }
        }
    };

    CVector k1(psi.size()), k2(psi.size()), k3(psi.size()), k4(psi.size()), tmp(psi.size());
    record(0.0);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const double p1 = ramp.phi_at(t);
        const double p2 = ramp.phi_at(t + 0.5 * dt);
        const double p3 = ramp.phi_at(t + dt);

        terms.apply(p1, p1, psi, k1);
        k1 *= -kI;
        tmp = psi + (0.5 * dt) * k1;
        terms.apply(p2, p2, tmp, k2);
        k2 *= -kI;
        tmp = psi + (0.5 * dt) * k2;
        terms.apply(p2, p2, tmp, k3);
        k3 *= -kI;
        tmp = psi + dt * k3;
        terms.apply(p3, p3, tmp, k4);
        k4 *= -kI;
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double norm = psi.norm();
        const double drift = std::abs(norm - 1.0);
        if (!(drift <= kMaxNormDrift)) {
            throw StepSizeError("evolve_closed: norm drift " + std::to_string(drift) + at_time(t + dt) +
                                " exceeds 1e-6; reduce dt");
        }
        if (drift > kRenormalizeDrift) {
            psi /= norm;
        }
        const std::size_t done = n + 1;
        if (done % static_cast<std::size_t>(observers.cadence) == 0 || done == steps) {
            record(static_cast<double>(done) * dt);
        }
    }
    return {std::move(traj), PureState(basis, psi.normalized())};
}

// ---------------------------------------------------------------------------
// Open dynamics

LindbladRhs::LindbladRhs(const NetworkParams& params, const NoiseSpec& noise, const BasisPtr& basis)
    : terms_(HamiltonianTerms::build(params, basis)) {
    for (auto& j : jump_operators(noise, basis)) {
        if (j.rate > 0.0) {
            jumps_.push_back(std::move(j));
        }
    }
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    damping_ = CSparse(d, d);
    for (const auto& j : jumps_) {
        damping_ += CSparse(j.op.matrix().adjoint() * j.op.matrix()) * cplx{0.0, -0.5 * j.rate};
    }
    damping_.makeCompressed();
}

void LindbladRhs::operator()(double phi, const CMatrix& rho, CMatrix& out) const {
    // X = H_eff rho with H_eff = H - (i/2) sum gamma L^dag L; then
    // L[rho] = -i X + (-i X)^dag + sum gamma L rho L^dag.
    terms_.apply(phi, phi, rho, scratch_);
    scratch_.noalias() += damping_ * rho;
    scratch_ *= -kI;
    out = scratch_ + scratch_.adjoint();
    for (const auto& j : jumps_) {
        scratch_.noalias() = j.op.matrix() * rho;
        scratch2_.noalias() = j.op.matrix() * scratch_.adjoint();
        out.noalias() += j.rate * scratch2_;
    }
}

OpenRun evolve_lindblad(const NetworkParams& params, const RampSchedule& ramp, const DensityMatrix& rho0,
                        const NoiseSpec& noise, double dt, double t_max, const Observers& observers) {
    ramp.validate();
    check_cadence(observers);
    rho0.validate();
    if (!observers.pure.empty()) {
        throw ContractError("evolve_lindblad: pure-state observers are not available for mixed states");
    }
    const std::size_t steps = step_count(dt, t_max);
    const BasisPtr& basis = rho0.basis();
    const LindbladRhs rhs(params, noise, basis);
    std::optional<PureState> target;
    if (observers.target) {
        target = observers.target->basis()->same_as(*basis) ? *observers.target : transfer(*observers.target, basis);
    }

    Trajectory traj;
    for (const auto& [name, fn] : observers.mixed) {
        traj.extra[name];
    }
    CMatrix rho = rho0.matrix();
    const double trace0 = rho.trace().real();
    CMatrix hrho(rho.rows(), rho.cols());

    auto record = [&](double t) {
        const double phi = ramp.phi_at(t);
        rhs.hamiltonian().apply(phi, phi, rho, hrho);
        traj.t.push_back(t);
        traj.phi.push_back(phi);
        traj.energy.push_back(hrho.trace().real());
        traj.trace.push_back(rho.trace().real());
        traj.purity.push_back(rho.cwiseAbs2().sum());
        if (target) {
            const auto& v = target->amplitudes();
            traj.fidelity.push_back(std::clamp(v.dot(rho * v).real(), 0.0, 1.0));
        }
        if (observers.check_positivity) {
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho, Eigen::EigenvaluesOnly);
            const double low = solver.eigenvalues().minCoeff();
            if (low < kPositivityBound) {
                throw PositivityError("evolve_lindblad: eigenvalue " + std::to_string(low) + at_time(t) +
                                      " below -1e-6");
            }
        }
        if (!observers.mixed.empty()) {
            const DensityMatrix state(basis, rho, Validation::skip);
            for (const auto& [name, fn] : observers.mixed) {
                traj.extra[name].push_back(fn(state));
            }
        }
    };

    const auto d = rho.rows();
    CMatrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);
    record(0.0);
    for (std::size_t n = 0; n < steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        const double p1 = ramp.phi_at(t);
        const double p2 = ramp.phi_at(t + 0.5 * dt);
        const double p3 = ramp.phi_at(t + dt);

        rhs(p1, rho, k1);
        tmp = rho + (0.5 * dt) * k1;
        rhs(p2, tmp, k2);
        tmp = rho + (0.5 * dt) * k2;
        rhs(p2, tmp, k3);
        tmp = rho + dt * k3;
        rhs(p3, tmp, k4);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tmp = 0.5 * (rho + rho.adjoint());
        rho.swap(tmp);

        const double drift = std::abs(rho.trace().real() - trace0);
        if (!(drift <= kMaxTraceDrift)) {
            throw StepSizeError("evolve_lindblad: trace drift " + std::to_string(drift) + at_time(t + dt) +
                                " exceeds 1e-6; reduce dt");
        }
        const std::size_t done = n + 1;
        if (done % static_cast<std::size_t>(observers.cadence) == 0 || done == steps) {
            record(static_cast<double>(done) * dt);
        }
    }
    return {std::move(traj), DensityMatrix(basis, std::move(rho), Validation::skip)};
}

// ---------------------------------------------------------------------------
// Oracle

Superoperator superoperator_oracle(const NetworkParams& params, const BasisPtr& basis, double phi,
                                   const NoiseSpec& noise, std::size_t dimension_cap) {
    if (basis->dimension() > dimension_cap) {
        throw CapacityError("superoperator_oracle: basis dimension " + std::to_string(basis->dimension()) +
                            " exceeds the oracle cap of " + std::to_string(dimension_cap));
    }
    const LindbladRhs rhs(params, noise, basis);
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    CMatrix heff = rhs.hamiltonian().assemble(phi, phi).dense();
    for (const auto& j : rhs.jumps()) {
        const CMatrix l = j.op.dense();
        heff -= cplx{0.0, 0.5 * j.rate} * (l.adjoint() * l);
    }
    const CMatrix id = CMatrix::Identity(d, d);
    CMatrix g = -kI * CMatrix(Eigen::kroneckerProduct(id, heff)) + kI * CMatrix(Eigen::kroneckerProduct(heff.conjugate(), id));
    for (const auto& j : rhs.jumps()) {
        const CMatrix l = j.op.dense();
        g += j.rate * CMatrix(Eigen::kroneckerProduct(l.conjugate(), l));
    }
    return {basis, std::move(g)};
}

DensityMatrix evolve_exact(const Superoperator& generator, const DensityMatrix& rho0, double t) {
    require_same_basis(generator.basis, rho0.basis(), "evolve_exact");
    const auto d = rho0.matrix().rows();
    const CMatrix propagator = (generator.generator * t).exp();
    const CVector v = propagator * Eigen::Map<const CVector>(rho0.matrix().data(), d * d);
    CMatrix rho = Eigen::Map<const CMatrix>(v.data(), d, d);
    return {rho0.basis(), std::move(rho), Validation::skip};
}

// ---------------------------------------------------------------------------
// Passages and scans

PureState ground_state(const NetworkParams& params, double phi) {
    const auto basis = params.make_basis(CapKind::exact);
    const CMatrix h = build_hamiltonian(params, basis, phi, phi).dense();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("ground_state: eigensolver failed");
    }
    CVector v = solver.eigenvectors().col(0);
    // Fix the global phase: largest component real and positive.
    Eigen::Index big = 0;
    v.cwiseAbs().maxCoeff(&big);
    v *= std::conj(v(big)) / std::abs(v(big));
    return {basis, v.normalized()};
}

double passage_peak_fidelity(const NetworkParams& params, const NoiseSpec& noise, double alpha,
                             const PassageSettings& settings) {
    if (!(alpha > 0.0)) {
        throw ContractError("passage: alpha must be > 0");
    }
    const auto psi0 = ground_state(params, 0.0);
    const RampSchedule ramp{alpha, 0.0, settings.phi_target};
    const double t_max = ramp.arrival_time() + settings.hold_time;
    Observers obs;
    obs.target = mes_state(psi0.basis(), settings.mes_m, params.species_total);
    obs.cadence = settings.cadence;
    try {
        if (is_silent(noise)) {
            return evolve_closed(params, ramp, psi0, settings.dt_closed, t_max, obs).trajectory.peak_fidelity();
        }
        const auto open_basis = params.make_basis(CapKind::at_most);
        const auto rho0 = DensityMatrix::from_pure(transfer(psi0, open_basis));
        return evolve_lindblad(params, ramp, rho0, noise, settings.dt_open, t_max, obs).trajectory.peak_fidelity();
    } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (alpha = " + std::to_string(alpha) + ")");
    }
}

AlphaScan scan_alpha(const NetworkParams& params, const NoiseSpec& noise, const std::vector<double>& alpha_grid,
                     const PassageSettings& settings) {
    if (alpha_grid.empty()) {
        throw ContractError("scan_alpha: alpha grid is empty");
    }
    AlphaScan scan;
    scan.rows.resize(alpha_grid.size());
    parallel_for(
        alpha_grid.size(),
        [&](std::size_t i) {
            scan.rows[i] = {alpha_grid[i], passage_peak_fidelity(params, noise, alpha_grid[i], settings)};
        },
        settings.workers);
    const AlphaScanRow* best = &scan.rows.front();
    for (const auto& row : scan.rows) {
        if (row.peak_fidelity > best->peak_fidelity ||
            (row.peak_fidelity == best->peak_fidelity && row.alpha < best->alpha)) {
            best = &row;
        }
    }
    scan.alpha_opt = best->alpha;
    scan.peak_opt = best->peak_fidelity;
    return scan;
}

bool has_interior_maximum(const std::vector<double>& phi, const std::vector<double>& f, double lo, double hi) {
    if (phi.size() != f.size()) {
        throw ContractError("has_interior_maximum: series lengths differ");
    }
    auto inside = [&](std::size_t i) { return phi[i] >= lo && phi[i] <= hi; };
    for (std::size_t i = 1; i + 1 < f.size(); ++i) {
        if (inside(i - 1) && inside(i) && inside(i + 1) && f[i] > f[i - 1] && f[i] >= f[i + 1]) {
            return true;
        }
    }
    return false;
}

GammaProbe probe_gamma(const NetworkParams& params, double alpha, double gamma, const GammaCriticalSettings& settings) {
    if (!(alpha > 0.0)) {
        throw ContractError("find_gamma_critical: alpha must be > 0");
    }
    if (!(settings.window_lo < settings.window_hi) || settings.window_lo < 0.0) {
        throw ContractError("find_gamma_critical: window must satisfy 0 <= lo < hi");
    }
    NoiseSpec noise;
    noise.kind = settings.kind;
    noise.gamma_a = noise.gamma_b = noise.gamma = gamma;
    const auto psi0 = ground_state(params, 0.0);
    const auto basis = params.make_basis(CapKind::at_most);
    const RampSchedule ramp{alpha, 0.0, settings.window_hi};
    Observers obs;
    obs.target = mes_state(psi0.basis(), settings.mes_m, params.species_total);
    obs.cadence = settings.cadence;
    const auto run = evolve_lindblad(params, ramp, DensityMatrix::from_pure(transfer(psi0, basis)), noise,
                                     settings.dt, ramp.arrival_time(), obs);
    const auto& tr = run.trajectory;
    double peak = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr.phi[i] >= settings.window_lo && tr.phi[i] <= settings.window_hi) {
            peak = std::max(peak, tr.fidelity[i]);
        }
    }
    return {gamma, has_interior_maximum(tr.phi, tr.fidelity, settings.window_lo, settings.window_hi), peak};
}

GammaCritical find_gamma_critical(const NetworkParams& params, double alpha, const std::vector<double>& gamma_grid,
                                  const GammaCriticalSettings& settings) {
    if (gamma_grid.empty()) {
        throw ContractError("find_gamma_critical: gamma grid is empty");
    }
    if (!std::is_sorted(gamma_grid.begin(), gamma_grid.end()) ||
        std::adjacent_find(gamma_grid.begin(), gamma_grid.end()) != gamma_grid.end()) {
        throw ContractError("find_gamma_critical: gamma grid must be strictly ascending");
    }
    GammaCritical out;
    auto probe = [&](std::size_t i) {
        out.probes.push_back(probe_gamma(params, alpha, gamma_grid[i], settings));
        return out.probes.back().has_interior_maximum;
    };
    std::size_t lo = 0;
    std::size_t hi = gamma_grid.size() - 1;
    if (!probe(lo)) {
        out.gamma_c = gamma_grid[lo];
        return out;
    }
    if (hi == lo || probe(hi)) {
        out.open_ended = true;
        return out;
    }
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        (probe(mid) ? lo : hi) = mid;
    }
    out.gamma_c = gamma_grid[hi];
    return out;
}

}  // namespace kerrnet
