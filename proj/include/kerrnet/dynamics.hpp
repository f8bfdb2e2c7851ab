#pragma once

#include "kerrnet/model.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kerrnet {

/// phi(t) = phi_start + alpha t, frozen once phi_target is reached. Both species share phi.
struct RampSchedule {
    double alpha = 0.0;
    double phi_start = 0.0;
    std::optional<double> phi_target = std::numbers::pi / 2;

    void validate() const;
    double phi_at(double t) const;
    /// Time at which the target is reached; infinity when alpha = 0 or no target.
    double arrival_time() const;
};

/// What to record, and how often.
struct Observers {
    std::optional<PureState> target;
    int cadence = 100;
    std::vector<std::pair<std::string, std::function<double(const PureState&)>>> pure;
    std::vector<std::pair<std::string, std::function<double(const DensityMatrix&)>>> mixed;
    /// Check the minimum eigenvalue of rho at every record (open runs only).
    bool check_positivity = true;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<double> phi;
    std::vector<double> fidelity;  // empty without a target
    std::vector<double> energy;
    std::vector<double> trace;
    std::vector<double> purity;
    std::map<std::string, std::vector<double>> extra;

    std::size_t size() const { return t.size(); }
    double peak_fidelity() const;
};

struct ClosedRun {
    Trajectory trajectory;
    PureState final_state;
};

struct OpenRun {
    Trajectory trajectory;
    DensityMatrix final_state;
};

/// Norm drift bounds of the closed integrator, per step.
inline constexpr double kRenormalizeDrift = 1e-12;
inline constexpr double kMaxNormDrift = 1e-6;
/// Trace and positivity bounds of the open integrator.
inline constexpr double kMaxTraceDrift = 1e-6;
inline constexpr double kPositivityBound = -1e-6;

/// RK4 on i dpsi/dt = H(phi(t)) psi. The basis is taken from psi0.
ClosedRun evolve_closed(const NetworkParams& params, const RampSchedule& ramp, const PureState& psi0, double dt,
                        double t_max, const Observers& observers);

/// Right-hand side of the Lindblad equation with the phase ramp.
class LindbladRhs {
public:
    LindbladRhs(const NetworkParams& params, const NoiseSpec& noise, const BasisPtr& basis);

    /// out = L_phi[rho] for Hermitian rho.
    void operator()(double phi, const CMatrix& rho, CMatrix& out) const;

    const HamiltonianTerms& hamiltonian() const { return terms_; }
    const std::vector<JumpOperator>& jumps() const { return jumps_; }

private:
    HamiltonianTerms terms_;
    std::vector<JumpOperator> jumps_;
    CSparse damping_;  // -(i/2) sum gamma L^dag L
    mutable CMatrix scratch_;
    mutable CMatrix scratch2_;
};

/// RK4 on the Lindblad equation. rho is re-symmetrized after every step.
OpenRun evolve_lindblad(const NetworkParams& params, const RampSchedule& ramp, const DensityMatrix& rho0,
                        const NoiseSpec& noise, double dt, double t_max, const Observers& observers);

/// Dense column-stacked generator: vec(A X B) = (B^T kron A) vec(X).
struct Superoperator {
    BasisPtr basis;
    CMatrix generator;
};

inline constexpr std::size_t kOracleDimensionCap = 64;

Superoperator superoperator_oracle(const NetworkParams& params, const BasisPtr& basis, double phi,
                                   const NoiseSpec& noise, std::size_t dimension_cap = kOracleDimensionCap);

/// rho(t) = exp(G t) rho0 by scaling-and-squaring Pade.
DensityMatrix evolve_exact(const Superoperator& generator, const DensityMatrix& rho0, double t);

/// Ground state of H(phi, phi) on the exact-total basis.
PureState ground_state(const NetworkParams& params, double phi);

struct PassageSettings {
    double dt_closed = 1e-3;
    double dt_open = 5e-4;
    int cadence = 100;
    double phi_target = std::numbers::pi / 2;
    /// Extra time after the ramp arrives at the target.
    double hold_time = 0.0;
    int mes_m = 3;
    unsigned workers = 0;
};

struct AlphaScanRow {
    double alpha = 0.0;
    double peak_fidelity = 0.0;
};

struct AlphaScan {
    std::vector<AlphaScanRow> rows;
    double alpha_opt = 0.0;
    double peak_opt = 0.0;
};

/// Peak MES fidelity of one passage from the phi = 0 ground state. Closed when the noise is silent.
double passage_peak_fidelity(const NetworkParams& params, const NoiseSpec& noise, double alpha,
                             const PassageSettings& settings);

/// Peak fidelity per alpha; alpha_opt is the argmax, ties going to the smaller alpha.
AlphaScan scan_alpha(const NetworkParams& params, const NoiseSpec& noise, const std::vector<double>& alpha_grid,
                     const PassageSettings& settings);

struct GammaCriticalSettings {
    NoiseKind kind = NoiseKind::single_mode_loss;
    /// Ramp phase window searched for an interior fidelity maximum.
    double window_lo = std::numbers::pi / 4;
    double window_hi = 0.6 * std::numbers::pi;
    double dt = 5e-4;
    int cadence = 100;
    int mes_m = 3;
};

struct GammaProbe {
    double gamma = 0.0;
    bool has_interior_maximum = false;
    double peak_fidelity = 0.0;
};

struct GammaCritical {
    std::optional<double> gamma_c;  // empty when the maximum survives the whole grid
    bool open_ended = false;
    std::vector<GammaProbe> probes;  // in evaluation order
};

/// True if samples strictly inside [lo, hi] of `phi` contain a local maximum of `f`.
bool has_interior_maximum(const std::vector<double>& phi, const std::vector<double>& f, double lo, double hi);

/// Single-loss probe at one rate: ramp held at the window end.
GammaProbe probe_gamma(const NetworkParams& params, double alpha, double gamma, const GammaCriticalSettings& settings);

/// Smallest grid rate whose fidelity has no interior maximum in the window, by bisection over
/// grid indices (assumes the criterion switches once along the ascending grid).
GammaCritical find_gamma_critical(const NetworkParams& params, double alpha, const std::vector<double>& gamma_grid,
                                  const GammaCriticalSettings& settings);

}  // namespace kerrnet
