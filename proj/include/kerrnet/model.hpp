#pragma once

#include "kerrnet/fock.hpp"

#include <numbers>
#include <string>
#include <vector>

namespace kerrnet {

enum class Topology { open_chain, periodic };

struct Bond {
    int left = 0;   // hopping term J a_left^dag a_right e^{i phi}
    int right = 0;
    double j = 1.0;
};

/// Couplings, phases and basis configuration of the cavity network. Energies in units of J.
struct NetworkParams {
    int n_cavities = 3;
    /// One value is broadcast to every bond; otherwise one value per bond.
    std::vector<double> hopping{1.0};
    double phi_a = 0.0;
    double phi_b = 0.0;
    double k_a = 1.0;
    double k_b = 1.0;
    double k_int = -2.0;
    Topology topology = Topology::periodic;
    int n_max = 2;
    int species_total = 2;

    /// k_a = k_b = k, k_int = -2k.
    static NetworkParams balanced(double k);

    void validate() const;
    std::size_t bond_count() const;
    std::vector<Bond> bonds() const;

    /// Exact-total basis for closed dynamics, at-most basis for lossy dynamics.
    BasisPtr make_basis(CapKind kind) const;
    /// Throws ContractError unless the basis has this network's shape.
    void require_compatible(const OccupationBasis& basis) const;
};

/// H(phi_a, phi_b) = D + e^{i phi_a} K_a + e^{i phi_b} K_b + h.c.
/// Kept in parts so time-dependent phases cost no rebuild.
struct HamiltonianTerms {
    BasisPtr basis;
    CVector diagonal;  // real Kerr energies
    CSparse k_a;
    CSparse k_b;
    CSparse k_a_adj;
    CSparse k_b_adj;

    static HamiltonianTerms build(const NetworkParams& params, const BasisPtr& basis);

    SparseOperator assemble(double phi_a, double phi_b) const;
    SparseOperator hopping(double phi_a, double phi_b) const;

    /// y = H x for a vector or a dense matrix block.
    void apply(double phi_a, double phi_b, const CVector& x, CVector& y) const;
    void apply(double phi_a, double phi_b, const CMatrix& x, CMatrix& y) const;
};

SparseOperator build_h_int(const NetworkParams& params, const BasisPtr& basis);
SparseOperator build_h_hop(const NetworkParams& params, const BasisPtr& basis, double phi_a, double phi_b);
SparseOperator build_hamiltonian(const NetworkParams& params, const BasisPtr& basis, double phi_a, double phi_b);

/// Equal-weight superposition of paired occupations |n>_a |n>_b carrying
/// the phase exp(i 2 pi m p / N), where p shifts by one per rightward hop.
PureState mes_state(const BasisPtr& basis, int m = 3, int photons = 2);

/// Every occupation vector of `photons` photons over n_cavities sites (entries <= n_max), lexicographic.
std::vector<std::vector<int>> mes_occupations(int n_cavities, int n_max, int photons);

struct MesResiduals {
    double hop_residual = 0.0;
    double int_residual = 0.0;
    double total_residual = 0.0;
};

/// Norms of H_hop|MES>, H_int|MES> and H|MES> at the phases stored in params.
MesResiduals verify_mes_conditions(const NetworkParams& params, int m = 3);

/// Phase sum phi_a + phi_b at which the m-th MES has no hopping energy.
inline double mes_phase_sum(int m, int n_cavities) {
    return (2.0 * m - n_cavities) * std::numbers::pi / n_cavities;
}

enum class NoiseKind { none, single_mode_loss, coupled_two_mode_loss, phase_flip_single, phase_flip_coupled };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct NoiseSpec {
    NoiseKind kind = NoiseKind::none;
    double gamma_a = 0.0;
    double gamma_b = 0.0;
    double gamma = 0.0;
    double theta = std::numbers::pi;

    void validate() const;
    bool is_loss() const {
        return kind == NoiseKind::single_mode_loss || kind == NoiseKind::coupled_two_mode_loss;
    }
};

struct JumpOperator {
    SparseOperator op;
    double rate = 0.0;
    std::string label;
};

/// Local phase flip |0><0| + e^{i theta} sum_{n>=1} |n><n| on one site-mode.
SparseOperator phase_flip_op(const BasisPtr& basis, SiteMode sm, double theta);

std::vector<JumpOperator> jump_operators(const NoiseSpec& noise, const BasisPtr& basis);

}  // namespace kerrnet
