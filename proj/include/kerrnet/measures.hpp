#pragma once

#include "kerrnet/fock.hpp"

#include <vector>

namespace kerrnet {

/// Two disjoint, nonempty site-mode sets. Site-modes in neither set are traced out.
struct Partition {
    std::vector<SiteMode> side_a;
    std::vector<SiteMode> side_b;

    void validate() const;

    /// All a-modes against all b-modes.
    static Partition species_split(const OccupationBasis& basis);
};

/// Absolute sum of the negative eigenvalues of the partial transpose on `transpose`.
double negativity(const GridDensity& rho, std::span<const SiteMode> transpose);

double negativity(const PureState& psi, const Partition& partition);
double negativity(const DensityMatrix& rho, const Partition& partition);

double global_negativity(const PureState& psi);
double global_negativity(const DensityMatrix& rho);

double pairwise_negativity(const PureState& psi, SiteMode i, SiteMode j);
double pairwise_negativity(const DensityMatrix& rho, SiteMode i, SiteMode j);

/// Mean over sites of N^2_{i|rest} - sum_j N^2_{ij}, on the state reduced to one species.
/// Not clamped: the value can be negative for qutrits.
double pi_tangle(const PureState& psi, int species);
double pi_tangle(const DensityMatrix& rho, int species);

/// Geometric mean of the one-vs-rest negativities N_{x_i | everything else} over the sites of one species.
double geo_mean_tangle(const PureState& psi, int species);
double geo_mean_tangle(const DensityMatrix& rho, int species);

/// <t|rho|t>, clamped to [0, 1] against round-off.
double fidelity(const DensityMatrix& rho, const PureState& target);
double fidelity(const PureState& psi, const PureState& target);

/// Number of Schmidt coefficients above tol * largest. The partition must cover every site-mode.
int schmidt_number(const PureState& psi, const Partition& partition, double tol = 1e-6);
std::vector<double> schmidt_coefficients(const PureState& psi, const Partition& partition);

}  // namespace kerrnet
