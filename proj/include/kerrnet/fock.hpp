#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace kerrnet {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using CSparse = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// One bosonic mode (species) of one cavity. Species 0 is `a`, species 1 is `b`.
struct SiteMode {
    int mode = 0;
    int cavity = 0;

    friend auto operator<=>(const SiteMode&, const SiteMode&) = default;
};

/// How the per-species photon total constrains the basis.
enum class CapKind {
    exact,    ///< every species holds exactly `total` photons
    at_most,  ///< every species holds at most `total` photons (closed under loss)
};

struct SpeciesCap {
    int total = 0;
    CapKind kind = CapKind::at_most;

    friend bool operator==(const SpeciesCap&, const SpeciesCap&) = default;
};

/// Canonical enumeration of multi-cavity, multi-mode Fock occupations.
///
/// Occupation vectors are laid out species-major: all cavities of mode `a`,
/// then all cavities of mode `b`. States are stored in strict lexicographic
/// order, which coincides with ascending order of the mixed-radix code on the
/// full (n_max+1)^(sites) tensor grid. The grid code is what reductions use to
/// embed constrained states into product spaces.
class OccupationBasis {
public:
    static constexpr std::size_t kDefaultCapacity = 100000;

    static std::shared_ptr<const OccupationBasis> enumerate(int n_cavities, int n_modes, int n_max,
                                                            std::optional<SpeciesCap> cap = std::nullopt,
                                                            std::size_t capacity = kDefaultCapacity);

    int n_cavities() const { return n_cavities_; }
    int n_modes() const { return n_modes_; }
    int n_max() const { return n_max_; }
    int local_dim() const { return n_max_ + 1; }
    int site_mode_count() const { return n_cavities_ * n_modes_; }
    const std::optional<SpeciesCap>& species_cap() const { return cap_; }

    std::size_t dimension() const { return codes_.size(); }
    std::uint64_t grid_dimension() const { return grid_dimension_; }

    /// Position of a site-mode inside an occupation vector. Throws std::out_of_range.
    int flat(SiteMode sm) const;
    SiteMode site_mode(int flat_index) const;
    std::vector<SiteMode> all_site_modes() const;
    std::vector<SiteMode> species_site_modes(int mode) const;

    std::span<const int> occupation(std::size_t i) const;
    int occupation(std::size_t i, SiteMode sm) const { return occupation(i)[static_cast<std::size_t>(flat(sm))]; }
    std::uint64_t grid_code(std::size_t i) const { return codes_[i]; }

    std::optional<std::size_t> index_of(std::span<const int> occupation) const;
    std::optional<std::size_t> index_of_code(std::uint64_t code) const;
    std::uint64_t encode(std::span<const int> occupation) const;

    bool admits(std::span<const int> occupation) const;

    /// Structural equality: same configuration implies the same states in the same order.
    bool same_as(const OccupationBasis& other) const;

private:
    OccupationBasis() = default;

    int n_cavities_ = 0;
    int n_modes_ = 0;
    int n_max_ = 0;
    std::optional<SpeciesCap> cap_;
    std::uint64_t grid_dimension_ = 0;
    std::vector<int> occupations_;
    std::vector<std::uint64_t> codes_;
};

using BasisPtr = std::shared_ptr<const OccupationBasis>;

/// Throws ContractError unless both bases describe the same space.
void require_same_basis(const BasisPtr& lhs, const BasisPtr& rhs, const char* what);

/// A complex sparse matrix bound to an occupation basis.
class SparseOperator {
public:
    struct Entry {
        std::size_t row;
        std::size_t col;
        cplx value;
    };

    SparseOperator(BasisPtr basis, CSparse matrix);

    static SparseOperator zero(BasisPtr basis);
    static SparseOperator identity(BasisPtr basis);
    static SparseOperator from_entries(BasisPtr basis, std::span<const Entry> entries);

    const BasisPtr& basis() const { return basis_; }
    const CSparse& matrix() const { return matrix_; }
    std::size_t dimension() const { return basis_->dimension(); }

    /// Nonzero entries in row-major order.
    std::vector<Entry> entries() const;
    CMatrix dense() const { return CMatrix(matrix_); }

private:
    BasisPtr basis_;
    CSparse matrix_;
};

SparseOperator add(const SparseOperator& lhs, const SparseOperator& rhs);
SparseOperator scale(const SparseOperator& op, cplx factor);
SparseOperator compose(const SparseOperator& lhs, const SparseOperator& rhs);
SparseOperator adjoint(const SparseOperator& op);

SparseOperator annihilation_op(const BasisPtr& basis, SiteMode sm);
SparseOperator creation_op(const BasisPtr& basis, SiteMode sm);
SparseOperator number_op(const BasisPtr& basis, SiteMode sm);

/// a_to^dag a_from built directly. Number conserving, so it stays inside
/// fixed-total bases where a lone annihilation operator would be truncated away.
SparseOperator hopping_op(const BasisPtr& basis, SiteMode to, SiteMode from);

/// Diagonal operator sum_n f(n) |n><n| acting on one site-mode.
SparseOperator local_diagonal_op(const BasisPtr& basis, SiteMode sm, const std::function<cplx(int)>& f);

enum class Normalization { require, allow_unnormalized };

/// Amplitude vector over a basis. Normalized to 1e-9 unless constructed as unnormalized.
class PureState {
public:
    static constexpr double kNormTolerance = 1e-9;

    PureState(BasisPtr basis, CVector amplitudes, Normalization policy = Normalization::require);

    static PureState basis_state(const BasisPtr& basis, std::span<const int> occupation);

    const BasisPtr& basis() const { return basis_; }
    const CVector& amplitudes() const { return amplitudes_; }
    bool normalized_flag() const { return policy_ == Normalization::require; }
    double norm() const { return amplitudes_.norm(); }
    PureState normalized() const;

private:
    BasisPtr basis_;
    CVector amplitudes_;
    Normalization policy_;
};

PureState apply(const SparseOperator& op, const PureState& state);
cplx inner(const PureState& bra, const PureState& ket);

enum class Validation { check, skip };

/// Dense Hermitian, unit-trace, positive matrix over a basis.
class DensityMatrix {
public:
    static constexpr double kHermiticityTolerance = 1e-9;
    static constexpr double kTraceTolerance = 1e-8;
    static constexpr double kPositivityTolerance = 1e-8;

    DensityMatrix(BasisPtr basis, CMatrix rho, Validation validation = Validation::check);

    static DensityMatrix from_pure(const PureState& psi);

    const BasisPtr& basis() const { return basis_; }
    const CMatrix& matrix() const { return rho_; }

    double trace() const { return rho_.trace().real(); }
    double purity() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;

    /// Throws ContractError when any invariant fails.
    void validate() const;

private:
    BasisPtr basis_;
    CMatrix rho_;
};

/// Dense matrix on the product grid of a list of site-modes, each of local
/// dimension `local_dim`. Index digits follow `factors` order, first factor most
/// significant. Reduced states and partial transposes live here.
struct GridDensity {
    std::vector<SiteMode> factors;
    int local_dim = 0;
    CMatrix rho;

    std::size_t dimension() const { return static_cast<std::size_t>(rho.rows()); }
};

/// Zero-padded amplitudes on the full (n_max+1)^(sites) grid.
CVector embed(const PureState& psi);
/// Inverse of embed; throws ContractError if weight lies outside the basis.
PureState project(const BasisPtr& basis, const CVector& grid_amplitudes, double tolerance = 1e-12);

/// Re-indexes a state onto another basis by occupation. Throws ContractError
/// if any nonzero amplitude has no counterpart.
PureState transfer(const PureState& psi, const BasisPtr& target);

GridDensity partial_trace(const PureState& psi, std::span<const SiteMode> keep);
GridDensity partial_trace(const DensityMatrix& rho, std::span<const SiteMode> keep);
GridDensity partial_trace(const GridDensity& rho, std::span<const SiteMode> keep);

/// Transposes the digits belonging to `subset`. Output is Hermitian but not a state.
GridDensity partial_transpose(const GridDensity& rho, std::span<const SiteMode> subset);

}  // namespace kerrnet
