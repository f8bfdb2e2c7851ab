#include "kerrnet/fock.hpp"

#include "kerrnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

namespace kerrnet {

namespace {

constexpr std::uint64_t kGridCodeLimit = std::uint64_t{1} << 62;
constexpr std::uint64_t kEmbedLimit = 10'000'000;

std::uint64_t checked_power(std::uint64_t base, int exponent) {
    std::uint64_t out = 1;
    for (int i = 0; i < exponent; ++i) {
        if (out > kGridCodeLimit / base) {
            throw CapacityError("occupation grid exceeds 2^62 entries");
        }
        out *= base;
    }
    return out;
}

std::vector<std::size_t> radix_weights(std::size_t digits, std::size_t base) {
    std::vector<std::size_t> w(digits, 1);
    for (std::size_t j = digits; j-- > 1;) {
        w[j - 1] = w[j] * base;
    }
    return w;
}

/// Splits indices of a digit-structured source into (kept, traced) codes.
struct Reduction {
    std::vector<std::size_t> keep_positions;   // digit positions inside the source
    std::vector<std::size_t> trace_positions;
    std::vector<std::size_t> keep_weights;
    std::vector<std::size_t> trace_weights;
    std::vector<SiteMode> kept;
    std::size_t kept_dim = 1;
};

Reduction plan_reduction(std::span<const SiteMode> source_factors, std::span<const SiteMode> keep, int local_dim) {
    if (keep.empty()) {
        throw ContractError("partial_trace: keep set must be nonempty");
    }
    std::vector<SiteMode> sorted_keep(keep.begin(), keep.end());
    std::sort(sorted_keep.begin(), sorted_keep.end());
    if (std::adjacent_find(sorted_keep.begin(), sorted_keep.end()) != sorted_keep.end()) {
        throw ContractError("partial_trace: keep set contains duplicates");
    }

    Reduction r;
    for (std::size_t p = 0; p < source_factors.size(); ++p) {
        if (std::binary_search(sorted_keep.begin(), sorted_keep.end(), source_factors[p])) {
            r.keep_positions.push_back(p);
            r.kept.push_back(source_factors[p]);
        } else {
            r.trace_positions.push_back(p);
        }
    }
    if (r.kept.size() != sorted_keep.size()) {
        throw ContractError("partial_trace: keep set is not a subset of the available site-modes");
    }
    const auto base = static_cast<std::size_t>(local_dim);
    r.keep_weights = radix_weights(r.keep_positions.size(), base);
    r.trace_weights = radix_weights(r.trace_positions.size(), base);
    for (std::size_t j = 0; j < r.keep_positions.size(); ++j) {
        r.kept_dim *= base;
    }
    if (r.kept_dim > 20000) {
        throw CapacityError("partial_trace: reduced grid too large for dense storage");
    }
    return r;
}

struct SplitIndex {
    std::size_t rest;
    std::size_t keep;
    std::size_t source;
};

template <class DigitFn>
std::vector<SplitIndex> split_all(const Reduction& r, std::size_t count, DigitFn&& digit) {
    std::vector<SplitIndex> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t keep = 0;
        std::size_t rest = 0;
        for (std::size_t j = 0; j < r.keep_positions.size(); ++j) {
            keep += static_cast<std::size_t>(digit(i, r.keep_positions[j])) * r.keep_weights[j];
        }
        for (std::size_t j = 0; j < r.trace_positions.size(); ++j) {
            rest += static_cast<std::size_t>(digit(i, r.trace_positions[j])) * r.trace_weights[j];
        }
        out.push_back({rest, keep, i});
    }
    std::sort(out.begin(), out.end(), [](const SplitIndex& x, const SplitIndex& y) {
        return std::tie(x.rest, x.keep) < std::tie(y.rest, y.keep);
    });
    return out;
}

/// Calls fn(first, last) for each run of equal traced codes.
template <class Fn>
void for_each_group(const std::vector<SplitIndex>& items, Fn&& fn) {
    std::size_t begin = 0;
    while (begin < items.size()) {
        std::size_t end = begin + 1;
        while (end < items.size() && items[end].rest == items[begin].rest) {
            ++end;
        }
        fn(begin, end);
        begin = end;
    }
}

GridDensity reduce_density(const Reduction& r, const std::vector<SplitIndex>& items, int local_dim,
                           const auto& element) {
    GridDensity out{r.kept, local_dim, CMatrix::Zero(static_cast<Eigen::Index>(r.kept_dim),
                                                     static_cast<Eigen::Index>(r.kept_dim))};
    for_each_group(items, [&](std::size_t begin, std::size_t end) {
        for (std::size_t x = begin; x < end; ++x) {
            for (std::size_t y = begin; y < end; ++y) {
                out.rho(static_cast<Eigen::Index>(items[x].keep), static_cast<Eigen::Index>(items[y].keep)) +=
                    element(items[x].source, items[y].source);
            }
        }
    });
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// OccupationBasis

std::shared_ptr<const OccupationBasis> OccupationBasis::enumerate(int n_cavities, int n_modes, int n_max,
                                                                  std::optional<SpeciesCap> cap,
                                                                  std::size_t capacity) {
    if (n_cavities < 1) {
        throw ContractError("enumerate_basis: n_cavities must be >= 1");
    }
    if (n_modes < 1) {
        throw ContractError("enumerate_basis: n_modes must be >= 1");
    }
    if (n_max < 1) {
        throw ContractError("enumerate_basis: n_max must be >= 1");
    }
    if (cap && cap->total < 0) {
        throw ContractError("enumerate_basis: species cap must be >= 0");
    }

    auto basis = std::shared_ptr<OccupationBasis>(new OccupationBasis());
    basis->n_cavities_ = n_cavities;
    basis->n_modes_ = n_modes;
    basis->n_max_ = n_max;
    basis->cap_ = cap;
    const int sites = n_cavities * n_modes;
    basis->grid_dimension_ = checked_power(static_cast<std::uint64_t>(n_max + 1), sites);

    std::vector<int> occ(static_cast<std::size_t>(sites), 0);
    std::vector<int> species_total(static_cast<std::size_t>(n_modes), 0);

    // Depth-first over positions with ascending digits yields lexicographic order.
    auto visit = [&](auto&& self, int pos) -> void {
        if (pos == sites) {
            if (basis->codes_.size() >= capacity) {
                throw CapacityError("enumerate_basis: dimension exceeds capacity of " + std::to_string(capacity) +
                                    " states");
            }
            basis->occupations_.insert(basis->occupations_.end(), occ.begin(), occ.end());
            basis->codes_.push_back(basis->encode(occ));
            return;
        }
        const int species = pos / n_cavities;
        const int remaining_after = n_cavities - 1 - pos % n_cavities;
        for (int n = 0; n <= n_max; ++n) {
            const int total = species_total[static_cast<std::size_t>(species)] + n;
            if (cap) {
                if (total > cap->total) {
                    break;
                }
                if (cap->kind == CapKind::exact && total + remaining_after * n_max < cap->total) {
                    continue;
                }
            }
            occ[static_cast<std::size_t>(pos)] = n;
            species_total[static_cast<std::size_t>(species)] = total;
            self(self, pos + 1);
            species_total[static_cast<std::size_t>(species)] = total - n;
        }
        occ[static_cast<std::size_t>(pos)] = 0;
    };
    visit(visit, 0);
    return basis;
}

int OccupationBasis::flat(SiteMode sm) const {
    if (sm.mode < 0 || sm.mode >= n_modes_ || sm.cavity < 0 || sm.cavity >= n_cavities_) {
        throw std::out_of_range("site-mode (mode " + std::to_string(sm.mode) + ", cavity " +
                                std::to_string(sm.cavity) + ") out of range");
    }
    return sm.mode * n_cavities_ + sm.cavity;
}

SiteMode OccupationBasis::site_mode(int flat_index) const {
    if (flat_index < 0 || flat_index >= site_mode_count()) {
        throw std::out_of_range("flat site-mode index out of range");
    }
    return {flat_index / n_cavities_, flat_index % n_cavities_};
}

std::vector<SiteMode> OccupationBasis::all_site_modes() const {
    std::vector<SiteMode> out;
    out.reserve(static_cast<std::size_t>(site_mode_count()));
    for (int p = 0; p < site_mode_count(); ++p) {
        out.push_back(site_mode(p));
    }
    return out;
}

std::vector<SiteMode> OccupationBasis::species_site_modes(int mode) const {
    if (mode < 0 || mode >= n_modes_) {
        throw std::out_of_range("mode index out of range");
    }
    std::vector<SiteMode> out;
    for (int c = 0; c < n_cavities_; ++c) {
        out.push_back({mode, c});
    }
    return out;
}

std::span<const int> OccupationBasis::occupation(std::size_t i) const {
    const auto sites = static_cast<std::size_t>(site_mode_count());
    return {occupations_.data() + i * sites, sites};
}

std::uint64_t OccupationBasis::encode(std::span<const int> occupation) const {
    std::uint64_t code = 0;
    for (int n : occupation) {
        code = code * static_cast<std::uint64_t>(n_max_ + 1) + static_cast<std::uint64_t>(n);
    }
    return code;
}

bool OccupationBasis::admits(std::span<const int> occupation) const {
    if (occupation.size() != static_cast<std::size_t>(site_mode_count())) {
        return false;
    }
    for (int n : occupation) {
        if (n < 0 || n > n_max_) {
            return false;
        }
    }
    if (cap_) {
        for (int m = 0; m < n_modes_; ++m) {
            int total = 0;
            for (int c = 0; c < n_cavities_; ++c) {
                total += occupation[static_cast<std::size_t>(m * n_cavities_ + c)];
            }
            if (total > cap_->total || (cap_->kind == CapKind::exact && total != cap_->total)) {
                return false;
            }
        }
    }
    return true;
}

std::optional<std::size_t> OccupationBasis::index_of(std::span<const int> occupation) const {
    if (!admits(occupation)) {
        return std::nullopt;
    }
    return index_of_code(encode(occupation));
}

std::optional<std::size_t> OccupationBasis::index_of_code(std::uint64_t code) const {
    const auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
    if (it == codes_.end() || *it != code) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - codes_.begin());
}

bool OccupationBasis::same_as(const OccupationBasis& other) const {
    return n_cavities_ == other.n_cavities_ && n_modes_ == other.n_modes_ && n_max_ == other.n_max_ &&
           cap_ == other.cap_;
}

void require_same_basis(const BasisPtr& lhs, const BasisPtr& rhs, const char* what) {
    if (!lhs || !rhs) {
        throw ContractError(std::string(what) + ": missing basis");
    }
    if (lhs.get() != rhs.get() && !lhs->same_as(*rhs)) {
        throw ContractError(std::string(what) + ": operands are bound to different bases");
    }
}

// ---------------------------------------------------------------------------
// SparseOperator

SparseOperator::SparseOperator(BasisPtr basis, CSparse matrix) : basis_(std::move(basis)), matrix_(std::move(matrix)) {
    if (!basis_) {
        throw ContractError("SparseOperator: missing basis");
    }
    const auto d = static_cast<Eigen::Index>(basis_->dimension());
    if (matrix_.rows() != d || matrix_.cols() != d) {
        throw ContractError("SparseOperator: matrix shape does not match basis dimension");
    }
    matrix_.makeCompressed();
}

SparseOperator SparseOperator::zero(BasisPtr basis) {
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    return {std::move(basis), CSparse(d, d)};
}

SparseOperator SparseOperator::identity(BasisPtr basis) {
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    CSparse m(d, d);
    m.setIdentity();
    return {std::move(basis), std::move(m)};
}

SparseOperator SparseOperator::from_entries(BasisPtr basis, std::span<const Entry> entries) {
    const auto d = basis->dimension();
    std::vector<Eigen::Triplet<cplx>> triplets;
    triplets.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.row >= d || e.col >= d) {
            throw ContractError("SparseOperator: entry index outside the basis");
        }
        triplets.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
    }
    CSparse m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    m.setFromTriplets(triplets.begin(), triplets.end());  // duplicates are summed
    return {std::move(basis), std::move(m)};
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
    std::vector<Entry> out;
    out.reserve(static_cast<std::size_t>(matrix_.nonZeros()));
    for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
        for (CSparse::InnerIterator it(matrix_, r); it; ++it) {
            if (it.value() != cplx{}) {
                out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()), it.value()});
            }
        }
    }
    return out;
}

SparseOperator add(const SparseOperator& lhs, const SparseOperator& rhs) {
    require_same_basis(lhs.basis(), rhs.basis(), "add");
    return {lhs.basis(), CSparse(lhs.matrix() + rhs.matrix())};
}

SparseOperator scale(const SparseOperator& op, cplx factor) {
    return {op.basis(), CSparse(op.matrix() * factor)};
}

SparseOperator compose(const SparseOperator& lhs, const SparseOperator& rhs) {
    require_same_basis(lhs.basis(), rhs.basis(), "compose");
    return {lhs.basis(), CSparse(lhs.matrix() * rhs.matrix())};
}

SparseOperator adjoint(const SparseOperator& op) {
    return {op.basis(), CSparse(op.matrix().adjoint())};
}

namespace {

/// Builds an operator from a per-state map |i> -> sum_k c_k |j_k>.
template <class Fn>
SparseOperator build_from_columns(const BasisPtr& basis, Fn&& column) {
    std::vector<Eigen::Triplet<cplx>> triplets;
    std::vector<int> occ;
    for (std::size_t i = 0; i < basis->dimension(); ++i) {
        const auto src = basis->occupation(i);
        occ.assign(src.begin(), src.end());
        column(i, occ, [&](std::span<const int> target, cplx value) {
            if (const auto j = basis->index_of(target)) {
                triplets.emplace_back(static_cast<int>(*j), static_cast<int>(i), value);
            }
        });
    }
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    CSparse m(d, d);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return {basis, std::move(m)};
}

}  // namespace

SparseOperator annihilation_op(const BasisPtr& basis, SiteMode sm) {
    const auto p = static_cast<std::size_t>(basis->flat(sm));
    return build_from_columns(basis, [p](std::size_t, std::vector<int>& occ, auto&& emit) {
        const int n = occ[p];
        if (n == 0) {
            return;
        }
        occ[p] = n - 1;
        emit(occ, cplx{std::sqrt(static_cast<double>(n)), 0.0});
    });
}

SparseOperator creation_op(const BasisPtr& basis, SiteMode sm) {
    const auto p = static_cast<std::size_t>(basis->flat(sm));
    return build_from_columns(basis, [p](std::size_t, std::vector<int>& occ, auto&& emit) {
        const int n = occ[p];
        occ[p] = n + 1;
        emit(occ, cplx{std::sqrt(static_cast<double>(n + 1)), 0.0});
    });
}

SparseOperator number_op(const BasisPtr& basis, SiteMode sm) {
    return local_diagonal_op(basis, sm, [](int n) { return cplx{static_cast<double>(n), 0.0}; });
}

SparseOperator hopping_op(const BasisPtr& basis, SiteMode to, SiteMode from) {
    const auto pt = static_cast<std::size_t>(basis->flat(to));
    const auto pf = static_cast<std::size_t>(basis->flat(from));
    if (pt == pf) {
        return number_op(basis, to);
    }
    return build_from_columns(basis, [pt, pf](std::size_t, std::vector<int>& occ, auto&& emit) {
        const int nf = occ[pf];
        if (nf == 0) {
            return;
        }
        const int nt = occ[pt];
        occ[pf] = nf - 1;
        occ[pt] = nt + 1;
        emit(occ, cplx{std::sqrt(static_cast<double>(nf) * static_cast<double>(nt + 1)), 0.0});
    });
}

SparseOperator local_diagonal_op(const BasisPtr& basis, SiteMode sm, const std::function<cplx(int)>& f) {
    const auto p = static_cast<std::size_t>(basis->flat(sm));
    return build_from_columns(basis, [&](std::size_t, std::vector<int>& occ, auto&& emit) {
        const cplx v = f(occ[p]);
        if (v != cplx{}) {
            emit(occ, v);
        }
    });
}

// ---------------------------------------------------------------------------
// States

PureState::PureState(BasisPtr basis, CVector amplitudes, Normalization policy)
    : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)), policy_(policy) {
    if (!basis_) {
        throw ContractError("PureState: missing basis");
    }
    if (static_cast<std::size_t>(amplitudes_.size()) != basis_->dimension()) {
        throw ContractError("PureState: amplitude vector length does not match basis dimension");
    }
    if (policy_ == Normalization::require && std::abs(amplitudes_.norm() - 1.0) > kNormTolerance) {
        throw ContractError("PureState: state is not normalized (norm " + std::to_string(amplitudes_.norm()) + ")");
    }
}

PureState PureState::basis_state(const BasisPtr& basis, std::span<const int> occupation) {
    const auto i = basis->index_of(occupation);
    if (!i) {
        throw ContractError("basis_state: occupation not contained in the basis");
    }
    CVector v = CVector::Zero(static_cast<Eigen::Index>(basis->dimension()));
    v(static_cast<Eigen::Index>(*i)) = 1.0;
    return {basis, std::move(v)};
}

PureState PureState::normalized() const {
    const double n = amplitudes_.norm();
    if (n == 0.0) {
        throw ContractError("PureState::normalized: zero vector");
    }
    return {basis_, amplitudes_ / n};
}

PureState apply(const SparseOperator& op, const PureState& state) {
    require_same_basis(op.basis(), state.basis(), "apply");
    return {state.basis(), op.matrix() * state.amplitudes(), Normalization::allow_unnormalized};
}

cplx inner(const PureState& bra, const PureState& ket) {
    require_same_basis(bra.basis(), ket.basis(), "inner");
    return bra.amplitudes().dot(ket.amplitudes());
}

DensityMatrix::DensityMatrix(BasisPtr basis, CMatrix rho, Validation validation)
    : basis_(std::move(basis)), rho_(std::move(rho)) {
    if (!basis_) {
        throw ContractError("DensityMatrix: missing basis");
    }
    const auto d = static_cast<Eigen::Index>(basis_->dimension());
    if (rho_.rows() != d || rho_.cols() != d) {
        throw ContractError("DensityMatrix: matrix shape does not match basis dimension");
    }
    if (validation == Validation::check) {
        validate();
    }
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    const auto& v = psi.amplitudes();
    return {psi.basis(), v * v.adjoint()};
}

double DensityMatrix::purity() const {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return rho_.cwiseAbs2().sum();
}

double DensityMatrix::hermiticity_error() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const CMatrix h = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
    if (const double e = hermiticity_error(); e > kHermiticityTolerance) {
        throw ContractError("DensityMatrix: not Hermitian (max deviation " + std::to_string(e) + ")");
    }
    if (const double t = trace(); std::abs(t - 1.0) > kTraceTolerance) {
        throw ContractError("DensityMatrix: trace " + std::to_string(t) + " differs from 1");
    }
    if (const double m = min_eigenvalue(); m < -kPositivityTolerance) {
        throw ContractError("DensityMatrix: negative eigenvalue " + std::to_string(m));
    }
}

// ---------------------------------------------------------------------------
// Embedding and reductions

CVector embed(const PureState& psi) {
    const auto& basis = *psi.basis();
    if (basis.grid_dimension() > kEmbedLimit) {
        throw CapacityError("embed: full grid too large");
    }
    CVector out = CVector::Zero(static_cast<Eigen::Index>(basis.grid_dimension()));
    for (std::size_t i = 0; i < basis.dimension(); ++i) {
        out(static_cast<Eigen::Index>(basis.grid_code(i))) = psi.amplitudes()(static_cast<Eigen::Index>(i));
    }
    return out;
}

PureState project(const BasisPtr& basis, const CVector& grid_amplitudes, double tolerance) {
    if (static_cast<std::uint64_t>(grid_amplitudes.size()) != basis->grid_dimension()) {
        throw ContractError("project: vector length does not match the full grid");
    }
    CVector out(static_cast<Eigen::Index>(basis->dimension()));
    double captured = 0.0;
    for (std::size_t i = 0; i < basis->dimension(); ++i) {
        out(static_cast<Eigen::Index>(i)) = grid_amplitudes(static_cast<Eigen::Index>(basis->grid_code(i)));
        captured += std::norm(out(static_cast<Eigen::Index>(i)));
    }
    if (grid_amplitudes.squaredNorm() - captured > tolerance) {
        throw ContractError("project: vector has weight outside the constrained basis");
    }
    return {basis, std::move(out), Normalization::allow_unnormalized};
}

PureState transfer(const PureState& psi, const BasisPtr& target) {
    const auto& source = *psi.basis();
    if (source.n_cavities() != target->n_cavities() || source.n_modes() != target->n_modes()) {
        throw ContractError("transfer: bases describe different site-mode sets");
    }
    CVector out = CVector::Zero(static_cast<Eigen::Index>(target->dimension()));
    for (std::size_t i = 0; i < source.dimension(); ++i) {
        const cplx v = psi.amplitudes()(static_cast<Eigen::Index>(i));
        if (v == cplx{}) {
            continue;
        }
        const auto j = target->index_of(source.occupation(i));
        if (!j) {
            throw ContractError("transfer: occupied state missing from the target basis");
        }
        out(static_cast<Eigen::Index>(*j)) = v;
    }
    return {target, std::move(out), psi.normalized_flag() ? Normalization::require : Normalization::allow_unnormalized};
}

GridDensity partial_trace(const PureState& psi, std::span<const SiteMode> keep) {
    const auto& basis = *psi.basis();
    const auto factors = basis.all_site_modes();
    const Reduction r = plan_reduction(factors, keep, basis.local_dim());
    const auto items = split_all(r, basis.dimension(),
                                 [&](std::size_t i, std::size_t p) { return basis.occupation(i)[p]; });
    const auto& v = psi.amplitudes();
    return reduce_density(r, items, basis.local_dim(), [&](std::size_t i, std::size_t j) {
        return v(static_cast<Eigen::Index>(i)) * std::conj(v(static_cast<Eigen::Index>(j)));
    });
}

GridDensity partial_trace(const DensityMatrix& rho, std::span<const SiteMode> keep) {
    const auto& basis = *rho.basis();
    const auto factors = basis.all_site_modes();
    const Reduction r = plan_reduction(factors, keep, basis.local_dim());
    const auto items = split_all(r, basis.dimension(),
                                 [&](std::size_t i, std::size_t p) { return basis.occupation(i)[p]; });
    const auto& m = rho.matrix();
    return reduce_density(r, items, basis.local_dim(), [&](std::size_t i, std::size_t j) {
        return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
}

GridDensity partial_trace(const GridDensity& rho, std::span<const SiteMode> keep) {
    const Reduction r = plan_reduction(rho.factors, keep, rho.local_dim);
    const auto base = static_cast<std::size_t>(rho.local_dim);
    const auto weights = radix_weights(rho.factors.size(), base);
    const auto items = split_all(r, rho.dimension(), [&](std::size_t i, std::size_t p) {
        return static_cast<int>((i / weights[p]) % base);
    });
    return reduce_density(r, items, rho.local_dim, [&](std::size_t i, std::size_t j) {
        return rho.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    });
}

GridDensity partial_transpose(const GridDensity& rho, std::span<const SiteMode> subset) {
    if (subset.empty()) {
        throw ContractError("partial_transpose: subset must be nonempty");
    }
    std::vector<SiteMode> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ContractError("partial_transpose: subset contains duplicates");
    }
    const auto base = static_cast<std::size_t>(rho.local_dim);
    const auto weights = radix_weights(rho.factors.size(), base);
    std::vector<bool> in_subset(rho.factors.size(), false);
    std::size_t found = 0;
    for (std::size_t p = 0; p < rho.factors.size(); ++p) {
        if (std::binary_search(sorted.begin(), sorted.end(), rho.factors[p])) {
            in_subset[p] = true;
            ++found;
        }
    }
    if (found != sorted.size()) {
        throw ContractError("partial_transpose: subset is not contained in the grid factors");
    }
    if (found == rho.factors.size()) {
        throw ContractError("partial_transpose: subset must be a proper subset of the grid factors");
    }

    // index = sub(index) + rest(index) in the mixed radix; transposing swaps the sub parts.
    const std::size_t d = rho.dimension();
    std::vector<std::size_t> sub(d, 0);
    std::vector<std::size_t> rest(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t p = 0; p < rho.factors.size(); ++p) {
            const std::size_t part = ((i / weights[p]) % base) * weights[p];
            (in_subset[p] ? sub[i] : rest[i]) += part;
        }
    }
    GridDensity out{rho.factors, rho.local_dim, CMatrix::Zero(rho.rho.rows(), rho.rho.cols())};
    for (std::size_t c = 0; c < d; ++c) {
        for (std::size_t r = 0; r < d; ++r) {
            const cplx v = rho.rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (v == cplx{}) {
                continue;
            }
            out.rho(static_cast<Eigen::Index>(rest[r] + sub[c]), static_cast<Eigen::Index>(rest[c] + sub[r])) = v;
        }
    }
    return out;
}

}  // namespace kerrnet
