#include "kerrnet/model.hpp"

#include "kerrnet/errors.hpp"

#include <cmath>
#include <string>

namespace kerrnet {

namespace {

bool finite(double x) { return std::isfinite(x); }

}  // namespace

NetworkParams NetworkParams::balanced(double k) {
    NetworkParams p;
    p.k_a = k;
    p.k_b = k;
    p.k_int = -2.0 * k;
    return p;
}

void NetworkParams::validate() const {
    if (n_cavities < 2) {
        throw ContractError("model.n_cavities must be >= 2");
    }
    if (n_max < 1) {
        throw ContractError("model.n_max must be >= 1");
    }
    if (species_total < 0) {
        throw ContractError("model.species_total must be >= 0");
    }
    if (!finite(phi_a) || !finite(phi_b) || !finite(k_a) || !finite(k_b) || !finite(k_int)) {
        throw ContractError("model: phases and Kerr coefficients must be finite");
    }
    const std::size_t bonds_expected = bond_count();
    if (hopping.empty() || (hopping.size() != 1 && hopping.size() != bonds_expected)) {
        throw ContractError("model.hopping must hold one value or one value per bond (" + std::to_string(bonds_expected) +
                            ")");
    }
    for (double j : hopping) {
        if (!finite(j)) {
            throw ContractError("model.hopping values must be finite");
        }
    }
}

std::size_t NetworkParams::bond_count() const {
    // A two-site ring would repeat its only bond, so it stays an open pair.
    const bool closes = topology == Topology::periodic && n_cavities >= 3;
    return static_cast<std::size_t>(n_cavities - 1 + (closes ? 1 : 0));
}

std::vector<Bond> NetworkParams::bonds() const {
    validate();
    std::vector<Bond> out;
    const std::size_t count = bond_count();
    for (std::size_t b = 0; b < count; ++b) {
        const int left = static_cast<int>(b);
        const int right = (left + 1) % n_cavities;
        out.push_back({left, right, hopping.size() == 1 ? hopping[0] : hopping[b]});
    }
    return out;
}

BasisPtr NetworkParams::make_basis(CapKind kind) const {
    validate();
    return OccupationBasis::enumerate(n_cavities, 2, n_max, SpeciesCap{species_total, kind});
}

void NetworkParams::require_compatible(const OccupationBasis& basis) const {
    if (basis.n_cavities() != n_cavities || basis.n_modes() != 2 || basis.n_max() != n_max) {
        throw ContractError("basis does not match the network configuration");
    }
}

// ---------------------------------------------------------------------------

HamiltonianTerms HamiltonianTerms::build(const NetworkParams& params, const BasisPtr& basis) {
    params.validate();
    params.require_compatible(*basis);

    HamiltonianTerms t;
    t.basis = basis;
    const auto d = static_cast<Eigen::Index>(basis->dimension());
    t.diagonal = CVector::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        double e = 0.0;
        for (int c = 0; c < params.n_cavities; ++c) {
            const double na = basis->occupation(static_cast<std::size_t>(i), {0, c});
            const double nb = basis->occupation(static_cast<std::size_t>(i), {1, c});
            e += params.k_a * na * na + params.k_b * nb * nb + params.k_int * na * nb;
        }
        t.diagonal(i) = e;
    }

    t.k_a = CSparse(d, d);
    t.k_b = CSparse(d, d);
    for (const Bond& bond : params.bonds()) {
        t.k_a += bond.j * hopping_op(basis, {0, bond.left}, {0, bond.right}).matrix();
        t.k_b += bond.j * hopping_op(basis, {1, bond.left}, {1, bond.right}).matrix();
    }
    t.k_a.makeCompressed();
    t.k_b.makeCompressed();
    t.k_a_adj = CSparse(t.k_a.adjoint());
    t.k_b_adj = CSparse(t.k_b.adjoint());
    return t;
}

SparseOperator HamiltonianTerms::hopping(double phi_a, double phi_b) const {
    const cplx ea = std::polar(1.0, phi_a);
    const cplx eb = std::polar(1.0, phi_b);
    CSparse m = ea * k_a + std::conj(ea) * k_a_adj + eb * k_b + std::conj(eb) * k_b_adj;
    return {basis, std::move(m)};
}

SparseOperator HamiltonianTerms::assemble(double phi_a, double phi_b) const {
    CSparse diag(diagonal.size(), diagonal.size());
    diag.reserve(Eigen::VectorXi::Constant(diagonal.size(), 1));
    for (Eigen::Index i = 0; i < diagonal.size(); ++i) {
        if (diagonal(i) != cplx{}) {
            diag.insert(i, i) = diagonal(i);
        }
    }
    return {basis, CSparse(diag + hopping(phi_a, phi_b).matrix())};
}

void HamiltonianTerms::apply(double phi_a, double phi_b, const CVector& x, CVector& y) const {
    const cplx ea = std::polar(1.0, phi_a);
    const cplx eb = std::polar(1.0, phi_b);
    y.noalias() = diagonal.cwiseProduct(x);
    y.noalias() += ea * (k_a * x);
    y.noalias() += std::conj(ea) * (k_a_adj * x);
    y.noalias() += eb * (k_b * x);
    y.noalias() += std::conj(eb) * (k_b_adj * x);
}

void HamiltonianTerms::apply(double phi_a, double phi_b, const CMatrix& x, CMatrix& y) const {
    const cplx ea = std::polar(1.0, phi_a);
    const cplx eb = std::polar(1.0, phi_b);
    y.noalias() = diagonal.asDiagonal() * x;
    y.noalias() += ea * (k_a * x);
    y.noalias() += std::conj(ea) * (k_a_adj * x);
    y.noalias() += eb * (k_b * x);
    y.noalias() += std::conj(eb) * (k_b_adj * x);
}

SparseOperator build_h_int(const NetworkParams& params, const BasisPtr& basis) {
    const auto t = HamiltonianTerms::build(params, basis);
    return {basis, CSparse(t.assemble(0.0, 0.0).matrix() - t.hopping(0.0, 0.0).matrix())};
}

SparseOperator build_h_hop(const NetworkParams& params, const BasisPtr& basis, double phi_a, double phi_b) {
    return HamiltonianTerms::build(params, basis).hopping(phi_a, phi_b);
}

SparseOperator build_hamiltonian(const NetworkParams& params, const BasisPtr& basis, double phi_a, double phi_b) {
    return HamiltonianTerms::build(params, basis).assemble(phi_a, phi_b);
}

// ---------------------------------------------------------------------------

std::vector<std::vector<int>> mes_occupations(int n_cavities, int n_max, int photons) {
    if (n_cavities < 1 || n_max < 1 || photons < 0) {
        throw ContractError("mes_occupations: invalid shape");
    }
    std::vector<std::vector<int>> out;
    std::vector<int> occ(static_cast<std::size_t>(n_cavities), 0);
    auto visit = [&](auto&& self, int pos, int left) -> void {
        if (pos == n_cavities - 1) {
            if (left <= n_max) {
                occ[static_cast<std::size_t>(pos)] = left;
                out.push_back(occ);
            }
            return;
        }
        for (int n = 0; n <= std::min(n_max, left); ++n) {
            occ[static_cast<std::size_t>(pos)] = n;
            self(self, pos + 1, left - n);
        }
    };
    visit(visit, 0, photons);
    return out;
}

PureState mes_state(const BasisPtr& basis, int m, int photons) {
    if (basis->n_modes() != 2) {
        throw ContractError("mes_state: basis must have two mode species");
    }
    const int n = basis->n_cavities();
    const auto terms = mes_occupations(n, basis->n_max(), photons);
    if (terms.empty()) {
        throw ContractError("mes_state: no occupation vectors with the requested photon number");
    }
    const double weight = 1.0 / std::sqrt(static_cast<double>(terms.size()));
    CVector amps = CVector::Zero(static_cast<Eigen::Index>(basis->dimension()));
    std::vector<int> paired(static_cast<std::size_t>(2 * n));
    for (const auto& occ : terms) {
        long moment = 0;
        for (int j = 0; j < n; ++j) {
            moment += static_cast<long>(j) * occ[static_cast<std::size_t>(j)];
            paired[static_cast<std::size_t>(j)] = occ[static_cast<std::size_t>(j)];
            paired[static_cast<std::size_t>(n + j)] = occ[static_cast<std::size_t>(j)];
        }
        const long p = ((-moment) % n + n) % n;
        const auto idx = basis->index_of(paired);
        if (!idx) {
            throw ContractError("mes_state: basis lacks a paired occupation required by the state");
        }
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) * static_cast<double>(p) / n;
        amps(static_cast<Eigen::Index>(*idx)) = std::polar(weight, angle);
    }
    return {basis, std::move(amps)};
}

MesResiduals verify_mes_conditions(const NetworkParams& params, int m) {
    const auto basis = params.make_basis(CapKind::exact);
    const auto t = HamiltonianTerms::build(params, basis);
    const auto mes = mes_state(basis, m, params.species_total);
    const CVector& v = mes.amplitudes();
    const CVector hop = t.hopping(params.phi_a, params.phi_b).matrix() * v;
    const CVector kerr = t.diagonal.cwiseProduct(v);
    return {hop.norm(), kerr.norm(), (hop + kerr).norm()};
}

// ---------------------------------------------------------------------------

std::string to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::none: return "none";
        case NoiseKind::single_mode_loss: return "single_mode_loss";
        case NoiseKind::coupled_two_mode_loss: return "coupled_two_mode_loss";
        case NoiseKind::phase_flip_single: return "phase_flip_single";
        case NoiseKind::phase_flip_coupled: return "phase_flip_coupled";
    }
    throw ContractError("unknown noise kind");
}

NoiseKind noise_kind_from_string(const std::string& name) {
    for (auto k : {NoiseKind::none, NoiseKind::single_mode_loss, NoiseKind::coupled_two_mode_loss,
                   NoiseKind::phase_flip_single, NoiseKind::phase_flip_coupled}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw ContractError("unknown noise kind '" + name + "'");
}

void NoiseSpec::validate() const {
    if (!(gamma_a >= 0.0) || !(gamma_b >= 0.0) || !(gamma >= 0.0) || !finite(gamma_a) || !finite(gamma_b) ||
        !finite(gamma)) {
        throw ContractError("noise rates must be finite and >= 0");
    }
    if (!finite(theta)) {
        throw ContractError("noise.theta must be finite");
    }
}

SparseOperator phase_flip_op(const BasisPtr& basis, SiteMode sm, double theta) {
    const cplx flip = std::polar(1.0, theta);
    return local_diagonal_op(basis, sm, [flip](int n) { return n == 0 ? cplx{1.0, 0.0} : flip; });
}

std::vector<JumpOperator> jump_operators(const NoiseSpec& noise, const BasisPtr& basis) {
    noise.validate();
    if (basis->n_modes() != 2) {
        throw ContractError("jump_operators: basis must have two mode species");
    }
    if (noise.is_loss() && basis->species_cap() && basis->species_cap()->kind == CapKind::exact) {
        throw ContractError("jump_operators: loss channels need a basis closed under photon loss");
    }
    const int n = basis->n_cavities();
    std::vector<JumpOperator> out;
    const auto cav = [](const char* name, int c) { return std::string(name) + std::to_string(c + 1); };
    switch (noise.kind) {
        case NoiseKind::none:
            break;
        case NoiseKind::single_mode_loss:
            for (int c = 0; c < n; ++c) {
                out.push_back({annihilation_op(basis, {0, c}), noise.gamma_a, cav("a", c)});
            }
            for (int c = 0; c < n; ++c) {
                out.push_back({annihilation_op(basis, {1, c}), noise.gamma_b, cav("b", c)});
            }
            break;
        case NoiseKind::coupled_two_mode_loss:
            for (int c = 0; c < n; ++c) {
                out.push_back({compose(annihilation_op(basis, {0, c}), annihilation_op(basis, {1, c})), noise.gamma,
                               cav("ab", c)});
            }
            break;
        case NoiseKind::phase_flip_single:
            for (int c = 0; c < n; ++c) {
                out.push_back({phase_flip_op(basis, {0, c}, noise.theta), noise.gamma_a, cav("sigma_a", c)});
            }
            for (int c = 0; c < n; ++c) {
                out.push_back({phase_flip_op(basis, {1, c}, noise.theta), noise.gamma_b, cav("sigma_b", c)});
            }
            break;
        case NoiseKind::phase_flip_coupled:
            for (int c = 0; c < n; ++c) {
                out.push_back({compose(phase_flip_op(basis, {0, c}, noise.theta),
                                       phase_flip_op(basis, {1, c}, noise.theta)),
                               noise.gamma, cav("sigma_ab", c)});
            }
            break;
    }
    return out;
}

}  // namespace kerrnet
