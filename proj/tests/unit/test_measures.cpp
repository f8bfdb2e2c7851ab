#include "helpers.hpp"
#include "kerrnet/errors.hpp"
#include "kerrnet/measures.hpp"
#include "kerrnet/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kerrnet;

namespace {

// Dense oracle on the full product grid. Site-modes are addressed by flat index.
struct GridOracle {
    int d;
    int sites;

    int digit(Eigen::Index code, int flat) const {
        for (int s = sites - 1; s > flat; --s) code /= d;
        return static_cast<int>(code % d);
    }

    CMatrix lift(const DensityMatrix& rho) const {
        const auto& b = *rho.basis();
        const Eigen::Index full = static_cast<Eigen::Index>(std::pow(d, sites));
        CMatrix out = CMatrix::Zero(full, full);
        for (std::size_t i = 0; i < b.dimension(); ++i)
            for (std::size_t j = 0; j < b.dimension(); ++j)
                out(static_cast<Eigen::Index>(b.grid_code(i)), static_cast<Eigen::Index>(b.grid_code(j))) =
                    rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        return out;
    }

    // Reduced matrix on `keep` (digits in the given order).
    CMatrix reduce(const CMatrix& full, const std::vector<int>& keep) const {
        Eigen::Index kd = 1;
        for (std::size_t i = 0; i < keep.size(); ++i) kd *= d;
        CMatrix out = CMatrix::Zero(kd, kd);
        auto kept_code = [&](Eigen::Index c) {
            Eigen::Index k = 0;
            for (int f : keep) k = k * d + digit(c, f);
            return k;
        };
        auto rest_equal = [&](Eigen::Index x, Eigen::Index y) {
            for (int s = 0; s < sites; ++s) {
                if (std::find(keep.begin(), keep.end(), s) != keep.end()) continue;
                if (digit(x, s) != digit(y, s)) return false;
            }
            return true;
        };
        for (Eigen::Index x = 0; x < full.rows(); ++x)
            for (Eigen::Index y = 0; y < full.cols(); ++y)
                if (full(x, y) != cplx{} && rest_equal(x, y)) out(kept_code(x), kept_code(y)) += full(x, y);
        return out;
    }

    // Transposes the digits at the given positions of a reduced matrix with `n` factors.
    CMatrix transpose(const CMatrix& m, int n, const std::vector<int>& positions) const {
        CMatrix out(m.rows(), m.cols());
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                std::vector<int> rd(static_cast<std::size_t>(n)), cd(static_cast<std::size_t>(n));
                Eigen::Index rr = r, cc = c;
                for (int p = n - 1; p >= 0; --p) {
                    rd[static_cast<std::size_t>(p)] = static_cast<int>(rr % d);
                    cd[static_cast<std::size_t>(p)] = static_cast<int>(cc % d);
                    rr /= d;
                    cc /= d;
                }
                for (int p : positions) std::swap(rd[static_cast<std::size_t>(p)], cd[static_cast<std::size_t>(p)]);
                Eigen::Index r2 = 0, c2 = 0;
                for (int p = 0; p < n; ++p) {
                    r2 = r2 * d + rd[static_cast<std::size_t>(p)];
                    c2 = c2 * d + cd[static_cast<std::size_t>(p)];
                }
                out(r2, c2) = m(r, c);
            }
        return out;
    }

    double negativity(const CMatrix& full, const std::vector<int>& side_a, const std::vector<int>& side_b) const {
        std::vector<int> keep(side_a);
        keep.insert(keep.end(), side_b.begin(), side_b.end());
        std::vector<int> pos;
        for (std::size_t i = side_a.size(); i < keep.size(); ++i) pos.push_back(static_cast<int>(i));
        const CMatrix pt = transpose(reduce(full, keep), static_cast<int>(keep.size()), pos);
        const auto ev = testing::eigenvalues(pt);
        double neg = 0.0;
        for (Eigen::Index i = 0; i < ev.size(); ++i) neg += std::max(0.0, -ev(i));
        return neg;
    }
};

std::vector<int> flats(const OccupationBasis& b, const std::vector<SiteMode>& sms) {
    std::vector<int> out;
    for (const auto& s : sms) out.push_back(b.flat(s));
    return out;
}

DensityMatrix random_mixed(const BasisPtr& b, std::mt19937& rng, int rank) {
    const auto dim = static_cast<Eigen::Index>(b->dimension());
    CMatrix rho = CMatrix::Zero(dim, dim);
    std::uniform_real_distribution<double> w(0.1, 1.0);
    for (int r = 0; r < rank; ++r) {
        const CVector v = testing::random_vector(rng, dim);
        rho += w(rng) * v * v.adjoint();
    }
    rho /= rho.trace().real();
    return {b, rho};
}

}  // namespace

TEST_SUITE("measures") {

TEST_CASE("Bell pair has negativity one half") {
    const auto b = OccupationBasis::enumerate(2, 1, 1);
    CVector amps = CVector::Zero(4);
    amps(0) = amps(3) = 1.0 / std::sqrt(2.0);
    const PureState bell(b, amps);
    CHECK(negativity(bell, Partition{{{0, 0}}, {{0, 1}}}) == doctest::Approx(0.5).epsilon(1e-12));
    const std::vector<SiteMode> second{{0, 1}};
    CHECK(negativity(partial_trace(bell, b->all_site_modes()), second) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pairwise_negativity(bell, {0, 0}, {0, 1}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(pairwise_negativity(bell, {0, 0}, {0, 0}), ContractError);
    CHECK_THROWS_AS(negativity(bell, Partition{{{0, 0}}, {{0, 0}}}), ContractError);
    CHECK_THROWS_AS(negativity(bell, Partition{{}, {{0, 0}}}), ContractError);
}

TEST_CASE("MES entanglement values") {
    const auto b = NetworkParams{}.make_basis(CapKind::exact);
    const auto mes = mes_state(b, 3, 2);
    CHECK(global_negativity(mes) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(schmidt_number(mes, Partition::species_split(*b)) == 6);
    const auto s = schmidt_coefficients(mes, Partition::species_split(*b));
    REQUIRE(s.size() == 6);
    for (double x : s) CHECK(x == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
    CHECK(fidelity(mes, mes) == doctest::Approx(1.0));
    CHECK(fidelity(DensityMatrix::from_pure(mes), mes) == doctest::Approx(1.0));

    // Values from the dense full-grid oracle.
    const GridOracle o{3, 6};
    const CMatrix full = o.lift(DensityMatrix::from_pure(mes));
    const double pair = o.negativity(full, {0}, {1});
    CHECK(pairwise_negativity(mes, {0, 0}, {0, 1}) == doctest::Approx(pair).epsilon(1e-10));
    const double a1a2_b1b2 = o.negativity(full, {0, 1}, {3, 4});
    CHECK(negativity(mes, Partition{{{0, 0}, {0, 1}}, {{1, 0}, {1, 1}}}) ==
          doctest::Approx(a1a2_b1b2).epsilon(1e-10));
}

TEST_CASE("pure-state negativity equals the sum of Schmidt products") {
    std::mt19937 rng(21);
    const auto b = NetworkParams{}.make_basis(CapKind::at_most);
    for (int trial = 0; trial < 4; ++trial) {
        const PureState psi(b, testing::random_vector(rng, static_cast<Eigen::Index>(b->dimension())));
        const auto part = Partition::species_split(*b);
        const auto s = schmidt_coefficients(psi, part);
        double ref = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j) ref += s[i] * s[j];
        CHECK(global_negativity(psi) == doctest::Approx(ref).epsilon(1e-10));
        double norm2 = 0.0;
        for (double x : s) norm2 += x * x;
        CHECK(norm2 == doctest::Approx(1.0));
    }
}

TEST_CASE("negativities agree with the dense oracle on mixed states") {
    std::mt19937 rng(4);
    const auto b = NetworkParams{}.make_basis(CapKind::at_most);
    const GridOracle o{3, 6};
    for (int trial = 0; trial < 2; ++trial) {
        const auto rho = random_mixed(b, rng, 3);
        const CMatrix full = o.lift(rho);
        CHECK(global_negativity(rho) == doctest::Approx(o.negativity(full, {0, 1, 2}, {3, 4, 5})).epsilon(1e-9));
        CHECK(pairwise_negativity(rho, {0, 2}, {1, 0}) == doctest::Approx(o.negativity(full, {2}, {3})).epsilon(1e-9));
        const Partition p{{{0, 0}, {1, 0}}, {{0, 1}, {1, 2}}};
        CHECK(negativity(rho, p) == doctest::Approx(o.negativity(full, {0, 3}, {1, 5})).epsilon(1e-9));
    }
}

TEST_CASE("tangles agree with the dense oracle") {
    std::mt19937 rng(8);
    const auto b = NetworkParams{}.make_basis(CapKind::at_most);
    const GridOracle o{3, 6};
    const PureState psi(b, testing::random_vector(rng, static_cast<Eigen::Index>(b->dimension())));
    const auto mes = mes_state(NetworkParams{}.make_basis(CapKind::exact), 1, 2);
    for (const auto* state : {&psi}) {
        const CMatrix full = o.lift(DensityMatrix::from_pure(*state));
        for (int species = 0; species < 2; ++species) {
            const auto sites = flats(*b, b->species_site_modes(species));
            double pi_ref = 0.0;
            double log_geo = 0.0;
            for (int i : sites) {
                std::vector<int> rest;
                for (int j : sites)
                    if (j != i) rest.push_back(j);
                const double nr = o.negativity(full, rest, {i});
                double pairs = 0.0;
                for (int j : rest) pairs += std::pow(o.negativity(full, {i}, {j}), 2);
                pi_ref += nr * nr - pairs;
                std::vector<int> everything_else;
                for (int s = 0; s < 6; ++s)
                    if (s != i) everything_else.push_back(s);
                log_geo += std::log(o.negativity(full, everything_else, {i}));
            }
            pi_ref /= 3.0;
            CHECK(pi_tangle(*state, species) == doctest::Approx(pi_ref).epsilon(1e-9));
            CHECK(geo_mean_tangle(*state, species) == doctest::Approx(std::exp(log_geo / 3.0)).epsilon(1e-9));
        }
    }
    // Pure and density forms agree.
    CHECK(pi_tangle(DensityMatrix::from_pure(mes), 0) == doctest::Approx(pi_tangle(mes, 0)).epsilon(1e-10));
    CHECK(geo_mean_tangle(DensityMatrix::from_pure(mes), 1) ==
          doctest::Approx(geo_mean_tangle(mes, 1)).epsilon(1e-10));
}

TEST_CASE("negativity is invariant under local unitaries") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    const auto b = NetworkParams{}.make_basis(CapKind::at_most);
    const auto rho = random_mixed(b, rng, 2);
    const auto part = Partition{{{0, 0}, {0, 1}}, {{1, 0}, {1, 2}}};
    const double before = negativity(rho, part);
    const double pair = pairwise_negativity(rho, {0, 1}, {1, 1});
    SparseOperator u = SparseOperator::identity(b);
    for (const auto& sm : b->all_site_modes()) {
        const double t1 = angle(rng), t2 = angle(rng);
        u = compose(u, local_diagonal_op(b, sm, [&](int n) {
                        return std::polar(1.0, n == 0 ? 0.0 : (n == 1 ? t1 : t2));
                    }));
    }
    const CMatrix U = u.dense();
    const DensityMatrix moved(b, U * rho.matrix() * U.adjoint());
    CHECK(negativity(moved, part) == doctest::Approx(before).epsilon(1e-10));
    CHECK(pairwise_negativity(moved, {0, 1}, {1, 1}) == doctest::Approx(pair).epsilon(1e-10));
}

TEST_CASE("separable and product states") {
    const auto b = NetworkParams{}.make_basis(CapKind::at_most);
    const auto prod = PureState::basis_state(b, std::vector<int>{1, 0, 1, 0, 2, 0});
    CHECK(global_negativity(prod) == 0.0);
    CHECK(schmidt_number(prod, Partition::species_split(*b)) == 1);
    CHECK(geo_mean_tangle(prod, 0) == 0.0);
    CHECK(pi_tangle(prod, 0) == 0.0);
    CHECK_THROWS_AS(schmidt_number(prod, Partition{{{0, 0}}, {{1, 0}}}), ContractError);
    // Classical mixture of product states stays at zero.
    const auto other = PureState::basis_state(b, std::vector<int>{0, 1, 0, 2, 0, 0});
    const CMatrix mix = 0.5 * (DensityMatrix::from_pure(prod).matrix() + DensityMatrix::from_pure(other).matrix());
    CHECK(global_negativity(DensityMatrix(b, mix)) < 1e-14);
    CHECK(fidelity(DensityMatrix(b, mix), prod) == doctest::Approx(0.5));
}

TEST_CASE("fidelity transfers the target basis") {
    const auto exact = NetworkParams{}.make_basis(CapKind::exact);
    const auto at_most = NetworkParams{}.make_basis(CapKind::at_most);
    const auto mes = mes_state(exact, 3, 2);
    CHECK(fidelity(transfer(mes, at_most), mes) == doctest::Approx(1.0));
    const auto vac = PureState::basis_state(at_most, std::vector<int>(6, 0));
    CHECK(fidelity(vac, mes) == 0.0);
    CHECK(fidelity(mes, mes_state(exact, 1, 2)) < 1e-28);
}

}  // TEST_SUITE
