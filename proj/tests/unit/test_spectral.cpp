#include "kerrnet/errors.hpp"
#include "kerrnet/spectral.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace kerrnet;
using std::numbers::pi;

namespace {

SpectrumSweep synthetic(const std::vector<double>& grid, const std::function<double(double)>& gap) {
    SpectrumSweep s;
    s.phi_grid = grid;
    s.levels = Eigen::MatrixXd(static_cast<Eigen::Index>(grid.size()), 2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.levels(static_cast<Eigen::Index>(i), 0) = -1.0;
        s.levels(static_cast<Eigen::Index>(i), 1) = -1.0 + gap(grid[i]);
    }
    return s;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("uniform grid") {
    const auto g = uniform_grid(0.0, pi, 721);
    CHECK(g.size() == 721);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == pi);
    CHECK(g[360] == doctest::Approx(pi / 2));
    CHECK(uniform_grid(0.3, 0.3, 1) == std::vector<double>{0.3});
    CHECK_THROWS_AS(uniform_grid(0, 1, 0), ContractError);
}

TEST_CASE("sweep matches dense diagonalization and trace") {
    const NetworkParams p = NetworkParams::balanced(1.0);
    const auto grid = uniform_grid(0.0, pi, 13);
    const auto sweep = eigen_sweep(p, grid, 0, true);
    REQUIRE(sweep.levels.rows() == 13);
    REQUIRE(sweep.levels.cols() == 36);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto row = static_cast<Eigen::Index>(g);
        const CMatrix h = build_hamiltonian(p, sweep.basis, grid[g], grid[g]).dense();
        Eigen::SelfAdjointEigenSolver<CMatrix> ref(h, Eigen::EigenvaluesOnly);
        CHECK((sweep.levels.row(row).transpose() - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(sweep.levels.row(row).sum() == doctest::Approx(h.trace().real()).epsilon(1e-10));
        for (Eigen::Index k = 1; k < 36; ++k) CHECK(sweep.levels(row, k) >= sweep.levels(row, k - 1));
        const CMatrix& v = sweep.vectors[g];
        CHECK((h * v - v * sweep.levels.row(row).transpose().asDiagonal()).norm() < 1e-9);
    }
    // Truncated levels are the lowest ones.
    const auto low = eigen_sweep(p, grid, 4);
    CHECK((low.levels - sweep.levels.leftCols(4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(low.vectors.empty());
    CHECK_THROWS_AS(eigen_sweep(p, grid, 37), ContractError);
    CHECK_THROWS_AS(eigen_sweep(p, {}, 0), ContractError);
}

TEST_CASE("spectral symmetries of the three-site ring") {
    const NetworkParams p = NetworkParams::balanced(1.0);
    const std::vector<double> grid{0.2, 0.2 + 2 * pi / 3, -0.2};
    const auto s = eigen_sweep(p, grid);
    // Flux periodicity 2 pi / N and time reversal phi -> -phi.
    CHECK((s.levels.row(0) - s.levels.row(1)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((s.levels.row(0) - s.levels.row(2)).cwiseAbs().maxCoeff() < 1e-10);
    // The MES is a zero-energy eigenstate at pi/2.
    const auto half = eigen_sweep(p, {pi / 2});
    CHECK(half.levels.row(0).cwiseAbs().minCoeff() < 1e-10);
}

TEST_CASE("sweep is unchanged under grid refinement") {
    const NetworkParams p = NetworkParams::balanced(0.5);
    const auto coarse = eigen_sweep(p, uniform_grid(0.0, pi, 11));
    const auto fine = eigen_sweep(p, uniform_grid(0.0, pi, 21));
    for (Eigen::Index i = 0; i < 11; ++i) {
        CHECK((coarse.levels.row(i) - fine.levels.row(2 * i)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("parabolic refinement recovers a quadratic minimum") {
    const auto grid = uniform_grid(0.0, 2.0, 21);
    const auto s = synthetic(grid, [](double x) { return 0.1 + 3.0 * (x - 1.03) * (x - 1.03); });
    const auto alc = detect_alc(s);
    REQUIRE(alc.size() == 1);
    CHECK(alc[0].phi_star == doctest::Approx(1.03).epsilon(1e-12));
    CHECK(alc[0].gap == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(alc[0].grid_index == 10);
    CHECK(detect_alc(synthetic(grid, [](double x) { return 1.0 + x; })).empty());
    // Endpoint minima are not reported.
    CHECK(detect_alc(synthetic(grid, [](double x) { return 1.0 - x; })).empty());
    // Two separate minima.
    const auto two = detect_alc(synthetic(grid, [](double x) { return 1.5 + std::cos(2 * pi * x); }));
    CHECK(two.size() == 2);
    CHECK_THROWS_AS(detect_alc(s, 1), ContractError);
}

TEST_CASE("detected crossings are stable under grid halving") {
    const NetworkParams p = NetworkParams::balanced(1.0);
    const auto coarse = detect_alc(eigen_sweep(p, uniform_grid(0.0, pi, 361), 2));
    const auto fine = detect_alc(eigen_sweep(p, uniform_grid(0.0, pi, 721), 2));
    REQUIRE(coarse.size() == fine.size());
    REQUIRE(!fine.empty());
    for (std::size_t i = 0; i < fine.size(); ++i) {
        CHECK(std::abs(coarse[i].phi_star - fine[i].phi_star) <= pi / 360);
    }
}

TEST_CASE("tracking follows a true crossing through the level order") {
    // Two basis states whose energies cross at x = 0.5; no coupling.
    SpectrumSweep s;
    s.phi_grid = uniform_grid(0.0, 1.0, 5);
    s.levels = Eigen::MatrixXd(5, 2);
    for (int i = 0; i < 5; ++i) {
        const double x = s.phi_grid[static_cast<std::size_t>(i)];
        const bool swapped = x > 0.5;
        s.levels(i, 0) = std::min(x, 1 - x);
        s.levels(i, 1) = std::max(x, 1 - x);
        CMatrix v = CMatrix::Identity(2, 2);
        if (swapped) v.col(0).swap(v.col(1));
        s.vectors.push_back(v);
    }
    auto path = track_state(s, 0);
    CHECK(path.level == std::vector<int>{0, 0, 0, 1, 1});
    for (double o : path.overlap) CHECK(o == doctest::Approx(1.0));
    // Equal overlaps with both candidates: the lower index wins and the step is flagged.
    s.vectors[2] = CMatrix::Identity(2, 2);
    s.vectors[2].col(0) = CVector::Constant(2, 1.0 / std::sqrt(2.0));
    s.vectors[2].col(1) = (CVector(2) << 1.0, -1.0).finished() / std::sqrt(2.0);
    s.vectors[3] = CMatrix::Identity(2, 2);
    path = track_state(s, 0);
    CHECK(path.ambiguous[3]);
    CHECK(path.level[3] == 0);
    CHECK_THROWS_AS(track_state(s, 2), ContractError);
    s.vectors.clear();
    CHECK_THROWS_AS(track_state(s, 0), ContractError);
}

}  // TEST_SUITE
