#include "kerrnet/spectral.hpp"

#include "kerrnet/errors.hpp"
#include "kerrnet/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kerrnet {

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
    if (count == 0) {
        throw ContractError("uniform_grid: count must be >= 1");
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> out(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + step * static_cast<double>(i);
    }
    out.back() = hi;
    return out;
}

SpectrumSweep eigen_sweep(const NetworkParams& params, const std::vector<double>& phi_grid, int n_levels,
                          bool with_vectors, unsigned workers) {
    if (phi_grid.empty()) {
        throw ContractError("eigen_sweep: phase grid is empty");
    }
    const auto basis = params.make_basis(CapKind::exact);
    const auto terms = HamiltonianTerms::build(params, basis);
    const auto d = static_cast<int>(basis->dimension());
    if (n_levels == 0) {
        n_levels = d;
    }
    if (n_levels < 1 || n_levels > d) {
        throw ContractError("eigen_sweep: n_levels must lie in [1, " + std::to_string(d) + "]");
    }

    SpectrumSweep out;
    out.phi_grid = phi_grid;
    out.basis = basis;
    out.levels = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(phi_grid.size()), n_levels);
    if (with_vectors) {
        out.vectors.resize(phi_grid.size());
    }
    parallel_for(
        phi_grid.size(),
        [&](std::size_t g) {
            const double phi = phi_grid[g];
            const CMatrix h = terms.assemble(phi, phi).dense();
            Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, with_vectors ? Eigen::ComputeEigenvectors
                                                                           : Eigen::EigenvaluesOnly);
            if (solver.info() != Eigen::Success) {
                throw NumericalError("eigen_sweep: eigensolver failed at grid index " + std::to_string(g) +
                                     " (phi = " + std::to_string(phi) + ")");
            }
            out.levels.row(static_cast<Eigen::Index>(g)) = solver.eigenvalues().head(n_levels).transpose();
            if (with_vectors) {
                out.vectors[g] = solver.eigenvectors().leftCols(n_levels);
            }
        },
        workers);
    return out;
}

TrackedPath track_state(const SpectrumSweep& sweep, int start_level, double tie_tolerance) {
    if (sweep.vectors.size() != sweep.phi_grid.size()) {
        throw ContractError("track_state: sweep was computed without eigenvectors");
    }
    if (start_level < 0 || start_level >= sweep.levels.cols()) {
        throw ContractError("track_state: start level out of range");
    }
    TrackedPath path;
    path.level.push_back(start_level);
    path.overlap.push_back(1.0);
    path.ambiguous.push_back(false);
    CVector previous = sweep.vectors[0].col(start_level);
    for (std::size_t g = 1; g < sweep.phi_grid.size(); ++g) {
        const Eigen::VectorXd overlaps = (sweep.vectors[g].adjoint() * previous).cwiseAbs();
        Eigen::Index best = 0;
        overlaps.maxCoeff(&best);  // first maximum, i.e. the lower index on exact ties
        bool tie = false;
        for (Eigen::Index k = 0; k < overlaps.size(); ++k) {
            if (k != best && std::abs(overlaps(k) - overlaps(best)) <= tie_tolerance) {
                tie = true;
                best = std::min(best, k);
            }
        }
        path.level.push_back(static_cast<int>(best));
        path.overlap.push_back(std::min(1.0, overlaps(best)));
        path.ambiguous.push_back(tie);
        previous = sweep.vectors[g].col(best);
    }
    return path;
}

std::vector<AvoidedCrossing> detect_alc(const SpectrumSweep& sweep, int lower_level) {
    if (lower_level < 0 || lower_level + 1 >= sweep.levels.cols()) {
        throw ContractError("detect_alc: level pair out of range");
    }
    const auto n = sweep.phi_grid.size();
    std::vector<double> gap(n);
    for (std::size_t g = 0; g < n; ++g) {
        const auto r = static_cast<Eigen::Index>(g);
        gap[g] = sweep.levels(r, lower_level + 1) - sweep.levels(r, lower_level);
    }
    std::vector<AvoidedCrossing> out;
    for (std::size_t g = 1; g + 1 < n; ++g) {
        if (!(gap[g] < gap[g - 1] && gap[g] <= gap[g + 1])) {
            continue;
        }
        const double x0 = sweep.phi_grid[g - 1];
        const double x1 = sweep.phi_grid[g];
        const double x2 = sweep.phi_grid[g + 1];
        const double g0 = gap[g - 1];
        const double g1 = gap[g];
        const double g2 = gap[g + 1];
        // Newton form: p(x) = g0 + d1 (x - x0) + d2 (x - x0)(x - x1)
        const double d1 = (g1 - g0) / (x1 - x0);
        const double d2 = ((g2 - g1) / (x2 - x1) - d1) / (x2 - x0);
        double xs = x1;
        double gs = g1;
        if (d2 > 0.0) {
            xs = std::clamp(0.5 * (x0 + x1) - d1 / (2.0 * d2), x0, x2);
            gs = g0 + d1 * (xs - x0) + d2 * (xs - x0) * (xs - x1);
        }
        out.push_back({xs, std::max(0.0, gs), g});
    }
    return out;
}

}  // namespace kerrnet
