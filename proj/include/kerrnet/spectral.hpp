#pragma once

#include "kerrnet/model.hpp"

#include <optional>
#include <vector>

namespace kerrnet {

/// Eigen-structure of H(phi, phi) over a phase grid.
struct SpectrumSweep {
    std::vector<double> phi_grid;
    Eigen::MatrixXd levels;        // [grid point, level], ascending per row
    std::vector<CMatrix> vectors;  // eigenvectors as columns; empty unless requested
    BasisPtr basis;
};

/// `count` evenly spaced points from `lo` to `hi` inclusive.
std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

/// n_levels = 0 keeps every level. Uses the exact-total basis of the params.
SpectrumSweep eigen_sweep(const NetworkParams& params, const std::vector<double>& phi_grid, int n_levels = 0,
                          bool with_vectors = false, unsigned workers = 0);

struct TrackedPath {
    std::vector<int> level;
    std::vector<double> overlap;     // |<previous|chosen>|
    std::vector<bool> ambiguous;     // two candidates within the tie tolerance
};

/// Follows the eigenvector with the largest overlap with its predecessor.
TrackedPath track_state(const SpectrumSweep& sweep, int start_level, double tie_tolerance = 1e-9);

struct AvoidedCrossing {
    double phi_star = 0.0;
    double gap = 0.0;
    std::size_t grid_index = 0;
};

/// Interior local minima of levels(:, lower+1) - levels(:, lower), refined by a three-point parabola.
std::vector<AvoidedCrossing> detect_alc(const SpectrumSweep& sweep, int lower_level = 0);

}  // namespace kerrnet
