#pragma once

#include "kerrnet/fock.hpp"

#include <Eigen/QR>

#include <random>
#include <vector>

namespace testing {

using kerrnet::cplx;
using kerrnet::CMatrix;
using kerrnet::CVector;

inline CVector random_vector(std::mt19937& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = cplx{g(rng), g(rng)};
    }
    return v.normalized();
}

/// Haar-ish random unitary from the QR factor of a Gaussian matrix.
inline CMatrix random_unitary(std::mt19937& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = cplx{g(rng), g(rng)};
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(m);
    return qr.householderQ();
}

/// Random density matrix of full rank on the basis.
inline CMatrix random_density(std::mt19937& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(i, j) = cplx{g(rng), g(rng)};
        }
    }
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

/// Plain full-grid reference state from amplitudes keyed by occupation vectors.
inline CVector grid_vector(int local_dim, int sites, const std::vector<std::pair<std::vector<int>, cplx>>& terms) {
    Eigen::Index dim = 1;
    for (int s = 0; s < sites; ++s) {
        dim *= local_dim;
    }
    CVector v = CVector::Zero(dim);
    for (const auto& [occ, amp] : terms) {
        Eigen::Index code = 0;
        for (int n : occ) {
            code = code * local_dim + n;
        }
        v(code) += amp;
    }
    return v;
}

/// Eigenvalues of a Hermitian matrix, ascending.
inline Eigen::VectorXd eigenvalues(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> s(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return s.eigenvalues();
}

/// Reference partial transpose on a two-factor grid with dims (da, db), transposing the second factor.
inline CMatrix partial_transpose_second(const CMatrix& rho, int da, int db) {
    CMatrix out(rho.rows(), rho.cols());
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j)
            for (int k = 0; k < da; ++k)
                for (int l = 0; l < db; ++l)
                    out(i * db + j, k * db + l) = rho(i * db + l, k * db + j);
    return out;
}

}  // namespace testing
