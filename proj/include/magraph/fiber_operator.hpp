#pragma once

// The nu x nu Hermitian fiber matrix H(k) = q - A(k) at a quasimomentum k,
// its spectrum, and traces of its powers. Entry (u,v) of A sums
// exp(-i(alpha(e) + <tau(e),k>)) over the oriented edges from u to v, so
// everything here is 2*pi-periodic in each component of k.

#include <Eigen/Dense>

#include "magraph/fundamental_graph.hpp"

namespace magraph {

struct FiberOperator {
  Eigen::VectorXd k;
  Eigen::MatrixXcd matrix;  // Hermitian by construction
};

struct FiberSpectrum {
  Eigen::VectorXd eigenvalues;    // non-decreasing
  Eigen::MatrixXcd eigenvectors;  // columns; 0x0 unless requested
};

// Entrywise Hermitian defect max|M - M^H|; the fiber construction keeps it at
// exactly zero, anything above 1e-13 downstream means a broken invariant.
double hermiticity_defect(const Eigen::MatrixXcd& m);

FiberOperator build_fiber(const FundamentalGraph& g, const Eigen::VectorXd& k);

FiberSpectrum fiber_spectrum(const FiberOperator& h, bool want_vectors = false);

// Tr H^n for n = 1..n_max via repeated multiplication. The imaginary part of
// each trace must vanish to 1e-10 * ||H||_F^n or a NumericError is thrown.
Eigen::VectorXd trace_powers(const FiberOperator& h, int n_max);
double trace_power(const FiberOperator& h, int n);

inline constexpr double kHermitianTol = 1e-13;

}  // namespace magraph
