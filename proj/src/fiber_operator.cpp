#include "magraph/fiber_operator.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "magraph/errors.hpp"

namespace magraph {

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint().eval()).cwiseAbs().maxCoeff();
}

FiberOperator build_fiber(const FundamentalGraph& g, const Eigen::VectorXd& k) {
  if (k.size() != g.dimension())
    throw ValidationError("quasimomentum has " + std::to_string(k.size()) +
                          " components, expected " + std::to_string(g.dimension()));
  const int nu = g.num_vertices();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(nu, nu);
  for (const auto& e : g.edges()) {
    double theta = e.phase;
    for (int s = 0; s < g.dimension(); ++s) theta += e.cell_shift[s] * k[s];
    const std::complex<double> z = std::polar(1.0, -theta);
    if (e.from == e.to) {
      // both orientations of a loop; their sum is exactly real
      a(e.from, e.from) += 2.0 * z.real();
    } else {
      a(e.from, e.to) += z;
      a(e.to, e.from) += std::conj(z);  // keeps A Hermitian to the last bit
    }
  }
  FiberOperator h;
  h.k = k;
  h.matrix = -a;
  for (int v = 0; v < nu; ++v) h.matrix(v, v) += g.onsite(v);
  return h;
}

FiberSpectrum fiber_spectrum(const FiberOperator& h, bool want_vectors) {
  const double defect = hermiticity_defect(h.matrix);
  if (defect > kHermitianTol) {
    std::ostringstream msg;
    msg << "fiber matrix is not Hermitian (defect " << defect << ")";
    throw NumericError(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      h.matrix, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericError("Hermitian eigensolver did not converge");

  FiberSpectrum spec;
  spec.eigenvalues = solver.eigenvalues();
  if (want_vectors) {
    spec.eigenvectors = solver.eigenvectors();
    const double scale = h.matrix.norm();
    for (int j = 0; j < spec.eigenvalues.size(); ++j) {
      const double res = (h.matrix * spec.eigenvectors.col(j) -
                          spec.eigenvalues[j] * spec.eigenvectors.col(j))
                             .norm();
      if (res > 1e-10 * scale && res > 1e-300)
        throw NumericError("eigenpair residual " + std::to_string(res) +
                           " exceeds tolerance");
    }
  }
  return spec;
}

Eigen::VectorXd trace_powers(const FiberOperator& h, int n_max) {
  if (n_max < 1) throw ValidationError("trace power order must be >= 1");
  const double scale = h.matrix.norm();
  Eigen::VectorXd out(n_max);
  Eigen::MatrixXcd p = h.matrix;
  double bound = scale;
  for (int n = 1; n <= n_max; ++n) {
    const std::complex<double> tr = p.trace();
    if (std::abs(tr.imag()) > 1e-10 * bound)
      throw NumericError("Tr H^" + std::to_string(n) +
                         " has a non-negligible imaginary part " +
                         std::to_string(tr.imag()) +
                         "; Hermitian invariant is broken");
    out[n - 1] = tr.real();
    if (n < n_max) {
      p = (p * h.matrix).eval();
      bound *= scale;
    }
  }
  return out;
}

double trace_power(const FiberOperator& h, int n) {
  return trace_powers(h, n)[n - 1];
}

}  // namespace magraph
