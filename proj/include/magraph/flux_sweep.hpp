#pragma once

// Coupling-constant sweep for the family H_{t*alpha}: pick one nonzero
// indexed trace coefficient of the zero-coupling operator, turn its cycle sum
// into the exponential polynomial f(t) = sum w_j e^{-i t phi_j} (unreduced
// fluxes, since scaling by t does not commute with mod-2*pi reduction), and
// locate the finitely many t where f vanishes. A zero of f is only a
// candidate; each one is certified by the exact flat-spectrum criterion.

#include <complex>
#include <iosfwd>
#include <utility>
#include <vector>

#include "magraph/fundamental_graph.hpp"
#include "magraph/trace_engine.hpp"

namespace magraph {

struct ExponentialPolynomial {
  std::vector<double> frequencies;             // sorted, pairwise distinct
  std::vector<std::complex<double>> weights;   // parallel to frequencies

  static ExponentialPolynomial from_terms(
      std::vector<std::pair<double, std::complex<double>>> terms);

  std::complex<double> eval(double t) const;
  double weight_norm() const;  // sum of |w_j|
  std::size_t term_count() const { return weights.size(); }
  bool is_zero() const { return weights.empty(); }
  // Single frequency class: |f| is constant, so no isolated zeros exist.
  bool has_constant_modulus() const { return weights.size() <= 1; }
};

// Smallest n, then lexicographically smallest gamma != 0, with a coefficient
// above tol in the zero-coupling series. Its absence contradicts the
// non-degenerate first band of the potential-only operator and signals a
// modeling problem (for example a quotient whose cover is disconnected).
std::pair<int, std::vector<int>> select_witness(const IndexedTraceSeries& series0,
                                                int nu, double tol = 1e-9);

ExponentialPolynomial build_f(const FundamentalGraph& g, int n,
                              const std::vector<int>& gamma, int cycle_cap = 8);

// Uniform sampling of |f|^2 with golden-section refinement of the qualifying
// local minima. Throws NumericError if f is identically zero.
std::vector<double> find_zeros(const ExponentialPolynomial& f, double t_min,
                               double t_max, int samples);

struct SweepOptions {
  double t_min = 0.0;
  double t_max = 1.0;
  int samples = 4096;
  double tol = 1e-9;  // witness selection and per-candidate verdicts
  int cycle_cap = 8;
  TraceOptions trace;
};

struct SweepCandidate {
  double t = 0.0;
  double f_abs = 0.0;  // |f(t)| after refinement
  FlatVerdict verdict;
};

struct SweepReport {
  int witness_n = 0;
  std::vector<int> witness_gamma;
  std::complex<double> f_at_zero = 0.0;  // f(0), the zero-coupling coefficient
  double t_min = 0.0;
  double t_max = 0.0;
  int samples = 0;
  bool constant_f = false;
  ExponentialPolynomial f;
  std::vector<SweepCandidate> candidates;  // ascending t
};

SweepReport sweep(const FundamentalGraph& g, const SweepOptions& opt = {});

// Text summary followed by a CSV block: t_zero, verdict, n, gamma, |f|.
void write_sweep_report(std::ostream& out, const SweepReport& report);

}  // namespace magraph
