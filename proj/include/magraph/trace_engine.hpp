#pragma once

// Indexed Fourier coefficients of Tr H^n(k) and the exact flat-spectrum
// criterion built on them.
//
// Both routes to the coefficients live here:
//   * production: powers of the symbolic Laurent matrix of the loop-augmented
//     fundamental graph (one weight-q loop per vertex, real edges weighted -1);
//   * oracle: explicit enumeration of rooted length-n cycles with a given
//     index, summing weight * e^{-i flux}. Exponential in n, capped, kept for
//     tests and for assembling coupling-sweep polynomials.
//
// The spectrum is flat exactly when every coefficient with gamma != 0
// vanishes for n = 1..nu; otherwise the lexicographically first offender
// certifies a nonempty a.c. component.

#include <complex>
#include <iosfwd>
#include <vector>

#include "magraph/band_engine.hpp"
#include "magraph/fundamental_graph.hpp"
#include "magraph/kgrid.hpp"
#include "magraph/laurent.hpp"

namespace magraph {

struct WeightedEdge {
  int from = 0;
  int to = 0;
  std::vector<int> cell_shift;
  double phase = 0.0;
  double weight = 0.0;  // -1 for real edges, onsite(v) for the added loops
};

// Fundamental graph with all orientations materialized plus one zero-shift,
// zero-phase loop per vertex carrying weight onsite(v).
struct ModifiedGraph {
  int dimension = 1;
  int num_vertices = 0;
  std::vector<WeightedEdge> edges;          // stored, then inverses, then loops
  std::vector<std::vector<int>> outgoing;   // edge ids grouped by source vertex

  static ModifiedGraph build(const FundamentalGraph& g);
};

struct Cycle {
  std::vector<int> edge_ids;
  double weight = 1.0;  // product of edge weights
  double flux = 0.0;    // sum of phases, unreduced
};

// Representative of flux mod 2*pi in (-pi, pi]; exactly -pi maps to +pi.
double reduce_flux(double flux);

// All rooted length-n edge sequences closing at their start vertex with total
// shift gamma. Sequences differing only by the starting point are distinct,
// matching the vertex-tuple expansion of Tr H^n.
std::vector<Cycle> enumerate_cycles(const ModifiedGraph& mg, int length,
                                    const std::vector<int>& gamma, int cap = 8);

// sum over cycles of weight * e^{-i flux}
std::complex<double> cycle_sum(const std::vector<Cycle>& cycles);

// Symbolic fiber operator of the modified graph; entry (u,v) collects
// weight * e^{-i alpha} at key tau over the u -> v edges.
LaurentMatrix build_laurent_matrix(const FundamentalGraph& g);

struct TraceOptions {
  int n_cap = 12;
  long long term_budget = 2'000'000;
};

struct IndexedTraceSeries {
  int dimension = 1;
  int n_max = 0;
  std::vector<LaurentSeries> per_n;

  const LaurentSeries& power(int n) const { return per_n.at(n - 1); }
};

IndexedTraceSeries trace_fourier(const FundamentalGraph& g, int n_max,
                                 const TraceOptions& opt = {});

struct FlatVerdict {
  bool flat = true;
  // certificate of a nonempty a.c. component when !flat
  int witness_n = 0;
  std::vector<int> witness_gamma;
  std::complex<double> witness_coeff;
};

FlatVerdict flat_spectrum_verdict(const IndexedTraceSeries& series, int nu,
                                  double tol = 1e-9);

struct ParsevalRow {
  int n = 0;
  double grid_average = 0.0;  // grid mean of (Tr H^n(k))^2
  double coeff_sum_sq = 0.0;  // sum over gamma of |h_{n,gamma}|^2
  double center_sq = 0.0;     // |h_{n,0}|^2; equals grid_average iff flat at this n
  double residual = 0.0;      // |grid_average - coeff_sum_sq|
  bool grid_exact = false;    // resolution >= 2*n*tau_+ + 1
};

std::vector<ParsevalRow> parseval_check(const FundamentalGraph& g,
                                        const IndexedTraceSeries& series,
                                        const KGrid& grid,
                                        Execution exec = Execution::serial);

// Max relative mismatch between the Fourier evaluation of the series and
// Tr H^n sampled directly, over all grid points and n.
double trace_series_grid_error(const FundamentalGraph& g,
                               const IndexedTraceSeries& series, const KGrid& grid,
                               Execution exec = Execution::serial);

// Newton's identities: characteristic polynomial coefficients xi_1..xi_nu of
// lambda^nu + xi_1 lambda^{nu-1} + ... + xi_nu from the power sums T_1..T_nu.
std::vector<double> char_poly_from_traces(const std::vector<double>& traces);

// Rows n, gamma_1..gamma_d, Re, Im sorted by (n, lexicographic gamma).
void write_trace_csv(std::ostream& out, const IndexedTraceSeries& series);

}  // namespace magraph
