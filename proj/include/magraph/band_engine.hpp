#pragma once

// Band structures sampled on a quasimomentum grid: per-point sorted fiber
// eigenvalues, band intervals, numeric flat-band flags, and candidates for
// eigenvalues of infinite multiplicity. The grid can only falsify flatness;
// exact certification lives in the trace engine.
//
// The grid kernels come in a serial reference flavour and an OpenMP-parallel
// one. Both fill rows independently in grid order, so their outputs are
// identical and byte-stable.

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "magraph/fundamental_graph.hpp"
#include "magraph/kgrid.hpp"

namespace magraph {

struct Band {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

struct BandOptions {
  int resolution = 64;
  double flat_tol = 1e-10;
  double match_tol = 1e-8;
  double work_budget = 1e9;  // cap on N^d * nu^3
  Execution exec = Execution::parallel;
};

struct BandStructure {
  KGrid grid;
  Eigen::MatrixXd samples;  // num_points x nu, each row sorted ascending
  std::vector<Band> bands;
  std::vector<bool> flat_flags;
  std::vector<double> flat_eigenvalues;
  double flat_tol = 0.0;
};

// Row i holds the sorted eigenvalues of H(k_i). Grid endpoint extremes carry
// the usual O(1/N^2) sampling error; no interpolation is attempted.
Eigen::MatrixXd sample_band_grid(const FundamentalGraph& g, const KGrid& grid,
                                 Execution exec = Execution::parallel);

// Rows of Tr H^n(k_i) for n = 1..n_max, same serial/parallel split.
Eigen::MatrixXd sample_trace_powers(const FundamentalGraph& g, const KGrid& grid,
                                    int n_max, Execution exec = Execution::serial);

BandStructure compute_bands(const FundamentalGraph& g, const BandOptions& opt = {});

// Values present (within match_tol) in the spectrum of every sampled fiber,
// clustered around the k = 0 eigenvalues. Grid-level necessary check only.
std::vector<double> detect_flat_eigenvalues(const BandStructure& bs, double match_tol);

double first_band_width(const BandStructure& bs);

// One row per grid point: k_1..k_d, lambda_1..lambda_nu, 17 significant
// digits, header included.
void write_band_csv(std::ostream& out, const BandStructure& bs);

}  // namespace magraph
