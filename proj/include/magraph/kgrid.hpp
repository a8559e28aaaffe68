#pragma once

// Uniform quasimomentum grids on the torus: N points per axis at 2*pi*m/N,
// m in {0..N-1}^d, flattened with the last axis fastest. k = 0 is point 0.

#include <Eigen/Dense>

namespace magraph {

struct KGrid {
  int dimension = 1;
  int resolution = 64;

  long long num_points() const;
  Eigen::VectorXd point(long long flat_index) const;
};

enum class Execution { serial, parallel };

}  // namespace magraph
