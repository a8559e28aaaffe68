#pragma once

// Sparse finite Laurent series in d torus variables: a map from gamma in Z^d
// to a complex coefficient, evaluated as sum_gamma c_gamma e^{-i<gamma,k>}.
// Matrices of such series represent fiber operators symbolically; their
// powers yield the indexed trace coefficients.
//
// Accumulation tracks the largest contribution magnitude and prunes finished
// maps at 1e-15 of it, so cancellations (opposite phases on multiple edges)
// produce structural zeros instead of noise entries.

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace magraph {

class LaurentSeries {
 public:
  using Key = std::vector<int>;
  using Map = std::map<Key, std::complex<double>>;  // lexicographic key order

  explicit LaurentSeries(int dimension = 1) : dim_(dimension) {}

  int dimension() const { return dim_; }
  const Map& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  std::complex<double> coeff(const Key& gamma) const;
  std::complex<double> eval(const Eigen::VectorXd& k) const;

 private:
  friend class LaurentBuilder;
  int dim_;
  Map terms_;
};

// Accumulates in extended precision so that terms summed in different orders
// (matrix powers vs cycle enumeration) agree to well below 1e-12.
class LaurentBuilder {
 public:
  static constexpr double kPruneRel = 1e-15;

  explicit LaurentBuilder(int dimension) : dim_(dimension) {}

  void add(LaurentSeries::Key gamma, std::complex<double> c);
  void add_series(const LaurentSeries& s);
  // All pairwise products a_i * b_j at shifted keys (series multiplication).
  void add_product(const LaurentSeries& a, const LaurentSeries& b);

  LaurentSeries finish();

 private:
  int dim_;
  std::map<LaurentSeries::Key, std::complex<long double>> acc_;
  double max_contribution_ = 0.0;
};

struct LaurentMatrix {
  int dimension = 1;
  int size = 0;  // nu
  std::vector<LaurentSeries> entries;  // row-major, size*size

  const LaurentSeries& at(int row, int col) const { return entries[row * size + col]; }
  LaurentSeries& at(int row, int col) { return entries[row * size + col]; }

  long long term_count() const;
  LaurentMatrix multiply(const LaurentMatrix& rhs, long long term_budget) const;
  LaurentSeries trace() const;
};

}  // namespace magraph
