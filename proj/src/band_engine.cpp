#include "magraph/band_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#include "magraph/errors.hpp"
#include "magraph/fiber_operator.hpp"

namespace magraph {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string format_k(const Eigen::VectorXd& k) {
  std::ostringstream os;
  os << "(";
  for (int s = 0; s < k.size(); ++s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", k[s]);
    os << (s ? ", " : "") << buf;
  }
  os << ")";
  return os.str();
}

// Runs fn(i) for i in [0, count), serial or OpenMP. Exceptions are captured
// and rethrown after the loop so they never cross a parallel region.
template <typename Fn>
void run_grid(long long count, Execution exec, Fn&& fn) {
  if (exec == Execution::serial) {
    for (long long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex err_mutex;
  std::string err_msg;
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < count; ++i) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      fn(i);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(err_mutex);
      failed.store(true);
      err_msg = e.what();
    }
  }
  if (failed.load()) throw NumericError(err_msg);
}

}  // namespace

long long KGrid::num_points() const {
  if (dimension < 1 || resolution < 1)
    throw ValidationError("grid needs positive dimension and resolution");
  if (std::pow(static_cast<double>(resolution), dimension) > 9e15)
    throw ValidationError("grid point count overflows");
  long long p = 1;
  for (int s = 0; s < dimension; ++s) p *= resolution;
  return p;
}

Eigen::VectorXd KGrid::point(long long flat_index) const {
  Eigen::VectorXd k(dimension);
  long long rest = flat_index;
  for (int s = dimension - 1; s >= 0; --s) {
    const long long m = rest % resolution;
    rest /= resolution;
    k[s] = kTwoPi * static_cast<double>(m) / resolution;
  }
  return k;
}

Eigen::MatrixXd sample_band_grid(const FundamentalGraph& g, const KGrid& grid,
                                 Execution exec) {
  if (grid.dimension != g.dimension())
    throw ValidationError("grid dimension does not match the graph");
  const long long points = grid.num_points();
  Eigen::MatrixXd samples(points, g.num_vertices());
  run_grid(points, exec, [&](long long i) {
    const Eigen::VectorXd k = grid.point(i);
    try {
      samples.row(i) = fiber_spectrum(build_fiber(g, k)).eigenvalues.transpose();
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at k = " + format_k(k));
    }
  });
  return samples;
}

Eigen::MatrixXd sample_trace_powers(const FundamentalGraph& g, const KGrid& grid,
                                    int n_max, Execution exec) {
  if (grid.dimension != g.dimension())
    throw ValidationError("grid dimension does not match the graph");
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  const long long points = grid.num_points();
  Eigen::MatrixXd traces(points, n_max);
  run_grid(points, exec, [&](long long i) {
    const Eigen::VectorXd k = grid.point(i);
    try {
      traces.row(i) = trace_powers(build_fiber(g, k), n_max).transpose();
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at k = " + format_k(k));
    }
  });
  return traces;
}

BandStructure compute_bands(const FundamentalGraph& g, const BandOptions& opt) {
  if (opt.flat_tol <= 0 || opt.match_tol <= 0)
    throw ValidationError("tolerances must be positive");
  const double nu = g.num_vertices();
  const double work = std::pow(static_cast<double>(opt.resolution), g.dimension()) *
                      nu * nu * nu;
  if (work > opt.work_budget) {
    std::ostringstream msg;
    msg << "band grid work " << work << " exceeds budget " << opt.work_budget;
    throw BudgetError(msg.str());
  }

  BandStructure bs;
  bs.grid = KGrid{g.dimension(), opt.resolution};
  bs.flat_tol = opt.flat_tol;
  bs.samples = sample_band_grid(g, bs.grid, opt.exec);
  bs.bands.resize(g.num_vertices());
  bs.flat_flags.resize(g.num_vertices());
  for (int j = 0; j < g.num_vertices(); ++j) {
    bs.bands[j] = Band{bs.samples.col(j).minCoeff(), bs.samples.col(j).maxCoeff()};
    bs.flat_flags[j] = bs.bands[j].width() <= opt.flat_tol;
  }
  bs.flat_eigenvalues = detect_flat_eigenvalues(bs, opt.match_tol);
  return bs;
}

std::vector<double> detect_flat_eigenvalues(const BandStructure& bs, double match_tol) {
  if (match_tol <= 0) throw ValidationError("match_tol must be positive");
  if (bs.samples.rows() == 0) return {};

  // Candidates: the k = 0 eigenvalues, clustered within match_tol.
  std::vector<double> candidates;
  for (int j = 0; j < bs.samples.cols(); ++j) {
    const double v = bs.samples(0, j);
    if (candidates.empty() || v - candidates.back() > match_tol)
      candidates.push_back(v);
  }

  std::vector<double> flats;
  for (double c : candidates) {
    bool everywhere = true;
    for (long long i = 0; i < bs.samples.rows() && everywhere; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < bs.samples.cols(); ++j)
        best = std::min(best, std::abs(bs.samples(i, j) - c));
      everywhere = best <= match_tol;
    }
    if (everywhere) flats.push_back(c);
  }
  return flats;
}

double first_band_width(const BandStructure& bs) {
  if (bs.bands.empty()) throw ValidationError("band structure is empty");
  return bs.bands[0].width();
}

void write_band_csv(std::ostream& out, const BandStructure& bs) {
  for (int s = 0; s < bs.grid.dimension; ++s) out << (s ? "," : "") << "k" << (s + 1);
  for (int j = 0; j < bs.samples.cols(); ++j) out << ",lambda" << (j + 1);
  out << "\n";
  char buf[40];
  for (long long i = 0; i < bs.samples.rows(); ++i) {
    const Eigen::VectorXd k = bs.grid.point(i);
    for (int s = 0; s < k.size(); ++s) {
      std::snprintf(buf, sizeof buf, "%.17g", k[s]);
      out << (s ? "," : "") << buf;
    }
    for (int j = 0; j < bs.samples.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", bs.samples(i, j));
      out << "," << buf;
    }
    out << "\n";
  }
}

}  // namespace magraph
