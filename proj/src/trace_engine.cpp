#include "magraph/trace_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "magraph/errors.hpp"
#include "magraph/fiber_operator.hpp"

namespace magraph {

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

ModifiedGraph ModifiedGraph::build(const FundamentalGraph& g) {
  ModifiedGraph mg;
  mg.dimension = g.dimension();
  mg.num_vertices = g.num_vertices();
  for (const auto& e : g.edges()) {
    mg.edges.push_back({e.from, e.to, e.cell_shift, e.phase, -1.0});
  }
  for (const auto& e : g.edges()) {
    OrientedEdge inv = inverse(e);
    mg.edges.push_back({inv.from, inv.to, std::move(inv.cell_shift), inv.phase, -1.0});
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    mg.edges.push_back({v, v, std::vector<int>(g.dimension(), 0), 0.0, g.onsite(v)});
  }
  mg.outgoing.resize(g.num_vertices());
  for (size_t i = 0; i < mg.edges.size(); ++i)
    mg.outgoing[mg.edges[i].from].push_back(static_cast<int>(i));
  return mg;
}

double reduce_flux(double flux) {
  double r = std::remainder(flux, kTwoPi);
  if (r == -kPi) r = kPi;
  return r;
}

std::vector<Cycle> enumerate_cycles(const ModifiedGraph& mg, int length,
                                    const std::vector<int>& gamma, int cap) {
  if (length < 1) throw ValidationError("cycle length must be >= 1");
  if (length > cap)
    throw ValidationError("cycle length " + std::to_string(length) +
                          " exceeds the enumeration cap " + std::to_string(cap));
  if (static_cast<int>(gamma.size()) != mg.dimension)
    throw ValidationError("cycle index has wrong dimension");

  // per-axis reachability bound used to prune the walk
  std::vector<int> max_step(mg.dimension, 0);
  for (const auto& e : mg.edges)
    for (int s = 0; s < mg.dimension; ++s)
      max_step[s] = std::max(max_step[s], std::abs(e.cell_shift[s]));

  std::vector<Cycle> found;
  std::vector<int> shift(mg.dimension, 0);
  std::vector<int> path;
  path.reserve(length);

  auto reachable = [&](int steps_left) {
    for (int s = 0; s < mg.dimension; ++s)
      if (std::abs(gamma[s] - shift[s]) >
          static_cast<long long>(steps_left) * max_step[s])
        return false;
    return true;
  };

  int start = 0;
  double weight = 1.0;
  double flux = 0.0;
  auto walk = [&](auto&& self, int vertex, int depth) -> void {
    if (depth == length) {
      if (vertex == start && shift == gamma) found.push_back({path, weight, flux});
      return;
    }
    if (!reachable(length - depth)) return;
    for (int id : mg.outgoing[vertex]) {
      const WeightedEdge& e = mg.edges[id];
      for (int s = 0; s < mg.dimension; ++s) shift[s] += e.cell_shift[s];
      const double w_before = weight;
      weight *= e.weight;
      flux += e.phase;
      path.push_back(id);
      self(self, e.to, depth + 1);
      path.pop_back();
      flux -= e.phase;
      weight = w_before;
      for (int s = 0; s < mg.dimension; ++s) shift[s] -= e.cell_shift[s];
    }
  };

  for (start = 0; start < mg.num_vertices; ++start) walk(walk, start, 0);
  return found;
}

std::complex<double> cycle_sum(const std::vector<Cycle>& cycles) {
  std::complex<long double> sum(0.0L, 0.0L);
  for (const auto& c : cycles) {
    const std::complex<double> term = c.weight * std::polar(1.0, -c.flux);
    sum += std::complex<long double>(term.real(), term.imag());
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

LaurentMatrix build_laurent_matrix(const FundamentalGraph& g) {
  const int nu = g.num_vertices();
  std::vector<LaurentBuilder> builders;
  builders.reserve(static_cast<size_t>(nu) * nu);
  for (int i = 0; i < nu * nu; ++i) builders.emplace_back(g.dimension());

  auto builder_at = [&](int r, int c) -> LaurentBuilder& {
    return builders[r * nu + c];
  };

  for (const auto& e : g.edges()) {
    const std::complex<double> z = std::polar(1.0, -e.phase);
    std::vector<int> neg(e.cell_shift.size());
    for (size_t s = 0; s < neg.size(); ++s) neg[s] = -e.cell_shift[s];
    builder_at(e.from, e.to).add(e.cell_shift, -z);
    builder_at(e.to, e.from).add(std::move(neg), -std::conj(z));
  }
  for (int v = 0; v < nu; ++v)
    builder_at(v, v).add(std::vector<int>(g.dimension(), 0), g.onsite(v));

  LaurentMatrix m;
  m.dimension = g.dimension();
  m.size = nu;
  m.entries.reserve(builders.size());
  for (auto& b : builders) m.entries.push_back(b.finish());
  return m;
}

IndexedTraceSeries trace_fourier(const FundamentalGraph& g, int n_max,
                                 const TraceOptions& opt) {
  if (n_max < 1) throw ValidationError("n_max must be >= 1");
  if (n_max > opt.n_cap)
    throw BudgetError("n_max " + std::to_string(n_max) +
                      " exceeds the configured cap " + std::to_string(opt.n_cap));

  IndexedTraceSeries series;
  series.dimension = g.dimension();
  series.n_max = n_max;
  series.per_n.reserve(n_max);

  const LaurentMatrix m = build_laurent_matrix(g);
  LaurentMatrix p = m;
  series.per_n.push_back(p.trace());
  for (int n = 2; n <= n_max; ++n) {
    p = p.multiply(m, opt.term_budget);
    series.per_n.push_back(p.trace());
  }
  return series;
}

FlatVerdict flat_spectrum_verdict(const IndexedTraceSeries& series, int nu, double tol) {
  if (nu < 1) throw ValidationError("nu must be >= 1");
  if (series.n_max < nu)
    throw ValidationError("trace series covers n <= " + std::to_string(series.n_max) +
                          " but the verdict needs n <= " + std::to_string(nu));
  const std::vector<int> zero(series.dimension, 0);
  for (int n = 1; n <= nu; ++n) {
    for (const auto& [gamma, c] : series.power(n).terms()) {
      if (gamma == zero) continue;
      if (std::abs(c) > tol) {
        FlatVerdict v;
        v.flat = false;
        v.witness_n = n;
        v.witness_gamma = gamma;
        v.witness_coeff = c;
        return v;
      }
    }
  }
  return FlatVerdict{};
}

std::vector<ParsevalRow> parseval_check(const FundamentalGraph& g,
                                        const IndexedTraceSeries& series,
                                        const KGrid& grid, Execution exec) {
  if (grid.dimension != g.dimension())
    throw ValidationError("grid dimension does not match the graph");
  const Eigen::MatrixXd traces = sample_trace_powers(g, grid, series.n_max, exec);
  const double points = static_cast<double>(traces.rows());
  const double tau_plus = g.max_shift_norm();
  const std::vector<int> zero(series.dimension, 0);

  std::vector<ParsevalRow> rows;
  rows.reserve(series.n_max);
  for (int n = 1; n <= series.n_max; ++n) {
    ParsevalRow row;
    row.n = n;
    row.grid_average = traces.col(n - 1).array().square().sum() / points;
    for (const auto& [gamma, c] : series.power(n).terms())
      row.coeff_sum_sq += std::norm(c);
    row.center_sq = std::norm(series.power(n).coeff(zero));
    row.residual = std::abs(row.grid_average - row.coeff_sum_sq);
    row.grid_exact = grid.resolution + 1e-9 >= 2.0 * n * tau_plus + 1.0;
    rows.push_back(row);
  }
  return rows;
}

double trace_series_grid_error(const FundamentalGraph& g,
                               const IndexedTraceSeries& series, const KGrid& grid,
                               Execution exec) {
  if (grid.dimension != g.dimension())
    throw ValidationError("grid dimension does not match the graph");
  const Eigen::MatrixXd traces = sample_trace_powers(g, grid, series.n_max, exec);
  double worst = 0.0;
  for (long long i = 0; i < traces.rows(); ++i) {
    const Eigen::VectorXd k = grid.point(i);
    for (int n = 1; n <= series.n_max; ++n) {
      const std::complex<double> predicted = series.power(n).eval(k);
      const double sampled = traces(i, n - 1);
      const double err = std::abs(predicted - std::complex<double>(sampled, 0.0)) /
                         std::max(1.0, std::abs(sampled));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

std::vector<double> char_poly_from_traces(const std::vector<double>& traces) {
  if (traces.empty()) throw ValidationError("need at least one trace");
  std::vector<double> xi(traces.size());
  for (size_t n = 1; n <= traces.size(); ++n) {
    double acc = traces[n - 1];
    for (size_t j = 1; j < n; ++j) acc += traces[n - j - 1] * xi[j - 1];
    xi[n - 1] = -acc / static_cast<double>(n);
  }
  return xi;
}

void write_trace_csv(std::ostream& out, const IndexedTraceSeries& series) {
  out << "n";
  for (int s = 1; s <= series.dimension; ++s) out << ",gamma" << s;
  out << ",re,im\n";
  char buf[40];
  for (int n = 1; n <= series.n_max; ++n) {
    for (const auto& [gamma, c] : series.power(n).terms()) {
      out << n;
      for (int gcomp : gamma) out << "," << gcomp;
      std::snprintf(buf, sizeof buf, "%.17g", c.real());
      out << "," << buf;
      std::snprintf(buf, sizeof buf, "%.17g", c.imag());
      out << "," << buf << "\n";
    }
  }
}

}  // namespace magraph
