#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <utility>

#include "doctest.h"
#include "magraph/errors.hpp"
#include "magraph/fiber_operator.hpp"
#include "magraph/trace_engine.hpp"
#include "test_support.hpp"

using namespace magraph;
using namespace magraph::testing;

namespace {

using Key = LaurentSeries::Key;
using Coeffs = std::map<Key, std::complex<double>>;

// Independent oracle: one walk over all rooted cycles up to length n_max,
// bucketed by (n, index). Each cycle contributes the product of its edge
// factors weight * e^{-i alpha}, carried in extended precision so the
// summation-order difference against the production route stays far below
// the 1e-12 comparison floor. Exponential, fine at test scale.
std::vector<Coeffs> cycle_trace_series(const ModifiedGraph& mg, int n_max) {
  std::vector<std::complex<long double>> factors;
  factors.reserve(mg.edges.size());
  for (const auto& e : mg.edges) {
    const std::complex<double> f = e.weight * std::polar(1.0, -e.phase);
    factors.emplace_back(f.real(), f.imag());
  }

  std::vector<std::map<Key, std::complex<long double>>> acc(n_max);
  std::vector<int> shift(mg.dimension, 0);
  int start = 0;
  std::complex<long double> term(1.0L, 0.0L);
  auto walk = [&](auto&& self, int vertex, int depth) -> void {
    if (depth > 0 && vertex == start) acc[depth - 1][shift] += term;
    if (depth == n_max) return;
    for (int id : mg.outgoing[vertex]) {
      const WeightedEdge& e = mg.edges[id];
      for (int s = 0; s < mg.dimension; ++s) shift[s] += e.cell_shift[s];
      const std::complex<long double> before = term;
      term *= factors[id];
      self(self, e.to, depth + 1);
      term = before;
      for (int s = 0; s < mg.dimension; ++s) shift[s] -= e.cell_shift[s];
    }
  };
  for (start = 0; start < mg.num_vertices; ++start) walk(walk, start, 0);

  std::vector<Coeffs> out(n_max);
  for (int n = 0; n < n_max; ++n)
    for (const auto& [gamma, c] : acc[n])
      out[n][gamma] = {static_cast<double>(c.real()), static_cast<double>(c.imag())};
  return out;
}

// Independent oracle: discrete Fourier transform of Tr H^n sampled on a grid
// fine enough to avoid aliasing within the support box.
Coeffs dft_trace_coeffs(const FundamentalGraph& g, int n, int resolution) {
  int max_axis_step = 0;
  for (const auto& e : g.edges())
    for (int c : e.cell_shift) max_axis_step = std::max(max_axis_step, std::abs(c));
  const int radius = n * max_axis_step;
  REQUIRE(resolution > 2 * radius);

  const KGrid grid{g.dimension(), resolution};
  const Eigen::MatrixXd traces = sample_trace_powers(g, grid, n);
  const long long points = grid.num_points();

  std::vector<Key> box;
  Key gamma(g.dimension(), -radius);
  while (true) {
    box.push_back(gamma);
    int axis = g.dimension() - 1;
    while (axis >= 0 && ++gamma[axis] > radius) gamma[axis--] = -radius;
    if (axis < 0) break;
  }

  Coeffs out;
  for (const Key& key : box) {
    std::complex<double> acc(0.0, 0.0);
    for (long long i = 0; i < points; ++i) {
      const Eigen::VectorXd k = grid.point(i);
      double phase = 0.0;
      for (int s = 0; s < g.dimension(); ++s) phase += key[s] * k[s];
      acc += traces(i, n - 1) * std::polar(1.0, phase);
    }
    acc /= static_cast<double>(points);
    if (std::abs(acc) > 1e-11) out[key] = acc;
  }
  return out;
}

void check_series_match(const Coeffs& got, const Coeffs& expected, double tol) {
  for (const auto& [gamma, c] : expected) {
    auto it = got.find(gamma);
    const std::complex<double> g_val =
        it == got.end() ? std::complex<double>(0, 0) : it->second;
    CHECK(std::abs(g_val - c) <= tol);
  }
  for (const auto& [gamma, c] : got) {
    if (expected.find(gamma) == expected.end()) CHECK(std::abs(c) <= tol);
  }
}

}  // namespace

TEST_CASE("modified graph carries inverses and weighted loops") {
  const ModifiedGraph mg = ModifiedGraph::build(z_lattice());
  REQUIRE(mg.edges.size() == 3);  // edge, inverse, added loop
  CHECK(mg.edges[0].weight == -1.0);
  CHECK(mg.edges[1].cell_shift == std::vector<int>{-1});
  CHECK(mg.edges[2].weight == doctest::Approx(2.0));  // onsite = degree 2 + Q 0
  CHECK(mg.edges[2].cell_shift == std::vector<int>{0});
  CHECK(mg.edges[2].phase == 0.0);
}

TEST_CASE("flux reduction lands in (-pi, pi] with +pi preferred") {
  CHECK(reduce_flux(0.0) == 0.0);
  CHECK(reduce_flux(kPi) == doctest::Approx(kPi));
  CHECK(reduce_flux(-kPi) == doctest::Approx(kPi));
  CHECK(reduce_flux(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(reduce_flux(2.0 * kPi + 0.3) == doctest::Approx(0.3));
  CHECK(reduce_flux(-0.4) == doctest::Approx(-0.4));
}

TEST_CASE("laurent matrix of the flat chain cancels the zero-shift hopping") {
  const double alpha0 = kPi / 4;
  const LaurentMatrix m = build_laurent_matrix(example_two_vertex_chain(0.0, alpha0));
  REQUIRE(m.size == 2);
  // diagonal: only the added loop
  REQUIRE(m.at(0, 0).size() == 1);
  CHECK(std::abs(m.at(0, 0).coeff({0}) - 3.0) < 1e-14);
  CHECK(std::abs(m.at(1, 1).coeff({0}) - 3.0) < 1e-14);
  // off-diagonal: the pi-offset pair cancels, leaving the crossing edge
  REQUIRE(m.at(0, 1).size() == 1);
  CHECK(std::abs(m.at(0, 1).coeff({1}) - std::complex<double>(-1.0, 0.0)) < 1e-13);
  REQUIRE(m.at(1, 0).size() == 1);
  CHECK(std::abs(m.at(1, 0).coeff({-1}) - std::complex<double>(-1.0, 0.0)) < 1e-13);
}

TEST_CASE("laurent matrix of small lattices") {
  SUBCASE("isolated vertex") {
    const LaurentMatrix m = build_laurent_matrix(isolated_vertex(5.0));
    REQUIRE(m.size == 1);
    REQUIRE(m.at(0, 0).size() == 1);
    CHECK(m.at(0, 0).coeff({0}) == std::complex<double>(5.0, 0.0));
  }
  SUBCASE("integer lattice") {
    const LaurentMatrix m = build_laurent_matrix(z_lattice());
    REQUIRE(m.at(0, 0).size() == 3);
    CHECK(m.at(0, 0).coeff({0}) == std::complex<double>(2.0, 0.0));
    CHECK(m.at(0, 0).coeff({1}) == std::complex<double>(-1.0, 0.0));
    CHECK(m.at(0, 0).coeff({-1}) == std::complex<double>(-1.0, 0.0));
  }
}

TEST_CASE("laurent entries evaluate to the fiber matrix") {
  std::mt19937 rng(109);
  RandomGraphConfig cfg;
  std::uniform_real_distribution<double> kd(-kPi, kPi);
  for (int trial = 0; trial < 10; ++trial) {
    const FundamentalGraph g = random_graph(rng, cfg);
    const LaurentMatrix m = build_laurent_matrix(g);
    Eigen::VectorXd k(g.dimension());
    for (int s = 0; s < k.size(); ++s) k[s] = kd(rng);
    const FiberOperator h = build_fiber(g, k);
    for (int r = 0; r < m.size; ++r)
      for (int c = 0; c < m.size; ++c)
        CHECK(std::abs(m.at(r, c).eval(k) - h.matrix(r, c)) < 1e-12);
  }
}

TEST_CASE("order-1 coefficients of a loop-free graph sit at gamma = 0") {
  const FundamentalGraph g = example_two_vertex_chain(1.5);
  const IndexedTraceSeries series = trace_fourier(g, 1);
  REQUIRE(series.power(1).size() == 1);
  CHECK(std::abs(series.power(1).coeff({0}) -
                 std::complex<double>(g.onsite(0) + g.onsite(1), 0.0)) < 1e-13);
}

TEST_CASE("flat chain: the order-2 indexed coefficients cancel") {
  const IndexedTraceSeries series = trace_fourier(example_two_vertex_chain(0.0), 2);
  CHECK(std::abs(series.power(2).coeff({1})) == 0.0);   // pruned structurally
  CHECK(std::abs(series.power(2).coeff({-1})) == 0.0);
  CHECK(std::abs(series.power(2).coeff({0}) - std::complex<double>(20.0, 0.0)) <
        1e-12);
}

TEST_CASE("integer lattice order-2 coefficients match (2 - e^{-ik} - e^{ik})^2") {
  const IndexedTraceSeries series = trace_fourier(z_lattice(), 2);
  CHECK(std::abs(series.power(2).coeff({0}) - 6.0) < 1e-13);
  CHECK(std::abs(series.power(2).coeff({1}) - (-4.0)) < 1e-13);
  CHECK(std::abs(series.power(2).coeff({-1}) - (-4.0)) < 1e-13);
  CHECK(std::abs(series.power(2).coeff({2}) - 1.0) < 1e-13);
  CHECK(std::abs(series.power(2).coeff({-2}) - 1.0) < 1e-13);

  // oracle: numerical Fourier transform of Tr H^2 on a 64-point grid
  check_series_match(series.power(2).terms(), dft_trace_coeffs(z_lattice(), 2, 64),
                     1e-9);
}

TEST_CASE("cycle enumeration on the integer lattice") {
  const ModifiedGraph mg = ModifiedGraph::build(z_lattice());
  SUBCASE("length 1, index 0: just the added loop") {
    const auto cycles = enumerate_cycles(mg, 1, {0});
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0].weight == doctest::Approx(2.0));
    CHECK(cycles[0].flux == 0.0);
  }
  SUBCASE("length 2, index 0: three rooted sequences summing to 6") {
    const auto cycles = enumerate_cycles(mg, 2, {0});
    REQUIRE(cycles.size() == 3);
    double sum = 0.0;
    for (const auto& c : cycles) sum += c.weight;
    CHECK(sum == doctest::Approx(6.0));
    CHECK(cycle_sum(cycles).real() == doctest::Approx(6.0));
    CHECK(cycle_sum(cycles).imag() == doctest::Approx(0.0));
  }
  SUBCASE("cap") {
    CHECK_THROWS_AS(enumerate_cycles(mg, 9, {0}), ValidationError);
  }
}

TEST_CASE("cycle enumeration on the flat chain is rooted") {
  // two cycle classes through the crossing edge, each seen from both of its
  // endpoints, so four rooted cycles with fluxes -a and -pi-a twice over
  const double alpha0 = 0.6;
  const ModifiedGraph mg = ModifiedGraph::build(example_two_vertex_chain(0.0, alpha0));
  const auto cycles = enumerate_cycles(mg, 2, {1});
  REQUIRE(cycles.size() == 4);
  int near_a = 0, near_pi_a = 0;
  for (const auto& c : cycles) {
    CHECK(c.weight == doctest::Approx(1.0));
    if (std::abs(c.flux + alpha0) < 1e-12) ++near_a;
    if (std::abs(c.flux + kPi + alpha0) < 1e-12) ++near_pi_a;
  }
  CHECK(near_a == 2);
  CHECK(near_pi_a == 2);
  // and the forced cancellation e^{i a}(1 + e^{i pi}) = 0
  CHECK(std::abs(cycle_sum(cycles)) < 1e-14);
}

TEST_CASE("cycle reversal pairs opposite indices with conjugate sums") {
  std::mt19937 rng(83);
  RandomGraphConfig cfg;
  cfg.max_nu = 3;
  cfg.max_edges = 5;
  for (int trial = 0; trial < 10; ++trial) {
    const FundamentalGraph g = random_graph(rng, cfg);
    const ModifiedGraph mg = ModifiedGraph::build(g);
    Key gamma(g.dimension(), 0);
    gamma[0] = 1;
    Key minus = gamma;
    for (auto& x : minus) x = -x;
    for (int n = 1; n <= 3; ++n) {
      const auto fwd = enumerate_cycles(mg, n, gamma);
      const auto rev = enumerate_cycles(mg, n, minus);
      REQUIRE(fwd.size() == rev.size());
      // multiset of (weight, flux) maps to (weight, -flux)
      std::multiset<std::pair<double, double>> a, b;
      for (const auto& c : fwd) a.insert({c.weight, c.flux});
      for (const auto& c : rev) b.insert({c.weight, -c.flux});
      auto ita = a.begin();
      auto itb = b.begin();
      for (; ita != a.end(); ++ita, ++itb) {
        CHECK(ita->first == doctest::Approx(itb->first));
        CHECK(ita->second == doctest::Approx(itb->second).epsilon(1e-12));
      }
      CHECK(std::abs(cycle_sum(fwd) - std::conj(cycle_sum(rev))) < 1e-12);
    }
  }
}

TEST_CASE("laurent powers match cycle enumeration on random graphs") {
  std::mt19937 rng(89);
  RandomGraphConfig cfg;
  for (int trial = 0; trial < 15; ++trial) {
    const FundamentalGraph g = random_graph(rng, cfg);
    const IndexedTraceSeries series = trace_fourier(g, 4);
    const auto oracle = cycle_trace_series(ModifiedGraph::build(g), 4);
    for (int n = 1; n <= 4; ++n)
      check_series_match(series.power(n).terms(), oracle[n - 1], 1e-12);
  }
}

TEST_CASE("support bound and conjugation symmetry hold on random graphs") {
  std::mt19937 rng(97);
  RandomGraphConfig cfg;
  for (int trial = 0; trial < 15; ++trial) {
    const FundamentalGraph g = random_graph(rng, cfg);
    const double tau_plus = g.max_shift_norm();
    const IndexedTraceSeries series = trace_fourier(g, 4);
    for (int n = 1; n <= 4; ++n) {
      for (const auto& [gamma, c] : series.power(n).terms()) {
        double norm_sq = 0.0;
        for (int x : gamma) norm_sq += static_cast<double>(x) * x;
        CHECK(std::sqrt(norm_sq) <= n * tau_plus + 1e-12);
        Key minus = gamma;
        for (auto& x : minus) x = -x;
        CHECK(std::abs(series.power(n).coeff(minus) - std::conj(c)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("series evaluation reproduces sampled traces") {
  std::mt19937 rng(103);
  RandomGraphConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    const FundamentalGraph g = random_graph(rng, cfg);
    const int nu = g.num_vertices();
    const IndexedTraceSeries series = trace_fourier(g, nu);
    const KGrid grid{g.dimension(), 16};
    CHECK(trace_series_grid_error(g, series, grid) <= 1e-9);
  }
}

TEST_CASE("flat-spectrum verdicts") {
  SUBCASE("doubled chain is flat") {
    const FundamentalGraph g = doubled_chain();
    const FlatVerdict v = flat_spectrum_verdict(trace_fourier(g, 2), 2);
    CHECK(v.flat);
  }
  SUBCASE("magnetic chain is flat") {
    const FundamentalGraph g = example_two_vertex_chain(0.7);
    const FlatVerdict v = flat_spectrum_verdict(trace_fourier(g, 2), 2);
    CHECK(v.flat);
  }
  SUBCASE("integer lattice certificate is the smallest (n, gamma)") {
    const FlatVerdict v = flat_spectrum_verdict(trace_fourier(z_lattice(), 1), 1);
    REQUIRE_FALSE(v.flat);
    CHECK(v.witness_n == 1);
    CHECK(v.witness_gamma == Key{-1});
    CHECK(std::abs(v.witness_coeff - std::complex<double>(-1.0, 0.0)) < 1e-13);
  }
  SUBCASE("truncated series is refused") {
    CHECK_THROWS_AS(flat_spectrum_verdict(trace_fourier(z_lattice(), 1), 2),
                    ValidationError);
  }
}

TEST_CASE("parseval identities") {
  SUBCASE("flat chain: grid average equals the center coefficient") {
    const FundamentalGraph g = example_two_vertex_chain(0.0);
    const IndexedTraceSeries series = trace_fourier(g, 2);
    const auto rows = parseval_check(g, series, KGrid{1, 16});
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
      CHECK(row.residual < 1e-10);
      CHECK(row.grid_average == doctest::Approx(row.center_sq).epsilon(1e-12));
      CHECK(row.grid_exact);
    }
    CHECK(rows[0].grid_average == doctest::Approx(36.0));
    CHECK(rows[1].grid_average == doctest::Approx(400.0));
  }
  SUBCASE("integer lattice at n = 1 sums 4 + 1 + 1") {
    const FundamentalGraph g = z_lattice();
    const IndexedTraceSeries series = trace_fourier(g, 1);
    const auto rows = parseval_check(g, series, KGrid{1, 16});
    CHECK(rows[0].coeff_sum_sq == doctest::Approx(6.0));
    CHECK(rows[0].grid_average == doctest::Approx(6.0));
    CHECK(rows[0].residual < 1e-10);
    CHECK(rows[0].center_sq == doctest::Approx(4.0));  // flat identity fails here
  }
  SUBCASE("isolated vertex at n = 2 gives 625 on both sides") {
    const FundamentalGraph g = isolated_vertex(5.0);
    const auto rows = parseval_check(g, trace_fourier(g, 2), KGrid{1, 4});
    CHECK(rows[1].grid_average == doctest::Approx(625.0));
    CHECK(rows[1].coeff_sum_sq == doctest::Approx(625.0));
  }
  SUBCASE("coarse grids are flagged, not fatal") {
    const FundamentalGraph g = z_lattice();
    const auto rows = parseval_check(g, trace_fourier(g, 2), KGrid{1, 3});
    CHECK(rows[0].grid_exact);        // needs 3 points
    CHECK_FALSE(rows[1].grid_exact);  // needs 5
  }
}

TEST_CASE("newton identities recover characteristic coefficients") {
  CHECK(char_poly_from_traces({5.0}) == std::vector<double>{-5.0});

  const auto xi1 = char_poly_from_traces({6.0, 20.0});
  REQUIRE(xi1.size() == 2);
  CHECK(xi1[0] == doctest::Approx(-6.0));
  CHECK(xi1[1] == doctest::Approx(8.0));  // (x - 2)(x - 4)

  const auto xi2 = char_poly_from_traces({0.0, 2.0});
  CHECK(xi2[0] == doctest::Approx(0.0));
  CHECK(xi2[1] == doctest::Approx(-1.0));  // x^2 - 1

  CHECK_THROWS_AS(char_poly_from_traces({}), ValidationError);
}

TEST_CASE("exact verdict and grid flatness never contradict") {
  auto agree = [](const FundamentalGraph& g) {
    const int nu = g.num_vertices();
    const FlatVerdict v = flat_spectrum_verdict(trace_fourier(g, nu), nu);
    BandOptions opt;
    opt.resolution = 32;
    const BandStructure bs = compute_bands(g, opt);
    bool grid_flat = true;
    for (const auto& band : bs.bands) grid_flat &= band.width() <= 1e-9;
    CHECK(v.flat == grid_flat);
  };
  agree(doubled_chain());
  agree(example_two_vertex_chain(0.0));
  agree(example_two_vertex_chain(1.0));
  agree(z_lattice());
  agree(square_lattice());
  std::mt19937 rng(107);
  RandomGraphConfig cfg;
  for (int trial = 0; trial < 10; ++trial) agree(random_graph(rng, cfg));
}

TEST_CASE("trace engine budgets") {
  TraceOptions tiny;
  tiny.term_budget = 2;
  CHECK_THROWS_AS(trace_fourier(z_lattice(), 3, tiny), BudgetError);
  TraceOptions capped;
  capped.n_cap = 2;
  CHECK_THROWS_AS(trace_fourier(z_lattice(), 3, capped), BudgetError);
  CHECK_THROWS_AS(trace_fourier(z_lattice(), 0), ValidationError);
}

TEST_CASE("trace CSV is sorted and deterministic") {
  const IndexedTraceSeries series = trace_fourier(z_lattice(), 1);
  std::ostringstream a, b;
  write_trace_csv(a, series);
  write_trace_csv(b, series);
  CHECK(a.str() == b.str());
  CHECK(a.str() ==
        "n,gamma1,re,im\n"
        "1,-1,-1,0\n"
        "1,0,2,0\n"
        "1,1,-1,0\n");
}
