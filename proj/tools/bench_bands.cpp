// Wall-clock comparison of the serial reference band kernel against the
// OpenMP one on a synthetic d=2 lattice with a chain of nu vertices per cell.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "magraph/band_engine.hpp"
#include "magraph/fundamental_graph.hpp"

using namespace magraph;

namespace {

FundamentalGraph bench_graph(int nu) {
  std::vector<VertexRecord> vertices;
  for (int v = 0; v < nu; ++v)
    vertices.push_back({"v" + std::to_string(v), 0.1 * v});
  std::vector<OrientedEdge> edges;
  for (int v = 0; v + 1 < nu; ++v)
    edges.push_back({v, v + 1, {0, 0}, 0.2 * v});
  edges.push_back({nu - 1, 0, {1, 0}, 0.05});
  edges.push_back({0, 0, {0, 1}, 0.3});
  return FundamentalGraph(2, std::move(vertices), std::move(edges));
}

double time_run(const FundamentalGraph& g, const KGrid& grid, Execution exec,
                int repeat) {
  double best = 1e300;
  for (int r = 0; r < repeat; ++r) {
    const auto start = std::chrono::steady_clock::now();
    volatile double sink = sample_band_grid(g, grid, exec).sum();
    (void)sink;
    const std::chrono::duration<double> elapsed =
        std::chrono::steady_clock::now() - start;
    best = std::min(best, elapsed.count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"band-kernel benchmark: serial reference vs OpenMP"};
  int nu = 8;
  int grid_n = 48;
  int repeat = 3;
  app.add_option("--nu", nu, "vertices per cell")->check(CLI::PositiveNumber);
  app.add_option("--grid", grid_n, "grid resolution per axis")
      ->check(CLI::PositiveNumber);
  app.add_option("--repeat", repeat, "timed repetitions, best kept")
      ->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const FundamentalGraph g = bench_graph(nu);
  const KGrid grid{2, grid_n};
  std::printf("nu=%d grid=%d^2 (%lld eigensolves per run)\n", nu, grid_n,
              grid.num_points());

  const double t_serial = time_run(g, grid, Execution::serial, repeat);
  const double t_parallel = time_run(g, grid, Execution::parallel, repeat);
  std::printf("serial    %.3f ms\n", 1e3 * t_serial);
  std::printf("parallel  %.3f ms\n", 1e3 * t_parallel);
  std::printf("speedup   %.2fx\n", t_serial / t_parallel);
  return 0;
}
