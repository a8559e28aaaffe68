// Command-line front end: load a fundamental graph, then compute band
// structures, exact flat-spectrum verdicts, indexed trace coefficients,
// coupling sweeps, or run the Fourier/Parseval self-checks.
//
// Exit codes: 0 success, 1 input error, 2 numeric or budget error.

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "magraph/band_engine.hpp"
#include "magraph/errors.hpp"
#include "magraph/fiber_operator.hpp"
#include "magraph/flux_sweep.hpp"
#include "magraph/fundamental_graph.hpp"
#include "magraph/trace_engine.hpp"

namespace {

using namespace magraph;

std::string fmt6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string gamma_str(const std::vector<int>& gamma) {
  std::string s = "[";
  for (size_t i = 0; i < gamma.size(); ++i) s += (i ? "," : "") + std::to_string(gamma[i]);
  return s + "]";
}

// "-" means stdout; anything else is a file path.
class OutSink {
 public:
  explicit OutSink(const std::string& spec) {
    if (spec != "-") {
      file_.open(spec);
      if (!file_) throw ParseError("cannot open output file: " + spec);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

int grid_for_exactness(const FundamentalGraph& g, int n_max, int requested) {
  const int required = static_cast<int>(std::ceil(2.0 * n_max * g.max_shift_norm())) + 1;
  return std::max(requested, required);
}

int cmd_bands(const std::string& graph_path, int grid, double flat_tol,
              const std::string& out_spec) {
  const FundamentalGraph g = load_graph_file(graph_path);
  BandOptions opt;
  opt.resolution = grid;
  opt.flat_tol = flat_tol;
  const BandStructure bs = compute_bands(g, opt);

  for (size_t j = 0; j < bs.bands.size(); ++j) {
    std::cout << "band " << (j + 1) << ": [" << fmt6(bs.bands[j].lo) << ","
              << fmt6(bs.bands[j].hi) << "]" << (bs.flat_flags[j] ? " FLAT" : "")
              << "\n";
  }
  if (!bs.flat_eigenvalues.empty()) {
    std::cout << "flat eigenvalues:";
    for (double v : bs.flat_eigenvalues) std::cout << " " << fmt6(v);
    std::cout << "\n";
  }

  OutSink sink(out_spec);
  write_band_csv(sink.stream(), bs);
  return 0;
}

int cmd_flat_check(const std::string& graph_path, int grid, double tol,
                   const std::string& out_spec) {
  const FundamentalGraph g = load_graph_file(graph_path);
  const int nu = g.num_vertices();
  const IndexedTraceSeries series = trace_fourier(g, nu);
  const FlatVerdict verdict = flat_spectrum_verdict(series, nu, tol);

  std::cout << (verdict.flat ? "FLAT" : "AC_NONEMPTY") << "\n";

  OutSink sink(out_spec);
  std::ostream& out = sink.stream();
  out << "verdict: " << (verdict.flat ? "FLAT" : "AC_NONEMPTY") << "\n";
  if (verdict.flat) {
    out << "certificate: none (all coefficients with gamma != 0 vanish for n <= "
        << nu << ", tol " << fmt6(tol) << ")\n";
    const FiberSpectrum at_zero =
        fiber_spectrum(build_fiber(g, Eigen::VectorXd::Zero(g.dimension())));
    out << "flat spectrum:";
    for (int j = 0; j < at_zero.eigenvalues.size(); ++j)
      out << " " << fmt6(at_zero.eigenvalues[j]);
    out << "\n";
    std::vector<double> traces(nu);
    const std::vector<int> zero(g.dimension(), 0);
    for (int n = 1; n <= nu; ++n) traces[n - 1] = series.power(n).coeff(zero).real();
    const std::vector<double> xi = char_poly_from_traces(traces);
    out << "characteristic polynomial coefficients (leading 1):";
    for (double x : xi) out << " " << fmt6(x);
    out << "\n";
  } else {
    out << "certificate: n=" << verdict.witness_n
        << " gamma=" << gamma_str(verdict.witness_gamma) << " h=("
        << fmt6(verdict.witness_coeff.real()) << ", "
        << fmt6(verdict.witness_coeff.imag()) << ")\n";
  }

  const KGrid pgrid{g.dimension(), grid_for_exactness(g, nu, grid)};
  out << "parseval residuals (grid " << pgrid.resolution << "^" << pgrid.dimension
      << "):\n";
  out << "n,grid_avg,sum_sq,center_sq,residual,exact\n";
  for (const auto& row : parseval_check(g, series, pgrid)) {
    out << row.n << "," << fmt6(row.grid_average) << "," << fmt6(row.coeff_sum_sq)
        << "," << fmt6(row.center_sq) << "," << fmt6(row.residual) << ","
        << (row.grid_exact ? "yes" : "no") << "\n";
  }
  return 0;
}

int cmd_trace_coeffs(const std::string& graph_path, int n_max,
                     const std::string& out_spec) {
  const FundamentalGraph g = load_graph_file(graph_path);
  if (n_max == 0) n_max = g.num_vertices();
  const IndexedTraceSeries series = trace_fourier(g, n_max);
  OutSink sink(out_spec);
  write_trace_csv(sink.stream(), series);
  return 0;
}

int cmd_sweep(const std::string& graph_path, double t_min, double t_max, int samples,
              double tol, const std::string& out_spec) {
  const FundamentalGraph g = load_graph_file(graph_path);
  SweepOptions opt;
  opt.t_min = t_min;
  opt.t_max = t_max;
  opt.samples = samples;
  opt.tol = tol;
  const SweepReport report = sweep(g, opt);
  std::cout << "candidates: " << report.candidates.size() << "\n";
  OutSink sink(out_spec);
  write_sweep_report(sink.stream(), report);
  return 0;
}

int cmd_verify(const std::string& graph_path, int grid, double tol,
               const std::string& out_spec) {
  const FundamentalGraph g = load_graph_file(graph_path);
  const int nu = g.num_vertices();
  const IndexedTraceSeries series = trace_fourier(g, nu);
  const KGrid vgrid{g.dimension(), grid_for_exactness(g, nu, grid)};

  const double cross = trace_series_grid_error(g, series, vgrid);
  const auto rows = parseval_check(g, series, vgrid);

  OutSink sink(out_spec);
  std::ostream& out = sink.stream();
  out << "grid: " << vgrid.resolution << "^" << vgrid.dimension << "\n";
  out << "fourier cross-check max relative error: " << fmt6(cross) << "\n";
  out << "n,grid_avg,sum_sq,residual,exact\n";
  bool ok = cross <= tol;
  for (const auto& row : rows) {
    out << row.n << "," << fmt6(row.grid_average) << "," << fmt6(row.coeff_sum_sq)
        << "," << fmt6(row.residual) << "," << (row.grid_exact ? "yes" : "no")
        << "\n";
    if (row.residual > tol * std::max(1.0, row.coeff_sum_sq)) ok = false;
    if (!row.grid_exact)
      out << "warning: grid too coarse for exact quadrature at n=" << row.n << "\n";
  }
  out << "verify: " << (ok ? "OK" : "FAILED") << " (tol " << fmt6(tol) << ")\n";
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectra of magnetic Schrodinger operators on periodic graphs"};
  app.require_subcommand(1);

  std::string graph_path;
  std::string out_spec = "-";
  int bands_grid = 64;
  int check_grid = 1;  // raised to whatever exact quadrature needs
  double flat_tol = 1e-10;
  double tol = 1e-9;
  int n_max = 0;
  double t_min = 0.0, t_max = 1.0;
  int samples = 4096;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--graph", graph_path, "graph JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_spec, "output path, or - for stdout");
  };

  CLI::App* bands = app.add_subcommand("bands", "band structure over a k-grid");
  add_common(bands);
  bands->add_option("--grid", bands_grid, "grid resolution per axis")
      ->check(CLI::PositiveNumber);
  bands->add_option("--flat-tol", flat_tol, "numeric flat-band width tolerance")
      ->check(CLI::PositiveNumber);

  CLI::App* flat = app.add_subcommand("flat-check", "exact flat-spectrum verdict");
  add_common(flat);
  flat->add_option("--tol", tol, "coefficient tolerance")->check(CLI::PositiveNumber);
  flat->add_option("--grid", check_grid, "Parseval grid resolution (raised if too coarse)")
      ->check(CLI::PositiveNumber);

  CLI::App* coeffs = app.add_subcommand("trace-coeffs", "indexed trace coefficients");
  add_common(coeffs);
  coeffs->add_option("--n-max", n_max, "highest power (default: number of vertices)")
      ->check(CLI::PositiveNumber);

  CLI::App* swp = app.add_subcommand("sweep", "coupling-constant sweep over [t_min,t_max]");
  add_common(swp);
  swp->add_option("--t-min", t_min, "interval start");
  swp->add_option("--t-max", t_max, "interval end");
  swp->add_option("--samples", samples, "sampling density")->check(CLI::PositiveNumber);
  swp->add_option("--tol", tol, "coefficient tolerance")->check(CLI::PositiveNumber);

  CLI::App* ver = app.add_subcommand("verify", "Fourier and Parseval self-checks");
  add_common(ver);
  ver->add_option("--grid", check_grid, "grid resolution (raised if too coarse)")
      ->check(CLI::PositiveNumber);
  ver->add_option("--tol", tol, "residual tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (bands->parsed()) return cmd_bands(graph_path, bands_grid, flat_tol, out_spec);
    if (flat->parsed()) return cmd_flat_check(graph_path, check_grid, tol, out_spec);
    if (coeffs->parsed()) return cmd_trace_coeffs(graph_path, n_max, out_spec);
    if (swp->parsed()) return cmd_sweep(graph_path, t_min, t_max, samples, tol, out_spec);
    if (ver->parsed()) return cmd_verify(graph_path, check_grid, tol, out_spec);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
