#include "magraph/flux_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "magraph/errors.hpp"

namespace magraph {

namespace {

constexpr double kFrequencyGap = 1e-12;   // frequencies closer than this merge
constexpr double kMinimumRel = 1e-6;      // sampled |f|^2 gate for refinement
constexpr double kKeepRel = 1e-9;         // |f(t*)| acceptance after refinement
constexpr double kBracketWidth = 1e-12;   // golden-section stopping width
constexpr double kDedupeGap = 1e-8;

double golden_minimize(const ExponentialPolynomial& f, double a, double b) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = std::norm(f.eval(x1));
  double f2 = std::norm(f.eval(x2));
  while (b - a > kBracketWidth) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = std::norm(f.eval(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = std::norm(f.eval(x2));
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

ExponentialPolynomial ExponentialPolynomial::from_terms(
    std::vector<std::pair<double, std::complex<double>>> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double max_mag = 0.0;
  for (const auto& [phi, w] : terms) max_mag = std::max(max_mag, std::abs(w));

  ExponentialPolynomial f;
  size_t i = 0;
  while (i < terms.size()) {
    const double phi = terms[i].first;
    std::complex<double> w = terms[i].second;
    size_t j = i + 1;
    while (j < terms.size() && terms[j].first - terms[j - 1].first <= kFrequencyGap) {
      w += terms[j].second;
      ++j;
    }
    if (std::abs(w) > 1e-15 * max_mag) {
      f.frequencies.push_back(phi);
      f.weights.push_back(w);
    }
    i = j;
  }
  return f;
}

std::complex<double> ExponentialPolynomial::eval(double t) const {
  std::complex<double> sum(0.0, 0.0);
  for (size_t j = 0; j < weights.size(); ++j)
    sum += weights[j] * std::polar(1.0, -t * frequencies[j]);
  return sum;
}

double ExponentialPolynomial::weight_norm() const {
  double s = 0.0;
  for (const auto& w : weights) s += std::abs(w);
  return s;
}

std::pair<int, std::vector<int>> select_witness(const IndexedTraceSeries& series0,
                                                int nu, double tol) {
  if (series0.n_max < nu)
    throw ValidationError("zero-coupling trace series covers n <= " +
                          std::to_string(series0.n_max) + " but nu = " +
                          std::to_string(nu));
  const std::vector<int> zero(series0.dimension, 0);
  for (int n = 1; n <= nu; ++n) {
    for (const auto& [gamma, c] : series0.power(n).terms()) {
      if (gamma == zero) continue;
      if (std::abs(c) > tol) return {n, gamma};
    }
  }
  throw NumericError(
      "no nonzero indexed trace coefficient at zero coupling; "
      "the quotient may represent a disconnected periodic graph");
}

ExponentialPolynomial build_f(const FundamentalGraph& g, int n,
                              const std::vector<int>& gamma, int cycle_cap) {
  if (static_cast<int>(gamma.size()) != g.dimension())
    throw ValidationError("witness index has wrong dimension");
  if (std::all_of(gamma.begin(), gamma.end(), [](int x) { return x == 0; }))
    throw ValidationError("witness index gamma must be nonzero");

  const ModifiedGraph mg = ModifiedGraph::build(g);
  const std::vector<Cycle> cycles = enumerate_cycles(mg, n, gamma, cycle_cap);
  std::vector<std::pair<double, std::complex<double>>> terms;
  terms.reserve(cycles.size());
  for (const auto& c : cycles) terms.emplace_back(c.flux, c.weight);
  return ExponentialPolynomial::from_terms(std::move(terms));
}

std::vector<double> find_zeros(const ExponentialPolynomial& f, double t_min,
                               double t_max, int samples) {
  if (!(t_max > t_min)) throw ValidationError("need t_max > t_min");
  if (samples < 16) throw ValidationError("need at least 16 samples");
  if (f.is_zero())
    throw NumericError(
        "exponential polynomial is identically zero; this witness carries no "
        "information, re-select");
  if (f.has_constant_modulus()) return {};

  const double norm = f.weight_norm();
  const double step = (t_max - t_min) / (samples - 1);
  std::vector<double> value(samples);
  for (int j = 0; j < samples; ++j)
    value[j] = std::norm(f.eval(t_min + j * step));

  const double gate = kMinimumRel * norm * norm;
  std::vector<double> zeros;
  for (int j = 0; j < samples; ++j) {
    bool is_min;
    if (j == 0)
      is_min = value[0] < value[1];
    else if (j == samples - 1)
      is_min = value[j] <= value[j - 1];
    else
      is_min = value[j] <= value[j - 1] && value[j] < value[j + 1];
    if (!is_min || value[j] >= gate) continue;

    const double lo = std::max(t_min, t_min + (j - 1) * step);
    const double hi = std::min(t_max, t_min + (j + 1) * step);
    const double t_star = golden_minimize(f, lo, hi);
    if (std::abs(f.eval(t_star)) <= kKeepRel * norm) zeros.push_back(t_star);
  }

  std::sort(zeros.begin(), zeros.end());
  std::vector<double> unique;
  for (double t : zeros) {
    if (unique.empty() || t - unique.back() > kDedupeGap)
      unique.push_back(t);
    else if (std::abs(f.eval(t)) < std::abs(f.eval(unique.back())))
      unique.back() = t;
  }
  return unique;
}

SweepReport sweep(const FundamentalGraph& g, const SweepOptions& opt) {
  const int nu = g.num_vertices();
  const IndexedTraceSeries series0 =
      trace_fourier(g.scaled_phases(0.0), nu, opt.trace);
  auto [n, gamma] = select_witness(series0, nu, opt.tol);

  SweepReport report;
  report.witness_n = n;
  report.witness_gamma = gamma;
  report.t_min = opt.t_min;
  report.t_max = opt.t_max;
  report.samples = opt.samples;
  report.f = build_f(g, n, gamma, opt.cycle_cap);
  report.f_at_zero = report.f.eval(0.0);
  report.constant_f = report.f.has_constant_modulus();

  const std::vector<double> zeros =
      report.constant_f
          ? std::vector<double>{}
          : find_zeros(report.f, opt.t_min, opt.t_max, opt.samples);

  for (double t : zeros) {
    SweepCandidate cand;
    cand.t = t;
    cand.f_abs = std::abs(report.f.eval(t));
    const IndexedTraceSeries series_t =
        trace_fourier(g.scaled_phases(t), nu, opt.trace);
    cand.verdict = flat_spectrum_verdict(series_t, nu, opt.tol);
    report.candidates.push_back(std::move(cand));
  }
  return report;
}

void write_sweep_report(std::ostream& out, const SweepReport& r) {
  char buf[40];
  auto fmt6 = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf);
  };
  auto fmt17 = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  auto gamma_str = [&](const std::vector<int>& gamma) {
    std::string s = "[";
    for (size_t i = 0; i < gamma.size(); ++i)
      s += (i ? "," : "") + std::to_string(gamma[i]);
    return s + "]";
  };

  out << "witness coefficient: n=" << r.witness_n
      << " gamma=" << gamma_str(r.witness_gamma) << "\n";
  out << "f(0) = (" << fmt6(r.f_at_zero.real()) << ", " << fmt6(r.f_at_zero.imag())
      << "), " << r.f.term_count() << " frequency class(es)\n";
  out << "interval: [" << fmt6(r.t_min) << ", " << fmt6(r.t_max) << "], "
      << r.samples << " samples\n";
  if (r.constant_f) {
    out << "f has constant modulus; the a.c. spectrum is nonempty for every "
           "coupling t\n";
  } else if (r.candidates.empty()) {
    out << "no candidate couplings; the a.c. spectrum is nonempty for all t in "
           "the interval\n";
  } else {
    out << "candidate couplings: " << r.candidates.size() << "\n";
    for (const auto& c : r.candidates) {
      out << "  t = " << fmt6(c.t) << "  |f(t)| = " << fmt6(c.f_abs)
          << "  verdict: " << (c.verdict.flat ? "FLAT" : "AC_NONEMPTY") << "\n";
    }
    out << "the a.c. spectrum is nonempty for all other t in the interval\n";
  }

  out << "\nt_zero,verdict";
  out << ",n";
  for (size_t s = 1; s <= r.witness_gamma.size(); ++s) out << ",gamma" << s;
  out << ",f_residual\n";
  for (const auto& c : r.candidates) {
    out << fmt17(c.t) << "," << (c.verdict.flat ? "flat" : "ac_nonempty") << ","
        << r.witness_n;
    for (int gcomp : r.witness_gamma) out << "," << gcomp;
    out << "," << fmt17(c.f_abs) << "\n";
  }
}

}  // namespace magraph
