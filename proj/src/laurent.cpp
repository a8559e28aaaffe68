#include "magraph/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "magraph/errors.hpp"

namespace magraph {

std::complex<double> LaurentSeries::coeff(const Key& gamma) const {
  auto it = terms_.find(gamma);
  return it == terms_.end() ? std::complex<double>(0.0, 0.0) : it->second;
}

std::complex<double> LaurentSeries::eval(const Eigen::VectorXd& k) const {
  std::complex<double> sum(0.0, 0.0);
  for (const auto& [gamma, c] : terms_) {
    double phase = 0.0;
    for (int s = 0; s < dim_; ++s) phase += gamma[s] * k[s];
    sum += c * std::polar(1.0, -phase);
  }
  return sum;
}

void LaurentBuilder::add(LaurentSeries::Key gamma, std::complex<double> c) {
  max_contribution_ = std::max(max_contribution_, std::abs(c));
  acc_[std::move(gamma)] += std::complex<long double>(c.real(), c.imag());
}

void LaurentBuilder::add_series(const LaurentSeries& s) {
  for (const auto& [gamma, c] : s.terms()) add(gamma, c);
}

void LaurentBuilder::add_product(const LaurentSeries& a, const LaurentSeries& b) {
  LaurentSeries::Key key(dim_);
  for (const auto& [ga, ca] : a.terms()) {
    const std::complex<long double> ca_l(ca.real(), ca.imag());
    for (const auto& [gb, cb] : b.terms()) {
      for (int s = 0; s < dim_; ++s) key[s] = ga[s] + gb[s];
      const std::complex<long double> prod =
          ca_l * std::complex<long double>(cb.real(), cb.imag());
      max_contribution_ =
          std::max(max_contribution_, static_cast<double>(std::abs(prod)));
      acc_[key] += prod;
    }
  }
}

LaurentSeries LaurentBuilder::finish() {
  LaurentSeries out(dim_);
  const double threshold = kPruneRel * max_contribution_;
  for (auto& [gamma, acc] : acc_) {
    const std::complex<double> c(static_cast<double>(acc.real()),
                                 static_cast<double>(acc.imag()));
    if (std::abs(c) >= threshold && c != std::complex<double>(0.0, 0.0))
      out.terms_.emplace(gamma, c);
  }
  acc_.clear();
  max_contribution_ = 0.0;
  return out;
}

long long LaurentMatrix::term_count() const {
  long long n = 0;
  for (const auto& e : entries) n += static_cast<long long>(e.size());
  return n;
}

LaurentMatrix LaurentMatrix::multiply(const LaurentMatrix& rhs, long long term_budget) const {
  if (size != rhs.size || dimension != rhs.dimension)
    throw ValidationError("Laurent matrix shapes do not match");
  LaurentMatrix out;
  out.dimension = dimension;
  out.size = size;
  out.entries.reserve(static_cast<size_t>(size) * size);
  long long running = 0;
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      LaurentBuilder builder(dimension);
      for (int m = 0; m < size; ++m) builder.add_product(at(r, m), rhs.at(m, c));
      out.entries.push_back(builder.finish());
      running += static_cast<long long>(out.entries.back().size());
      if (running > term_budget) {
        std::ostringstream msg;
        msg << "Laurent term count " << running << " exceeds budget " << term_budget;
        throw BudgetError(msg.str());
      }
    }
  }
  return out;
}

LaurentSeries LaurentMatrix::trace() const {
  LaurentBuilder builder(dimension);
  for (int v = 0; v < size; ++v) builder.add_series(at(v, v));
  return builder.finish();
}

}  // namespace magraph
