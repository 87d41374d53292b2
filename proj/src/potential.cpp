#include "nlsl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlsl/errors.hpp"

namespace nlsl {

namespace {

void check_finite(const std::vector<cplx>& v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw InputError("potential values must be finite");
}

}  // namespace

Potential::Potential(Kind kind, double T, std::vector<double> nodes, std::vector<cplx> values)
    : kind_(kind), T_(T), nodes_(std::move(nodes)), values_(std::move(values)) {
  if (!(T_ > 0.0) || !std::isfinite(T_)) throw InputError("potential domain length must be positive");
  check_finite(values_);
}

Potential Potential::from_grid(std::vector<double> nodes, std::vector<cplx> values) {
  if (nodes.size() < 2 || nodes.size() != values.size())
    throw InputError("grid potential needs >= 2 nodes and one value per node");
  if (nodes.front() != 0.0) throw InputError("grid potential must start at x=0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw InputError("grid potential nodes must increase");
  const double T = nodes.back();
  return Potential(Kind::grid, T, std::move(nodes), std::move(values));
}

Potential Potential::cosine(double T, std::vector<cplx> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  return Potential(Kind::cosine, T, {}, std::move(coefficients));
}

Potential Potential::piecewise(double T, std::vector<double> breakpoints, std::vector<cplx> values) {
  if (values.size() != breakpoints.size() + 1)
    throw InputError("piecewise potential needs one value per cell (breakpoints + 1)");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > 0.0 && breakpoints[i] < T))
      throw InputError("piecewise breakpoints must lie in (0, T)");
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
      throw InputError("piecewise breakpoints must increase");
  }
  return Potential(Kind::piecewise, T, std::move(breakpoints), std::move(values));
}

cplx Potential::operator()(double x) const {
  switch (kind_) {
    case Kind::cosine: {
      cplx acc = 0.0;
      const double w = std::numbers::pi * x / T_;
      for (std::size_t k = 0; k < values_.size(); ++k)
        acc += values_[k] * std::cos(static_cast<double>(k) * w);
      return acc;
    }
    case Kind::piecewise: {
      const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
      return values_[static_cast<std::size_t>(it - nodes_.begin())];
    }
    case Kind::grid: {
      if (x <= 0.0) return values_.front();
      if (x >= T_) return values_.back();
      const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
      const auto k = static_cast<std::size_t>(it - nodes_.begin());
      const double s = (x - nodes_[k - 1]) / (nodes_[k] - nodes_[k - 1]);
      return values_[k - 1] * (1.0 - s) + values_[k] * s;
    }
  }
  return 0.0;
}

cplx Potential::left_limit(double x) const {
  if (kind_ != Kind::piecewise) return (*this)(x);
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x);
  return values_[static_cast<std::size_t>(it - nodes_.begin())];
}

std::vector<double> Potential::breakpoints() const {
  if (kind_ == Kind::grid) return {nodes_.begin() + 1, nodes_.end() - 1};
  return nodes_;
}

Potential Potential::reflected() const {
  switch (kind_) {
    case Kind::cosine: {
      auto c = values_;
      for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
      return Potential(kind_, T_, {}, std::move(c));
    }
    case Kind::piecewise:
    case Kind::grid: {
      std::vector<double> n(nodes_.rbegin(), nodes_.rend());
      for (auto& x : n) x = T_ - x;
      if (kind_ == Kind::grid) {
        n.front() = 0.0;
        n.back() = T_;
      }
      return Potential(kind_, T_, std::move(n), {values_.rbegin(), values_.rend()});
    }
  }
  return *this;
}

Potential Potential::shifted(cplx c) const {
  auto v = values_;
  if (kind_ == Kind::cosine) {
    v[0] += c;
  } else {
    for (auto& z : v) z += c;
  }
  return Potential(kind_, T_, nodes_, std::move(v));
}

Potential Potential::with_values(std::vector<cplx> values) const {
  if (kind_ != Kind::cosine && values.size() != values_.size())
    throw InputError("replacement values do not match the potential layout");
  return Potential(kind_, T_, nodes_, std::move(values));
}

bool Potential::is_real() const {
  return std::all_of(values_.begin(), values_.end(), [](cplx z) { return z.imag() == 0.0; });
}

double sup_distance(const Potential& a, const Potential& b, int samples) {
  if (a.T() != b.T()) throw DomainError("potentials on different intervals");
  std::vector<double> xs;
  for (int i = 0; i < samples; ++i) xs.push_back(a.T() * i / (samples - 1));
  for (double x : a.breakpoints()) xs.push_back(x);
  for (double x : b.breakpoints()) xs.push_back(x);
  double d = 0.0;
  for (double x : xs) {
    d = std::max(d, std::abs(a(x) - b(x)));
    d = std::max(d, std::abs(a.left_limit(x) - b.left_limit(x)));
  }
  return d;
}

}  // namespace nlsl
