#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "nlsl/characteristic.hpp"

namespace nlsl {

/// Rectangle [re_min, re_max] x [im_min, im_max] in the lambda-plane.
struct SearchBox {
  double re_min = 0.0, re_max = 0.0;
  double im_min = 0.0, im_max = 0.0;
  /// Largest phase advance of rho*T allowed between initial contour samples.
  double sample_phase = 0.5;
  int max_depth = 24;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  bool empty() const { return !(width() > 0.0 && height() > 0.0); }
  bool contains(cplx z, double margin = 0.0) const;
  cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  /// Grows every side by fraction * the corresponding extent.
  SearchBox inflated(double fraction) const;
  /// Largest |rho| over the box.
  double rho_max() const;
};

/// A characteristic function on one fixed grid, so that it is a single entire function
/// of lambda across the region it is used on. Thread-safe.
class CharFunction {
 public:
  CharFunction(ProblemSpec spec, CharKind which, double rho_ref, GridOptions options = {});

  Scaled operator()(cplx lambda) const;
  /// Central difference with step 1e-6 (1 + |lambda|).
  Scaled derivative(cplx lambda) const;

  const ProblemSpec& spec() const { return spec_; }
  CharKind which() const { return which_; }
  double rho_ref() const { return rho_ref_; }
  std::size_t evaluations() const;

 private:
  ProblemSpec spec_;
  CharKind which_;
  double rho_ref_;
  std::shared_ptr<const Discretization> disc_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<double, double>, Scaled> cache_;
};

/// log of (1 + |lambda|)^(1/2) exp(|Im rho| T).
double log_modulus_scale(cplx lambda, double T);

struct Eigenvalue {
  cplx lambda;
  int multiplicity = 1;
};

struct Spectrum {
  std::vector<Eigenvalue> entries;  // sorted by (Re, Im)
  CharKind source = CharKind::omega;
  SearchBox box;  // after any nudging
  int winding_total = 0;

  std::vector<cplx> values() const;
};

/// Winding number of f around the box. ContourError when a zero sits on the contour.
int count_zeros(const CharFunction& f, const SearchBox& box);

struct SpectrumOptions {
  double tol = 1e-10;
  /// Sign-change bracketing on the real axis instead of contours. Only valid when the
  /// problem is self-adjoint, so that every zero is real and simple.
  bool real_fast_path = false;
};

Spectrum find_spectrum(const CharFunction& f, const SearchBox& box, const SpectrumOptions& options = {});

/// Builds a CharFunction with the grid fixed for the box and runs find_spectrum.
Spectrum find_spectrum(const ProblemSpec& spec, CharKind which, const SearchBox& box,
                       const SpectrumOptions& options = {}, const GridOptions& grid = {});

/// Real potential and point-evaluation forms: every characteristic function then belongs to
/// a separated self-adjoint problem, with real simple zeros.
bool is_self_adjoint(const ProblemSpec& spec);

/// The first count zeros by real part, searched in growing boxes.
Spectrum first_zeros(const ProblemSpec& spec, CharKind which, int count, const GridOptions& grid = {});

struct SeparationReport {
  bool holds = true;
  double min_gap = 0.0;  // infinity when either set is empty
  std::optional<std::pair<cplx, cplx>> closest;
};

/// Minimal distance between two finite point sets.
SeparationReport separation(std::span<const cplx> a, std::span<const cplx> b, double separation_tol);

/// Disjointness of the zeros of Delta1 and omega in the box. With U1 = y(0), U2 = y(a)
/// this is the disjointness of the Dirichlet spectra on (0, a) and (0, T).
SeparationReport condition_S(const ProblemSpec& spec, const SearchBox& box, double separation_tol,
                             const GridOptions& grid = {});

}  // namespace nlsl
