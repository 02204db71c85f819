#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "opfun.hpp"

namespace dleig {

// Axis-aligned rectangle in the complex plane.
struct Region {
  double re0 = 0.0, re1 = 0.0, im0 = 0.0, im1 = 0.0;
  double diameter() const;
};

struct RegionBox {
  Complex center;
  double half_width = 0.0;
  double half_height = 0.0;
  int level = 0;
  double indicator = -1.0;  // unset before evaluation
  std::vector<std::pair<int, double>> trace;  // (level, indicator) along the ancestry
};

struct SimOptions {
  int quad_points = 32;
  double threshold = 1e-3;   // indicator survival threshold (delta)
  double size_tol = 0.0;     // absolute epsilon; 0 selects 1e-6 * region diameter
  int max_depth = 40;
  std::uint64_t seed = 20240601;
  double margin = 0.1;       // contour radius margin over the box circumradius
  int max_contour_retries = 5;
  int threads = 1;
};

struct EigenvalueEstimate {
  Complex value;
  double enclosure_radius = 0.0;
  std::vector<std::pair<int, double>> indicator_trace;
  double polish_residual = 0.0;
  bool polished = false;
};

// A box that stayed above threshold at max depth without shrinking to the
// size tolerance; signals a multiple eigenvalue or a threshold set too low.
struct UnresolvedCluster {
  Complex center;
  double half_width = 0.0;
  double half_height = 0.0;
  double indicator = 0.0;
  int level = 0;
};

struct SearchResult {
  std::vector<EigenvalueEstimate> estimates;  // sorted by real part
  std::vector<UnresolvedCluster> warnings;
};

double contour_radius(const RegionBox& box, double margin);

// Normalized trapezoidal contour integral of F_h(z)^{-1} f over the circle
// circumscribing the box: || (1/q) sum (z_j - c) F_h(z_j)^{-1} f ||_M / ||f||_M.
// Nodes hitting an eigenvalue raise eigenvalue-proximity; no retry here.
double indicator(const OperatorFunction& op, const RegionBox& box, std::span<const Complex> f, int quad_points);

// Recursive box subdivision over the region; emits polished estimates.
SearchResult search(const OperatorFunction& op, const Region& region, const SimOptions& options = {});

struct PolishResult {
  double value = 0.0;
  double residual = 0.0;  // ||A v - value * M v||_M at the final iterate
  bool converged = false;
  int iterations = 0;
};

// Shifted inverse iteration with Rayleigh-quotient update on the pencil (A, M),
// starting shift Re(guess); stops at 1e-12 relative shift change or 50 steps.
PolishResult polish(const OperatorFunction& op, Complex guess);

struct IndicatorSample {
  double re = 0.0, im = 0.0;
  double indicator = 0.0;  // NaN where the contour could not be evaluated
};

// Indicator on an nx-by-ny grid of cells covering the region, for map dumps.
std::vector<IndicatorSample> indicator_map(const OperatorFunction& op, const Region& region, int nx, int ny,
                                           const SimOptions& options = {});

}  // namespace dleig
