#include "sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <unordered_map>

#include "errors.hpp"
#include "rng.hpp"

namespace dleig {

double Region::diameter() const { return std::hypot(re1 - re0, im1 - im0); }

double contour_radius(const RegionBox& box, double margin) {
  return std::hypot(box.half_width, box.half_height) * (1.0 + margin);
}

namespace {

constexpr double kContourMargin = 0.1;
constexpr std::uint64_t kPolishSeed = 0x5D1B8C3A9E24F017ULL;

bool is_real_vector(std::span<const Complex> f) {
  for (const Complex& c : f) {
    if (c.imag() != 0.0) return false;
  }
  return true;
}

void check_quad_points(int q) {
  if (q < 8 || q % 2 != 0) fail(Status::InvalidArgument, "indicator: quadrature points must be even and >= 8");
}

double indicator_at_radius(const OperatorFunction& op, const Complex& center, double radius,
                           std::span<const Complex> f, int q, double f_norm) {
  if (!(std::abs(center) > radius)) {
    fail(Status::InvalidArgument, "indicator: contour encloses z = 0");
  }
  // With a real mesh pencil and a real probe vector, nodes in the lower half
  // plane are conjugates of upper-half nodes when the center is real.
  const bool conjugate_nodes = center.imag() == 0.0 && is_real_vector(f);

  std::vector<ComplexVector> node_values(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j) {
    if (conjugate_nodes && 2 * j > q) {
      const ComplexVector& twin = node_values[static_cast<std::size_t>(q - j)];
      ComplexVector w(twin.size());
      for (std::size_t i = 0; i < twin.size(); ++i) w[i] = std::conj(twin[i]);
      node_values[static_cast<std::size_t>(j)] = std::move(w);
      continue;
    }
    const double angle = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(q);
    const Complex z = center + std::polar(radius, angle);
    node_values[static_cast<std::size_t>(j)] = op.solve_resolvent(z, f);
  }

  ComplexVector acc(f.size(), Complex{});
  for (int j = 0; j < q; ++j) {
    const double angle = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(q);
    const Complex weight = std::polar(radius, angle);  // z_j - c
    const ComplexVector& w = node_values[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * w[i];
  }
  const double inv_q = 1.0 / static_cast<double>(q);
  for (auto& c : acc) c *= inv_q;
  return op.norm_M(std::span<const Complex>(acc)) / f_norm;
}

double indicator_with_retry(const OperatorFunction& op, const RegionBox& box, std::span<const Complex> f,
                            double f_norm, const SimOptions& options) {
  const double base_radius = contour_radius(box, options.margin);
  double radius = base_radius;
  for (int attempt = 0; attempt <= options.max_contour_retries; ++attempt) {
    if (!(std::abs(box.center) > radius)) break;
    try {
      return indicator_at_radius(op, box.center, radius, f, options.quad_points, f_norm);
    } catch (const Error& e) {
      if (e.code() != Status::EigenvalueProximity) throw;
    }
    radius *= 1.07;
  }
  fail(Status::ContourCollision,
       "indicator: contour around (" + std::to_string(box.center.real()) + ", " + std::to_string(box.center.imag()) +
           ") keeps hitting eigenvalues after " + std::to_string(options.max_contour_retries) + " radius nudges");
}

struct BoxKey {
  std::uint64_t re, im, hw, hh;
  bool operator==(const BoxKey&) const = default;
};

struct BoxKeyHash {
  std::size_t operator()(const BoxKey& k) const noexcept {
    std::uint64_t h = k.re;
    for (std::uint64_t part : {k.im, k.hw, k.hh}) h = (h * 0x9E3779B97F4A7C15ULL) ^ part;
    return static_cast<std::size_t>(h);
  }
};

// Evaluates indicators for a batch of boxes. Conjugate box pairs are computed
// once (the pencil is real and f is real, so mirrored boxes match exactly);
// remaining boxes may be evaluated concurrently over the read-only operator.
void evaluate_boxes(const OperatorFunction& op, std::vector<RegionBox>& boxes, std::span<const Complex> f,
                    double f_norm, const SimOptions& options) {
  const bool mirror_allowed = is_real_vector(f);
  std::vector<int> mirror_of(boxes.size(), -1);
  std::vector<int> compute;
  compute.reserve(boxes.size());
  std::unordered_map<BoxKey, int, BoxKeyHash> seen;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const RegionBox& b = boxes[i];
    if (mirror_allowed && b.center.imag() != 0.0) {
      const BoxKey key{std::bit_cast<std::uint64_t>(b.center.real()),
                       std::bit_cast<std::uint64_t>(std::abs(b.center.imag())),
                       std::bit_cast<std::uint64_t>(b.half_width), std::bit_cast<std::uint64_t>(b.half_height)};
      const auto it = seen.find(key);
      if (it != seen.end() && boxes[static_cast<std::size_t>(it->second)].center.imag() == -b.center.imag()) {
        mirror_of[i] = it->second;
        continue;
      }
      seen.emplace(key, static_cast<int>(i));
    }
    compute.push_back(static_cast<int>(i));
  }

  std::vector<std::exception_ptr> errors(boxes.size());
  const auto run = [&](int idx) {
    try {
      boxes[static_cast<std::size_t>(idx)].indicator = indicator_with_retry(op, boxes[static_cast<std::size_t>(idx)], f, f_norm, options);
    } catch (...) {
      errors[static_cast<std::size_t>(idx)] = std::current_exception();
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1 || compute.size() < 2) {
    for (int idx : compute) run(idx);
  } else {
    std::vector<std::future<void>> workers;
    const int stride = std::min<int>(threads, static_cast<int>(compute.size()));
    workers.reserve(static_cast<std::size_t>(stride));
    for (int t = 0; t < stride; ++t) {
      workers.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t k = static_cast<std::size_t>(t); k < compute.size(); k += static_cast<std::size_t>(stride)) {
          run(compute[k]);
        }
      }));
    }
    for (auto& w : workers) w.get();
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    if (mirror_of[i] >= 0) boxes[i].indicator = boxes[static_cast<std::size_t>(mirror_of[i])].indicator;
  }
}

void subdivide(const RegionBox& box, std::vector<RegionBox>& out) {
  const double hw = 0.5 * box.half_width;
  const double hh = 0.5 * box.half_height;
  for (const double dy : {-hh, hh}) {
    for (const double dx : {-hw, hw}) {
      RegionBox child;
      child.center = Complex(box.center.real() + dx, box.center.imag() + dy);
      child.half_width = hw;
      child.half_height = hh;
      child.level = box.level + 1;
      child.trace = box.trace;
      out.push_back(std::move(child));
    }
  }
}

void validate_options(const SimOptions& options) {
  check_quad_points(options.quad_points);
  if (!(options.threshold > 0.0)) fail(Status::InvalidArgument, "search: threshold must be positive");
  if (!(options.margin > 0.0)) fail(Status::InvalidArgument, "search: margin must be positive");
  if (options.max_depth < 1) fail(Status::InvalidArgument, "search: max depth must be >= 1");
  if (options.size_tol < 0.0) fail(Status::InvalidArgument, "search: size tolerance must be >= 0");
}

ComplexVector random_probe(int dim, std::uint64_t seed) {
  SplitMix64 rng(seed);
  ComplexVector f(static_cast<std::size_t>(dim));
  for (auto& c : f) c = Complex(rng.next_symmetric(), 0.0);
  return f;
}

}  // namespace

double indicator(const OperatorFunction& op, const RegionBox& box, std::span<const Complex> f, int quad_points) {
  check_quad_points(quad_points);
  const double f_norm = op.norm_M(f);
  if (!(f_norm > 0.0)) fail(Status::InvalidArgument, "indicator: probe vector must be nonzero");
  return indicator_at_radius(op, box.center, contour_radius(box, kContourMargin), f, quad_points, f_norm);
}

SearchResult search(const OperatorFunction& op, const Region& region, const SimOptions& options) {
  validate_options(options);
  if (!(region.re1 > region.re0) || !(region.im1 > region.im0)) {
    fail(Status::InvalidArgument, "search: region must be a nondegenerate rectangle");
  }
  if (region.re0 <= 0.0 && region.re1 >= 0.0 && region.im0 <= 0.0 && region.im1 >= 0.0) {
    fail(Status::InvalidArgument, "search: region must exclude z = 0");
  }
  const double eps = options.size_tol > 0.0 ? options.size_tol : 1e-6 * region.diameter();

  const ComplexVector f = random_probe(op.dim(), options.seed);
  const double f_norm = op.norm_M(std::span<const Complex>(f));
  if (!(f_norm > 0.0)) fail(Status::Internal, "search: degenerate random probe");

  // Split the region until every root contour excludes the origin.
  std::vector<RegionBox> current;
  {
    std::vector<RegionBox> pending;
    RegionBox root;
    root.center = Complex(0.5 * (region.re0 + region.re1), 0.5 * (region.im0 + region.im1));
    root.half_width = 0.5 * (region.re1 - region.re0);
    root.half_height = 0.5 * (region.im1 - region.im0);
    pending.push_back(std::move(root));
    while (!pending.empty()) {
      RegionBox box = std::move(pending.back());
      pending.pop_back();
      if (std::abs(box.center) > contour_radius(box, options.margin)) {
        current.push_back(std::move(box));
      } else if (box.level >= options.max_depth || std::max(box.half_width, box.half_height) < eps) {
        fail(Status::InvalidArgument, "search: region comes too close to z = 0 for the contour margin");
      } else {
        subdivide(box, pending);
      }
    }
    std::sort(current.begin(), current.end(), [](const RegionBox& a, const RegionBox& b) {
      if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
      return a.center.imag() < b.center.imag();
    });
  }

  SearchResult result;
  std::vector<EigenvalueEstimate> raw;
  while (!current.empty()) {
    evaluate_boxes(op, current, std::span<const Complex>(f), f_norm, options);
    std::vector<RegionBox> next;
    for (RegionBox& box : current) {
      if (!(box.indicator >= options.threshold)) continue;
      box.trace.emplace_back(box.level, box.indicator);
      if (std::max(box.half_width, box.half_height) < eps) {
        EigenvalueEstimate est;
        est.enclosure_radius = contour_radius(box, options.margin);
        est.indicator_trace = box.trace;
        const PolishResult p = polish(op, box.center);
        est.polish_residual = p.residual;
        est.polished = p.converged;
        est.value = p.converged ? Complex(p.value, 0.0) : box.center;
        raw.push_back(std::move(est));
      } else if (box.level >= options.max_depth) {
        result.warnings.push_back({box.center, box.half_width, box.half_height, box.indicator, box.level});
      } else {
        subdivide(box, next);
      }
    }
    current = std::move(next);
  }

  // Adjacent surviving boxes around one eigenvalue emit near-identical
  // values; merge within 2*eps keeping the smallest-residual member.
  std::sort(raw.begin(), raw.end(), [](const EigenvalueEstimate& a, const EigenvalueEstimate& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i + 1;
    std::size_t best = i;
    while (j < raw.size() && std::abs(raw[j].value - raw[j - 1].value) <= 2.0 * eps) {
      if (raw[j].polish_residual < raw[best].polish_residual) best = j;
      ++j;
    }
    EigenvalueEstimate merged = raw[best];
    for (std::size_t k = i; k < j; ++k) merged.enclosure_radius = std::max(merged.enclosure_radius, raw[k].enclosure_radius);
    result.estimates.push_back(std::move(merged));
    i = j;
  }
  return result;
}

PolishResult polish(const OperatorFunction& op, Complex guess) {
  const Csr& a_mat = op.system().stiffness;
  const Csr& m_mat = op.system().mass;
  const int n = op.dim();

  PolishResult res;
  double sigma = guess.real();
  res.value = sigma;

  SplitMix64 rng(kPolishSeed);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& c : v) c = rng.next_symmetric();
  {
    const double nv = op.norm_M(std::span<const double>(v));
    for (auto& c : v) c /= nv;
  }

  for (int it = 1; it <= 50; ++it) {
    res.iterations = it;
    std::vector<double> w;
    bool factored = false;
    // A pivot collapse means either that the shift sits on an eigenvalue or
    // that a leading minor of the indefinite matrix happens to vanish;
    // escalating nudges escape both without leaving the iteration's basin.
    for (const double delta : {0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4}) {
      const double shift = sigma + delta * std::max(std::abs(sigma), 1.0);
      try {
        const auto factor = SkylineFactorization<double>::factor(a_mat, m_mat, 1.0, -shift);
        w = factor.solve(std::span<const double>(m_mat.multiply(std::span<const double>(v))));
        factored = true;
        break;
      } catch (const Error& e) {
        if (e.code() != Status::NearSingular) throw;
      }
    }
    if (!factored) break;

    const double nw = op.norm_M(std::span<const double>(w));
    if (!(nw > 0.0)) break;
    for (auto& c : w) c /= nw;
    v = std::move(w);

    const auto av = a_mat.multiply(std::span<const double>(v));
    const auto mv = m_mat.multiply(std::span<const double>(v));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      num += v[i] * av[i];
      den += v[i] * mv[i];
    }
    const double rq = num / den;
    const bool converged = std::abs(rq - sigma) < 1e-12 * std::abs(rq);
    sigma = rq;
    if (converged) {
      res.converged = true;
      break;
    }
  }

  res.value = sigma;
  const auto av = a_mat.multiply(std::span<const double>(v));
  const auto mv = m_mat.multiply(std::span<const double>(v));
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = av[i] - sigma * mv[i];
  res.residual = op.norm_M(std::span<const double>(r));
  return res;
}

std::vector<IndicatorSample> indicator_map(const OperatorFunction& op, const Region& region, int nx, int ny,
                                           const SimOptions& options) {
  validate_options(options);
  if (nx < 1 || ny < 1) fail(Status::InvalidArgument, "indicator_map: grid must be at least 1x1");
  if (!(region.re1 > region.re0) || !(region.im1 > region.im0)) {
    fail(Status::InvalidArgument, "indicator_map: region must be a nondegenerate rectangle");
  }
  const double hw = 0.5 * (region.re1 - region.re0) / nx;
  const double hh = 0.5 * (region.im1 - region.im0) / ny;

  const ComplexVector f = random_probe(op.dim(), options.seed);
  const double f_norm = op.norm_M(std::span<const Complex>(f));

  std::vector<IndicatorSample> samples;
  samples.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      RegionBox box;
      box.center = Complex(region.re0 + (2 * ix + 1) * hw, region.im0 + (2 * iy + 1) * hh);
      box.half_width = hw;
      box.half_height = hh;
      IndicatorSample s{box.center.real(), box.center.imag(), std::numeric_limits<double>::quiet_NaN()};
      try {
        s.indicator = indicator_with_retry(op, box, std::span<const Complex>(f), f_norm, options);
      } catch (const Error& e) {
        if (e.code() != Status::ContourCollision && e.code() != Status::InvalidArgument) throw;
        // cell contour could not be evaluated (eigenvalue collisions or origin); map shows a gap
      }
      samples.push_back(s);
    }
  }
  return samples;
}

}  // namespace dleig
