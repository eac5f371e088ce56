#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "sidewalk/dynamics.hpp"
#include "sidewalk/errors.hpp"
#include "sidewalk/graph.hpp"
#include "sidewalk/measure.hpp"
#include "sidewalk/rational.hpp"
#include "sidewalk/solver.hpp"

namespace sidewalk {

struct ExpansionEstimate {
  std::optional<Rational> exact;
  double spectral_lower = 0.0;
  double lambda2 = 0.0;
  std::optional<VertexSet> witness;
};

namespace detail {

struct SpectralPair {
  double top = 0.0;
  double second = 0.0;
};

/// Top two adjacency eigenvalues by power iteration with deflation on
/// A + Delta I (the shift keeps the spectrum non-negative so the iteration
/// cannot lock onto a large negative eigenvalue). Advisory precision:
/// relative tolerance 1e-8, at most 1e4 iterations.
inline SpectralPair adjacency_top_two(const Graph& g) {
  const std::size_t n = g.vertex_count();
  SpectralPair result;
  if (n == 0) return result;
  const double shift = g.degree_bound();

  const auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t v = 0; v < n; ++v) y[v] = shift * x[v];
    for (const auto& [u, v] : g.edges()) {
      y[u] += x[v];
      y[v] += x[u];
    }
  };
  const auto normalize = [](std::vector<double>& x) {
    double norm = 0;
    for (double c : x) norm += c * c;
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& c : x) c /= norm;
  };

  std::vector<double> b(n), y(n), v1;
  const auto iterate = [&](const std::vector<double>* deflate) {
    double value = 0;
    for (std::size_t it = 0; it < 10000; ++it) {
      apply(b, y);
      if (deflate) {
        double dot = 0;
        for (std::size_t i = 0; i < n; ++i) dot += y[i] * (*deflate)[i];
        for (std::size_t i = 0; i < n; ++i) y[i] -= dot * (*deflate)[i];
      }
      double rayleigh = 0;
      for (std::size_t i = 0; i < n; ++i) rayleigh += y[i] * b[i];
      normalize(y);
      b.swap(y);
      if (it > 0 && std::abs(rayleigh - value) <= 1e-8 * std::abs(rayleigh) + 1e-12) {
        value = rayleigh;
        break;
      }
      value = rayleigh;
    }
    return value;
  };

  for (std::size_t i = 0; i < n; ++i) b[i] = 1.0 + 1e-6 * static_cast<double>(i % 97);
  normalize(b);
  result.top = iterate(nullptr) - shift;
  v1 = b;

  for (std::size_t i = 0; i < n; ++i) b[i] = (i % 2 ? 1.0 : -1.0) + 1e-6 * static_cast<double>(i % 89);
  {
    double dot = 0;
    for (std::size_t i = 0; i < n; ++i) dot += b[i] * v1[i];
    for (std::size_t i = 0; i < n; ++i) b[i] -= dot * v1[i];
  }
  normalize(b);
  result.second = iterate(&v1) - shift;
  return result;
}

}  // namespace detail

/// lambda_mu(G) = inf over 0 < mu(A) <= 1/2 of the normalized edge
/// boundary sum_{x in A} w(x)|G_x \ A| / mu(A). Exact minimization for
/// n <= 20; on larger regular graphs the Cheeger-style bound
/// (d - lambda_2)/2 from power iteration is reported instead (advisory,
/// never asserted exactly).
inline ExpansionEstimate expansion_constant(const Graph& g, const VertexMeasure& mu) {
  ExpansionEstimate estimate;
  const std::size_t n = g.vertex_count();
  if (n == 0) return estimate;

  if (n <= 20) {
    const Rational half(1, 2);
    std::optional<Rational> best;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
      Rational mass = 0;
      for (std::size_t v = 0; v < n; ++v)
        if (mask & (1u << v)) mass += mu.weight(static_cast<Vertex>(v));
      if (mass > half) continue;
      Rational boundary = 0;
      for (std::size_t v = 0; v < n; ++v) {
        if (!(mask & (1u << v))) continue;
        std::size_t out = 0;
        for (Vertex w : g.neighbors(static_cast<Vertex>(v)))
          if (!(mask & (1u << w))) ++out;
        boundary += mu.weight(static_cast<Vertex>(v)) * Rational(static_cast<long>(out));
      }
      Rational ratio = boundary / mass;
      if (!best || ratio < *best) {
        best = std::move(ratio);
        best_mask = mask;
      }
    }
    if (best) {
      estimate.exact = *best;
      VertexSet witness(n);
      for (std::size_t v = 0; v < n; ++v)
        if (best_mask & (1u << v)) witness.add(static_cast<Vertex>(v));
      estimate.witness = std::move(witness);
    }
  }

  const auto spectral = detail::adjacency_top_two(g);
  estimate.lambda2 = spectral.second;
  if (const auto d = g.regular_degree(); d && mu.is_uniform())
    estimate.spectral_lower = std::max(0.0, (static_cast<double>(*d) - spectral.second) / 2.0);
  return estimate;
}

/// (rho alpha / k)^n for n = 1..stages, with alpha and rho exact.
inline std::vector<Rational> claim2_envelope(const Graph& g, const VertexMeasure& mu,
                                             std::uint32_t k, std::uint32_t stages) {
  if (k == 0) throw ValidationError("envelope needs k > 0");
  const Rational alpha = max_density_subgraph(g, mu).density;
  const Rational rho = cocycle_bound(g, mu);
  const Rational ratio = rho * alpha / Rational(static_cast<long>(k));
  std::vector<Rational> envelope;
  envelope.reserve(stages);
  Rational value = 1;
  for (std::uint32_t n = 1; n <= stages; ++n) {
    value *= ratio;
    envelope.push_back(value);
  }
  return envelope;
}

struct BoundCheck {
  bool holds = false;
  Rational lhs;
  Rational rhs;
};

/// Per-stage flip bound, exact: the measure of edges flipped during a stage
/// is at most 2 n Delta rho^n min(mu(O), mu(I)) at stage start.
inline BoundCheck check_lemma_bound(const StageMetrics& stage, std::uint32_t degree_bound,
                                    const Rational& rho) {
  BoundCheck check;
  check.lhs = stage.flipped_measure;
  const Rational factor = Rational(2) * Rational(static_cast<long>(stage.n)) *
                          Rational(static_cast<long>(degree_bound)) * pow_rational(rho, stage.n);
  check.rhs = factor * std::min(stage.mu_O_start, stage.mu_I_start);
  check.holds = check.lhs <= check.rhs;
  return check;
}

/// Terminal envelope, exact: once no augmenting chain of length <= n
/// remains, mu(O) <= (rho alpha / k)^n. Applicable whenever the recorded
/// shortest chain exceeds the stage length.
inline std::optional<BoundCheck> check_claim2_bound(const StageMetrics& stage,
                                                    const Rational& alpha, const Rational& rho,
                                                    std::uint32_t k) {
  if (stage.min_chain_end && *stage.min_chain_end <= stage.n) return std::nullopt;
  BoundCheck check;
  check.lhs = stage.mu_O_end;
  check.rhs = pow_rational(rho * alpha / Rational(static_cast<long>(k)), stage.n);
  check.holds = check.lhs <= check.rhs;
  return check;
}

struct DecayFit {
  std::vector<std::uint32_t> stage_numbers;
  std::vector<Rational> series;
  std::optional<double> fitted_rate;
  std::optional<Rational> envelope_rate;     // rho alpha / k
  std::optional<Rational> hypothesis_rate;   // rho^2 alpha / k
};

/// Least squares on log mu(O) over the stages where it is positive; the
/// fit is a diagnostic only, acceptance always asserts the exact bounds.
inline std::optional<double> fit_geometric_rate(const std::vector<std::uint32_t>& xs,
                                                const std::vector<Rational>& series) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series[i] > 0) {
      x.push_back(static_cast<double>(xs[i]));
      y.push_back(std::log(series[i].get_d()));
    }
  }
  if (x.size() < 3) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double cov = 0, var = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    var += (x[i] - mx) * (x[i] - mx);
  }
  if (var == 0) return std::nullopt;
  return std::exp(cov / var);
}

inline DecayFit fit_decay(const DynamicsTrace& trace, std::uint32_t k) {
  DecayFit fit;
  for (const StageMetrics& stage : trace.stages) {
    fit.stage_numbers.push_back(stage.n);
    fit.series.push_back(stage.mu_O_end);
  }
  fit.fitted_rate = fit_geometric_rate(fit.stage_numbers, fit.series);
  if (trace.alpha && k > 0) {
    fit.envelope_rate = trace.rho * *trace.alpha / Rational(static_cast<long>(k));
    fit.hypothesis_rate = trace.rho * trace.rho * *trace.alpha / Rational(static_cast<long>(k));
  }
  return fit;
}

}  // namespace sidewalk
