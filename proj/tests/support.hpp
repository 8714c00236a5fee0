#pragma once

// Shared helpers for the test suites: seeded random instances and the
// independent brute-force/Blahut-Arimoto oracles the derived expectations
// are checked against. Everything here is test-only and deliberately avoids
// the library's own region computations.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mtsc/discrete.hpp"

namespace testsup {

inline constexpr double kH25 = 0.8112781244591328;  // h(0.25)

inline double h2(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

inline std::vector<double> dirichlet(std::mt19937_64& rng, int n) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (double& x : v) {
    x = exp1(rng);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

inline mtsc::JointPmf random_pmf(std::mt19937_64& rng, int m, int l) {
  return mtsc::JointPmf(m, l, dirichlet(rng, m * l));
}

inline mtsc::AuxChannel random_channel(std::mt19937_64& rng, int l, int k) {
  std::vector<double> w;
  for (int y = 0; y < l; ++y) {
    const std::vector<double> row = dirichlet(rng, k);
    w.insert(w.end(), row.begin(), row.end());
  }
  return mtsc::validate_channel(l, k, std::move(w));
}

inline mtsc::JointPmf dsbs(double crossover) {
  const double a = (1.0 - crossover) / 2.0;
  const double b = crossover / 2.0;
  return mtsc::validate_pmf({{a, b}, {b, a}});
}

// ---------------------------------------------------------------------------
// Independent oracle for the point-to-point log-loss RD function: constrained
// Blahut-Arimoto over a reproduction alphabet discretized to a simplex grid.
// Returns a dual (lower) and achievable (upper) bound on the grid-restricted
// min I(X; Zhat) subject to E[log2 1/zhat(X)] <= budget.

struct RdBounds {
  double lower = 0.0;
  double upper = 0.0;
};

namespace detail {

// All points of the m-simplex whose coordinates are multiples of 1/steps.
inline void atom_grid(int steps, int dims, std::vector<int>& cur,
                      std::vector<std::vector<double>>& out) {
  int used = 0;
  for (int c : cur) used += c;
  if (dims == 1) {
    std::vector<double> atom;
    for (int c : cur) atom.push_back(double(c) / double(steps));
    atom.push_back(double(steps - used) / double(steps));
    out.push_back(std::move(atom));
    return;
  }
  for (int v = 0; v <= steps - used; ++v) {
    cur.push_back(v);
    atom_grid(steps, dims - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline RdBounds ba_rd_logloss_bounds(const std::vector<double>& px,
                                     double budget, int atom_steps) {
  const int m = int(px.size());
  std::vector<std::vector<double>> atoms;
  std::vector<int> cur;
  detail::atom_grid(atom_steps, m, cur, atoms);
  const std::size_t na = atoms.size();

  // d[x][a] = -log2 atom[a][x]
  std::vector<std::vector<double>> d(static_cast<std::size_t>(m),
                                     std::vector<double>(na));
  for (int x = 0; x < m; ++x)
    for (std::size_t a = 0; a < na; ++a)
      d[std::size_t(x)][a] = mtsc::surprisal(atoms[a][std::size_t(x)]);

  RdBounds bounds;
  bounds.upper = mtsc::infinity();
  std::vector<std::pair<double, double>> points;  // (E d, I)

  for (int si = 0; si <= 150; ++si) {
    const double s = 0.02 + (3.0 - 0.02) * double(si) / 150.0;
    std::vector<double> q(na, 1.0 / double(na));
    std::vector<std::vector<double>> w(std::size_t(m),
                                       std::vector<double>(na, 0.0));
    for (int it = 0; it < 400; ++it) {
      for (int x = 0; x < m; ++x) {
        double z = 0.0;
        for (std::size_t a = 0; a < na; ++a) {
          const double v = std::isfinite(d[std::size_t(x)][a])
                               ? q[a] * std::exp2(-s * d[std::size_t(x)][a])
                               : 0.0;
          w[std::size_t(x)][a] = v;
          z += v;
        }
        for (std::size_t a = 0; a < na; ++a) w[std::size_t(x)][a] /= z;
      }
      for (std::size_t a = 0; a < na; ++a) {
        q[a] = 0.0;
        for (int x = 0; x < m; ++x)
          q[a] += px[std::size_t(x)] * w[std::size_t(x)][a];
      }
    }
    double mi = 0.0, ed = 0.0;
    for (int x = 0; x < m; ++x)
      for (std::size_t a = 0; a < na; ++a) {
        const double v = w[std::size_t(x)][a];
        if (v <= 0.0 || q[a] <= 0.0) continue;
        mi += px[std::size_t(x)] * v * std::log2(v / q[a]);
        ed += px[std::size_t(x)] * v * d[std::size_t(x)][a];
      }
    bounds.lower = std::max(bounds.lower, mi + s * (ed - budget));
    if (ed <= budget + 1e-12) bounds.upper = std::min(bounds.upper, mi);
    points.emplace_back(ed, mi);
  }

  // Time-sharing closure of the collected achievable points.
  std::sort(points.begin(), points.end());
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const auto [d1, r1] = points[i];
      const auto [d2, r2] = points[j];
      if (d1 > budget || d2 <= budget || d2 - d1 < 1e-12) continue;
      const double t = (budget - d1) / (d2 - d1);
      bounds.upper = std::min(bounds.upper, r1 + t * (r2 - r1));
    }
  bounds.lower = std::max(bounds.lower, 0.0);
  return bounds;
}

// Exhaustive minimization of I(X; Zhat) for a binary source under the
// erasure distortion: the only admissible channels send x to its own point
// mass or to the erasure symbol.
inline double erasure_rd_bruteforce_binary(const std::vector<double>& px,
                                           double budget) {
  double best = mtsc::infinity();
  for (int ia = 0; ia <= 100; ++ia)
    for (int ib = 0; ib <= 100; ++ib) {
      const double alpha = double(ia) / 100.0;
      const double beta = double(ib) / 100.0;
      if (px[0] * alpha + px[1] * beta > budget + 1e-12) continue;
      // z in {point0, point1, erase}
      const double w[2][3] = {{1.0 - alpha, 0.0, alpha},
                              {0.0, 1.0 - beta, beta}};
      double pz[3] = {0.0, 0.0, 0.0};
      for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 3; ++z) pz[z] += px[std::size_t(x)] * w[x][z];
      double mi = 0.0;
      for (int x = 0; x < 2; ++x)
        for (int z = 0; z < 3; ++z)
          if (w[x][z] > 0.0 && pz[z] > 0.0)
            mi += px[std::size_t(x)] * w[x][z] * std::log2(w[x][z] / pz[z]);
      best = std::min(best, mi);
    }
  return best;
}

}  // namespace testsup
