#include "mtsc/region_xd.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mtsc/rng.hpp"

namespace mtsc {

namespace {

struct Problem {
  const JointPmf* p;
  int m, l, k;
  std::vector<double> py;          // p(y)
  std::vector<double> pxgy;       // p(x|y), y-major
  double hy, hx, hxy;             // H(Y), H(X), H(X|Y)
};

Problem make_problem(const JointPmf& p) {
  Problem pr;
  pr.p = &p;
  pr.m = p.m();
  pr.l = p.l();
  pr.k = p.l() + 2;
  const Dist py = p.marginal_y();
  pr.py.assign(py.values().begin(), py.values().end());
  pr.pxgy.assign(std::size_t(pr.l) * pr.m, 0.0);
  for (int y = 0; y < pr.l; ++y) {
    if (pr.py[std::size_t(y)] <= 0.0) continue;
    for (int x = 0; x < pr.m; ++x)
      pr.pxgy[std::size_t(y) * pr.m + x] = p(x, y) / pr.py[std::size_t(y)];
  }
  pr.hy = entropy(py);
  pr.hx = entropy(p.marginal_x());
  pr.hxy = conditional_entropy(p, Axis::Y);
  return pr;
}

struct Eval {
  double rate = 0.0;  // I(Y;U)
  double hxu = 0.0;   // H(X|U)
};

// Exact I(Y;U) and H(X|U) for a channel against the source pmf.
Eval evaluate(const Problem& pr, const std::vector<double>& ch) {
  std::vector<double> pu(std::size_t(pr.k), 0.0);
  std::vector<double> pxu(std::size_t(pr.m) * pr.k, 0.0);
  for (int y = 0; y < pr.l; ++y) {
    const double w = pr.py[std::size_t(y)];
    if (w <= 0.0) continue;
    for (int u = 0; u < pr.k; ++u) {
      const double c = ch[std::size_t(y) * pr.k + u];
      if (c <= 0.0) continue;
      pu[std::size_t(u)] += w * c;
      for (int x = 0; x < pr.m; ++x)
        pxu[std::size_t(x) * pr.k + u] += (*pr.p)(x, y) * c;
    }
  }
  Eval e;
  for (int y = 0; y < pr.l; ++y) {
    const double w = pr.py[std::size_t(y)];
    if (w <= 0.0) continue;
    for (int u = 0; u < pr.k; ++u) {
      const double c = ch[std::size_t(y) * pr.k + u];
      if (c > 0.0 && pu[std::size_t(u)] > 0.0)
        e.rate += w * c * std::log2(c / pu[std::size_t(u)]);
    }
  }
  for (int u = 0; u < pr.k; ++u) {
    if (pu[std::size_t(u)] <= 0.0) continue;
    for (int x = 0; x < pr.m; ++x) {
      const double j = pxu[std::size_t(x) * pr.k + u];
      if (j > 0.0) e.hxu -= j * std::log2(j / pu[std::size_t(u)]);
    }
  }
  e.rate = std::max(e.rate, 0.0);
  e.hxu = std::max(e.hxu, 0.0);
  return e;
}

struct Candidate {
  Eval eval;
  std::vector<double> ch;
  bool converged = true;
};

// Alternating minimization of H(X|U) + lambda I(Y;U): posterior step, then
// the exponential tilting of each row toward low cross-entropy of p(x|y)
// against p(x|u).
Candidate ib_fixed_point(const Problem& pr, double lambda,
                         std::vector<double> ch, const XdOptions& opts) {
  std::vector<double> pu(static_cast<std::size_t>(pr.k));
  std::vector<double> pxgu(std::size_t(pr.k) * pr.m);
  std::vector<double> logw(static_cast<std::size_t>(pr.k));
  bool converged = false;
  for (int it = 0; it < opts.max_iters; ++it) {
    std::fill(pu.begin(), pu.end(), 0.0);
    std::fill(pxgu.begin(), pxgu.end(), 0.0);
    for (int y = 0; y < pr.l; ++y) {
      const double w = pr.py[std::size_t(y)];
      for (int u = 0; u < pr.k; ++u) {
        const double c = w * ch[std::size_t(y) * pr.k + u];
        pu[std::size_t(u)] += c;
        for (int x = 0; x < pr.m; ++x)
          pxgu[std::size_t(u) * pr.m + x] +=
              c * pr.pxgy[std::size_t(y) * pr.m + x];
      }
    }
    for (int u = 0; u < pr.k; ++u) {
      if (pu[std::size_t(u)] <= 0.0) continue;
      for (int x = 0; x < pr.m; ++x)
        pxgu[std::size_t(u) * pr.m + x] /= pu[std::size_t(u)];
    }

    double delta = 0.0;
    for (int y = 0; y < pr.l; ++y) {
      double best = -infinity();
      for (int u = 0; u < pr.k; ++u) {
        if (pu[std::size_t(u)] <= 0.0) {
          logw[std::size_t(u)] = -infinity();
          continue;
        }
        double cross = 0.0;  // cross-entropy of p(x|y) against p(x|u), bits
        for (int x = 0; x < pr.m; ++x) {
          const double pxy = pr.pxgy[std::size_t(y) * pr.m + x];
          if (pxy > 0.0) cross += pxy * surprisal(pxgu[std::size_t(u) * pr.m + x]);
        }
        logw[std::size_t(u)] = std::log2(pu[std::size_t(u)]) - cross / lambda;
        best = std::max(best, logw[std::size_t(u)]);
      }
      double z = 0.0;
      for (int u = 0; u < pr.k; ++u)
        z += std::isfinite(logw[std::size_t(u)])
                 ? std::exp2(logw[std::size_t(u)] - best)
                 : 0.0;
      for (int u = 0; u < pr.k; ++u) {
        const double next =
            std::isfinite(logw[std::size_t(u)])
                ? std::exp2(logw[std::size_t(u)] - best) / z
                : 0.0;
        delta = std::max(delta,
                         std::abs(next - ch[std::size_t(y) * pr.k + u]));
        ch[std::size_t(y) * pr.k + u] = next;
      }
    }
    if (delta < opts.conv_tol) {
      converged = true;
      break;
    }
  }
  Candidate c;
  c.eval = evaluate(pr, ch);
  c.ch = std::move(ch);
  c.converged = converged;
  return c;
}

std::vector<double> constant_channel(const Problem& pr) {
  std::vector<double> ch(std::size_t(pr.l) * pr.k, 0.0);
  for (int y = 0; y < pr.l; ++y) ch[std::size_t(y) * pr.k] = 1.0;
  return ch;
}

std::vector<double> identity_channel(const Problem& pr) {
  std::vector<double> ch(std::size_t(pr.l) * pr.k, 0.0);
  for (int y = 0; y < pr.l; ++y) ch[std::size_t(y) * pr.k + y] = 1.0;
  return ch;
}

std::vector<double> random_channel(const Problem& pr, std::mt19937_64& rng) {
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> ch(std::size_t(pr.l) * pr.k);
  for (int y = 0; y < pr.l; ++y) {
    double sum = 0.0;
    for (int u = 0; u < pr.k; ++u) {
      ch[std::size_t(y) * pr.k + u] = exp1(rng);
      sum += ch[std::size_t(y) * pr.k + u];
    }
    for (int u = 0; u < pr.k; ++u) ch[std::size_t(y) * pr.k + u] /= sum;
  }
  return ch;
}

// Multi-start solve at a fixed lambda; all stationary points land in `pool`,
// the index of the best by Lagrangian value is returned.
std::size_t solve_at_lambda(const Problem& pr, double lambda, int restarts,
                            std::uint64_t stream, const XdOptions& opts,
                            std::vector<Candidate>& pool) {
  std::size_t best = pool.size();
  double best_f = infinity();
  auto consider = [&](Candidate cand) {
    const double f = cand.eval.hxu + lambda * cand.eval.rate;
    pool.push_back(std::move(cand));
    if (f < best_f) {
      best_f = f;
      best = pool.size() - 1;
    }
  };
  consider(ib_fixed_point(pr, lambda, constant_channel(pr), opts));
  consider(ib_fixed_point(pr, lambda, identity_channel(pr), opts));
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(splitmix64(opts.seed ^ splitmix64(stream)) +
                        std::uint64_t(r));
    consider(ib_fixed_point(pr, lambda, random_channel(pr, rng), opts));
  }
  return best;
}

// Best feasible candidate under the budget; ties break toward smaller rate.
const Candidate* best_feasible(const std::vector<Candidate>& pool,
                               double budget) {
  const Candidate* best = nullptr;
  for (const Candidate& c : pool) {
    if (c.eval.rate > budget + kProbTol) continue;
    if (!best || c.eval.hxu < best->eval.hxu - 1e-15 ||
        (std::abs(c.eval.hxu - best->eval.hxu) <= 1e-15 &&
         c.eval.rate < best->eval.rate))
      best = &c;
  }
  return best;
}

// Lower hull of (rate, hxu) pairs; returns indices into the pool.
std::vector<std::size_t> lower_hull(const std::vector<Candidate>& pool) {
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pool[a].eval.rate != pool[b].eval.rate)
      return pool[a].eval.rate < pool[b].eval.rate;
    return pool[a].eval.hxu < pool[b].eval.hxu;
  });
  std::vector<std::size_t> hull;
  for (std::size_t idx : order) {
    while (hull.size() >= 2) {
      const auto& a = pool[hull[hull.size() - 2]].eval;
      const auto& b = pool[hull.back()].eval;
      const auto& c = pool[idx].eval;
      const double cross = (b.rate - a.rate) * (c.hxu - a.hxu) -
                           (c.rate - a.rate) * (b.hxu - a.hxu);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    if (!hull.empty() && pool[hull.back()].eval.rate == pool[idx].eval.rate)
      continue;
    hull.push_back(idx);
  }
  return hull;
}

}  // namespace

XdSolution xd_min_hxu(const JointPmf& p, double ry_budget,
                      const XdOptions& opts) {
  if (ry_budget < 0.0)
    throw BudgetOutOfRange("xd_min_hxu: ry_budget must be >= 0");
  if (opts.restarts < 1)
    throw ValidationError("xd_min_hxu: restarts must be >= 1");
  const Problem pr = make_problem(p);
  std::vector<Candidate> pool;

  // Canonical feasible endpoints: constant U (rate 0, H(X)) and U = Y
  // (rate H(Y), H(X|Y)).
  pool.push_back(Candidate{evaluate(pr, constant_channel(pr)),
                           constant_channel(pr), true});
  pool.push_back(Candidate{evaluate(pr, identity_channel(pr)),
                           identity_channel(pr), true});

  // Lambda ladder across the useful range (rate 0 is optimal for lambda >= 1).
  const double lam_lo = 1e-3, lam_hi = 1.25;
  const int ladder = std::max(2, opts.ladder_points);
  const int ladder_restarts = std::max(4, opts.restarts / 4);
  for (int i = 0; i < ladder; ++i) {
    const double t = double(i) / double(ladder - 1);
    const double lam = lam_lo * std::pow(lam_hi / lam_lo, t);
    solve_at_lambda(pr, lam, ladder_restarts, 1000 + std::uint64_t(i), opts,
                    pool);
  }

  // Bisection on lambda toward the rate budget; equal rates push toward the
  // smaller-I(Y;U) side.
  double lo = lam_lo, hi = lam_hi;
  for (int it = 0; it < opts.bisection_iters; ++it) {
    const double mid = std::sqrt(lo * hi);
    const std::size_t best =
        solve_at_lambda(pr, mid, opts.restarts, 2000 + std::uint64_t(it), opts,
                        pool);
    // A rate tie breaks toward the smaller I(Y;U), i.e. the larger lambda.
    if (pool[best].eval.rate >= ry_budget)
      lo = mid;
    else
      hi = mid;
  }

  // Envelope-guided refinement: if the lower convex envelope dips below the
  // best feasible point at the budget, chase the implied slope with extra
  // solves started from the bracketing channels.
  for (int round = 0; round < 2; ++round) {
    const Candidate* best = best_feasible(pool, ry_budget);
    const std::vector<std::size_t> hull = lower_hull(pool);
    const Candidate* left = nullptr;
    const Candidate* right = nullptr;
    for (std::size_t idx : hull) {
      if (pool[idx].eval.rate <= ry_budget + kProbTol) left = &pool[idx];
      if (pool[idx].eval.rate > ry_budget + kProbTol && !right)
        right = &pool[idx];
    }
    if (!best || !left || !right) break;
    const double span = right->eval.rate - left->eval.rate;
    if (span <= 1e-12) break;
    const double interp =
        left->eval.hxu + (right->eval.hxu - left->eval.hxu) *
                             (ry_budget - left->eval.rate) / span;
    if (interp >= best->eval.hxu - 1e-9) break;
    const double lam = std::max(
        1e-4, (left->eval.hxu - right->eval.hxu) / span);
    std::vector<Candidate> extra;
    extra.push_back(ib_fixed_point(pr, lam, left->ch, opts));
    extra.push_back(ib_fixed_point(pr, lam, right->ch, opts));
    solve_at_lambda(pr, lam, opts.restarts, 3000 + std::uint64_t(round), opts,
                    pool);
    for (auto& c : extra) pool.push_back(std::move(c));
  }

  const Candidate* best = best_feasible(pool, ry_budget);
  // The constant channel has rate exactly 0, so a feasible candidate exists.
  XdSolution sol;
  sol.h_x_given_u = best->eval.hxu;
  sol.rate = best->eval.rate;
  sol.channel = AuxChannel{pr.l, pr.k, best->ch};
  sol.converged = best->converged;
  return sol;
}

namespace {

void compositions(int total, int parts, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    compositions(total - v, parts - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<double> xd_grid_oracle_sweep(const JointPmf& p,
                                         std::vector<double> budgets,
                                         double grid_step, int u_count) {
  if (grid_step <= 0.0 || grid_step > 1.0)
    throw ValidationError("xd_grid_oracle: grid_step must lie in (0, 1]");
  if (p.l() > 3)
    throw GridTooLarge("xd_grid_oracle: |Y| must be <= 3");
  const int k = u_count == 0 ? p.l() + 1 : u_count;
  if (k < 1 || k > p.l() + 2)
    throw ValidationError("xd_grid_oracle: u_count must lie in [1, |Y|+2]");
  const int steps = int(std::llround(1.0 / grid_step));

  std::vector<std::vector<int>> rows;
  std::vector<int> cur;
  compositions(steps, k, cur, rows);
  const double total_channels = std::pow(double(rows.size()), double(p.l()));
  if (total_channels > 1e8)
    throw GridTooLarge("xd_grid_oracle: lattice exceeds the 1e8-point guard");

  std::vector<std::size_t> order(budgets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return budgets[a] < budgets[b]; });
  std::vector<double> sorted_budgets;
  for (std::size_t i : order) sorted_budgets.push_back(budgets[i]);

  Problem pr = make_problem(p);
  pr.k = k;  // oracle scans the requested alphabet size

  std::vector<double> best(budgets.size(), infinity());
  std::vector<int> idx(std::size_t(p.l()), 0);
  std::vector<double> ch(std::size_t(p.l()) * k);
  while (true) {
    for (int y = 0; y < p.l(); ++y)
      for (int u = 0; u < k; ++u)
        ch[std::size_t(y) * k + u] =
            double(rows[std::size_t(idx[std::size_t(y)])][std::size_t(u)]) /
            double(steps);
    const Eval e = evaluate(pr, ch);
    // First budget admitting this channel (inclusive at 1e-12).
    const auto it = std::lower_bound(sorted_budgets.begin(),
                                     sorted_budgets.end(), e.rate - 1e-12);
    if (it != sorted_budgets.end()) {
      const std::size_t j = std::size_t(it - sorted_budgets.begin());
      best[j] = std::min(best[j], e.hxu);
    }
    int y = p.l() - 1;
    while (y >= 0 && ++idx[std::size_t(y)] == int(rows.size()))
      idx[std::size_t(y--)] = 0;
    if (y < 0) break;
  }
  // A channel feasible at budget b is feasible at every larger budget.
  for (std::size_t j = 1; j < best.size(); ++j)
    best[j] = std::min(best[j], best[j - 1]);

  std::vector<double> out(budgets.size());
  for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = best[i];
  return out;
}

double xd_grid_oracle(const JointPmf& p, double ry_budget, double grid_step,
                      int u_count) {
  return xd_grid_oracle_sweep(p, {ry_budget}, grid_step, u_count).front();
}

XdVerdict xd_contains(const JointPmf& p, const XdQuery& q,
                      const XdOptions& opts) {
  if (q.rx < -kProbTol || q.ry < -kProbTol || q.dx < -kProbTol)
    return XdVerdict{false, true};
  const XdSolution sol = xd_min_hxu(p, std::max(q.ry, 0.0), opts);
  return XdVerdict{q.rx + q.dx >= sol.h_x_given_u - opts.tol, sol.converged};
}

TradeoffCurve xd_tradeoff_curve(const JointPmf& p, int samples,
                                const XdOptions& opts) {
  if (samples < 2)
    throw ValidationError("xd_tradeoff_curve: samples must be >= 2");
  const double hy = entropy(p.marginal_y());
  std::vector<double> budgets(static_cast<std::size_t>(samples));
  std::vector<double> values(static_cast<std::size_t>(samples));
  TradeoffCurve curve;
  curve.points.resize(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    budgets[std::size_t(i)] = hy * double(i) / double(samples - 1);
    XdSolution sol = xd_min_hxu(p, budgets[std::size_t(i)], opts);
    values[std::size_t(i)] = sol.h_x_given_u;
    curve.points[std::size_t(i)] =
        CurvePoint{budgets[std::size_t(i)], sol.h_x_given_u,
                   std::move(sol.channel)};
  }
  // Post-processing: enforce monotonicity (time-sharing with a smaller
  // budget is always available), then take the lower convex envelope.
  for (std::size_t i = 1; i < values.size(); ++i)
    values[i] = std::min(values[i], values[i - 1]);
  values = lower_convex_envelope(budgets, values);
  for (std::size_t i = 0; i < values.size(); ++i)
    curve.points[i].min_h_x_given_u = values[i];
  return curve;
}

std::vector<double> lower_convex_envelope(const std::vector<double>& xs,
                                          const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    throw LengthMismatch("lower_convex_envelope: size mismatch");
  if (xs.size() < 2) return ys;
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) -
                           (xs[i] - xs[a]) * (ys[b] - ys[a]);
      if (cross <= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  std::vector<double> out(ys.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (seg + 1 < hull.size() && xs[hull[seg + 1]] <= xs[i]) ++seg;
    if (seg + 1 >= hull.size()) {
      out[i] = ys[hull.back()];
      continue;
    }
    const std::size_t a = hull[seg], b = hull[seg + 1];
    const double span = xs[b] - xs[a];
    out[i] = span <= 0.0 ? ys[a]
                         : ys[a] + (ys[b] - ys[a]) * (xs[i] - xs[a]) / span;
  }
  return out;
}

}  // namespace mtsc
