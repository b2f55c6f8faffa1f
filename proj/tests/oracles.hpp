#pragma once

// Independent reference computations for the test suite: plain grid search
// with local refinement, closed-form equioscillation data, and brute-force
// minimax for the weighted extremal problem. Deliberately avoids the
// library's own maximization and solving code so the two can disagree.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

/// max of f over [lo, hi]: dense grid, then three rounds of refinement
/// around the best cell. `extra` points (breakpoints of f) are always
/// probed directly.
inline double grid_max(const std::function<double(double)>& f, double lo,
                       double hi, int cells = 2000,
                       const std::vector<double>& extra = {}) {
  double best = -std::numeric_limits<double>::infinity();
  double best_t = lo;
  auto probe = [&](double t) {
    const double v = f(t);
    if (v > best) {
      best = v;
      best_t = t;
    }
  };
  for (int i = 0; i <= cells; ++i)
    probe(lo + (hi - lo) * i / cells);
  for (double t : extra)
    if (t >= lo && t <= hi) probe(t);
  double width = (hi - lo) / cells;
  for (int round = 0; round < 3; ++round) {
    const double a = std::max(lo, best_t - width);
    const double b = std::min(hi, best_t + width);
    for (int i = 0; i <= 400; ++i) probe(a + (b - a) * i / 400);
    width = (b - a) / 400;
  }
  return best;
}

/// k-th smallest equioscillation node (k = 1..n) for the unweighted product
/// with all multiplicities one, mapped to [0, 1].
inline double chebyshev_node(int n, int k) {
  // descending in the cosine argument; flip so the result is ascending in k
  return (1.0 + std::cos((2.0 * (n - k + 1) - 1.0) * M_PI / (2.0 * n))) / 2.0;
}

/// Common log-level of the interval maxima at the unweighted optimum.
inline double chebyshev_level(int n) { return (1.0 - 2.0 * n) * std::log(2.0); }

/// sup over [a, b] of w(t) * prod |t - nodes_k|^{nu_k}.
inline double sup_weighted_product(const std::function<double(double)>& w,
                                   const std::vector<double>& nu,
                                   const std::vector<double>& nodes, double a,
                                   double b,
                                   const std::vector<double>& breakpoints = {}) {
  auto f = [&](double t) {
    double v = w(t);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      v *= std::pow(std::abs(t - nodes[k]), nu[k]);
    return v;
  };
  return grid_max(f, a, b, 2000, breakpoints);
}

struct BruteMinimax {
  std::vector<double> nodes;
  double value = 0.0;
};

/// Brute-force solution of the two-node weighted extremal problem:
/// coarse sweep over ordered (y1, y2), then shrinking box refinements.
inline BruteMinimax bojanov_minimax_2(const std::function<double(double)>& w,
                                      const std::vector<double>& nu, double a,
                                      double b,
                                      const std::vector<double>& breakpoints = {}) {
  auto objective = [&](double y1, double y2) {
    return sup_weighted_product(w, nu, {y1, y2}, a, b, breakpoints);
  };
  double best = std::numeric_limits<double>::infinity();
  double b1 = a, b2 = b;
  const int coarse = 50;
  for (int i = 1; i < coarse; ++i) {
    for (int j = i + 1; j < coarse; ++j) {
      const double y1 = a + (b - a) * i / coarse;
      const double y2 = a + (b - a) * j / coarse;
      const double v = objective(y1, y2);
      if (v < best) {
        best = v;
        b1 = y1;
        b2 = y2;
      }
    }
  }
  double radius = (b - a) / coarse;
  for (int round = 0; round < 4; ++round) {
    const int m = 12;
    double nb1 = b1, nb2 = b2;
    for (int i = -m; i <= m; ++i) {
      for (int j = -m; j <= m; ++j) {
        const double y1 = b1 + radius * i / m;
        const double y2 = b2 + radius * j / m;
        if (y1 <= a || y2 >= b || y1 >= y2) continue;
        const double v = objective(y1, y2);
        if (v < best) {
          best = v;
          nb1 = y1;
          nb2 = y2;
        }
      }
    }
    b1 = nb1;
    b2 = nb2;
    radius /= 6.0;
  }
  return {{b1, b2}, best};
}

/// Deterministic RNG for the whole suite.
inline std::mt19937_64 make_rng(std::uint64_t salt) {
  return std::mt19937_64(0x5eed2026'0816ULL ^ salt);
}

/// Random strictly increasing nodes in (0, 1) with all gaps (including the
/// boundary gaps) at least `min_gap`.
inline std::vector<double> random_nodes(std::mt19937_64& rng, std::size_t n,
                                        double min_gap) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    std::vector<double> y(n);
    for (auto& v : y) v = u(rng);
    std::sort(y.begin(), y.end());
    double prev = 0.0;
    bool ok = true;
    for (double v : y) {
      if (v - prev < min_gap) ok = false;
      prev = v;
    }
    if (1.0 - prev < min_gap) ok = false;
    if (ok) return y;
  }
}

}  // namespace oracle
