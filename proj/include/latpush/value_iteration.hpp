#pragma once

#include <vector>

#include "latpush/rel_model.hpp"

namespace latpush {

// MDP value function of the discretized Rel-POMDP; the QMDP policy and the
// Rel upper bound are both read off these tables.
struct VISolution {
  std::vector<double> v;       // per state
  std::vector<double> q;       // per (state, action)
  std::vector<int> greedy;     // argmax_a Q(s, a), ties to lowest index
  double gamma = 0.99;
  double residual = 0.0;       // sup-norm Bellman residual of v

  double q_at(int s, int a, int A) const { return q[std::size_t(s) * A + a]; }
};

inline VISolution value_iteration(const DiscreteModel& m, double tol = 1e-6) {
  const int S = m.states();
  const int A = m.actions.size();
  const double gamma = m.gamma;

  // pessimistic init keeps absorbing -1 states at their fixed point exactly
  std::vector<double> v(S, -1.0 / (1.0 - gamma));
  std::vector<double> next(S, 0.0);

  double delta = 0.0;
  for (int iter = 0; iter < 100000; ++iter) {
    delta = 0.0;
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        const auto row = m.t_row(s, a);
        double ev = 0.0;
        for (int i = 0; i < row.n; ++i) ev += row.prob[i] * v[row.dest[i]];
        best = std::max(best, m.reward[s] + gamma * ev);
      }
      next[s] = best;
      delta = std::max(delta, std::abs(next[s] - v[s]));
    }
    v.swap(next);
    if (delta < tol * 1e-3) break;
  }

  VISolution out;
  out.gamma = gamma;
  out.v.assign(S, 0.0);
  out.q.assign(std::size_t(S) * A, 0.0);
  out.greedy.assign(S, 0);
  out.residual = 0.0;
  for (int s = 0; s < S; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    int best_a = 0;
    for (int a = 0; a < A; ++a) {
      const auto row = m.t_row(s, a);
      double ev = 0.0;
      for (int i = 0; i < row.n; ++i) ev += row.prob[i] * v[row.dest[i]];
      const double q = m.reward[s] + gamma * ev;
      out.q[std::size_t(s) * A + a] = q;
      if (q > best) {
        best = q;
        best_a = a;
      }
    }
    out.v[s] = best;
    out.greedy[s] = best_a;
    out.residual = std::max(out.residual, std::abs(best - v[s]));
  }
  return out;
}

// argmax_a sum_s b(s) Q(s, a); ties broken by lowest action index
inline int qmdp_act(const VISolution& vi, const Belief& b) {
  const int S = int(b.size());
  const int A = int(vi.q.size() / vi.v.size());
  int best_a = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < A; ++a) {
    double sum = 0.0;
    for (int s = 0; s < S; ++s)
      if (b[s] > 0.0) sum += b[s] * vi.q[std::size_t(s) * A + a];
    if (sum > best + 1e-15) {
      best = sum;
      best_a = a;
    }
  }
  return best_a;
}

inline double rel_upper_bound(const VISolution& vi, const Belief& b) {
  double sum = 0.0;
  for (std::size_t s = 0; s < b.size(); ++s)
    if (b[s] > 0.0) sum += b[s] * vi.v[s];
  return sum;
}

}  // namespace latpush
