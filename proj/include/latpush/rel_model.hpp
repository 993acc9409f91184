#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "latpush/geometry.hpp"
#include "latpush/physics.hpp"
#include "latpush/rng.hpp"

namespace latpush {

// Hand-relative discretization. 1 cm cells over a 20 cm x 44 cm window around
// the hand, with extra room ahead of the fingertips so contact and retreat
// both stay modeled.
struct RelGrid {
  double x_min = -0.04;
  double y_min = -0.22;
  double resolution = 0.01;
  int nx = 20;
  int ny = 44;

  double x_max() const { return x_min + nx * resolution; }
  double y_max() const { return y_min + ny * resolution; }
  int cell_count() const { return nx * ny; }
  int out_cell() const { return nx * ny; }    // distinguished absorbing cell
  int state_count() const { return nx * ny + 1; }

  int id(int ix, int iy) const { return ix * ny + iy; }
  int ix_of(int id) const { return id / ny; }
  int iy_of(int id) const { return id % ny; }

  Vec2 center(int id) const {
    return {x_min + (ix_of(id) + 0.5) * resolution, y_min + (iy_of(id) + 0.5) * resolution};
  }

  // cell containing (x, y), or OUT
  int cell_of(double x, double y) const {
    const int ix = int(std::floor((x - x_min) / resolution));
    const int iy = int(std::floor((y - y_min) / resolution));
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return out_cell();
    return id(ix, iy);
  }
};

// Eight 1 cm end-effector translations, closed under negation so the lattice
// is an undirected graph. Diagonals move one cell along each axis.
struct ActionSet {
  std::vector<Vec2> displacements;

  int size() const { return int(displacements.size()); }
  const Vec2& delta(int a) const { return displacements[a]; }

  int negation(int a) const {
    const Vec2 want = -displacements[a];
    for (int i = 0; i < size(); ++i)
      if (std::abs(displacements[i].x - want.x) < 1e-12 &&
          std::abs(displacements[i].y - want.y) < 1e-12)
        return i;
    return -1;
  }
};

inline ActionSet default_actions(double res = 0.01) {
  ActionSet as;
  as.displacements = {{res, 0.0},  {0.0, res}, {0.0, -res}, {-res, 0.0},
                      {res, res},  {res, -res}, {-res, res}, {-res, -res}};
  return as;
}

// Goal rectangle in the hand frame, edges aligned to grid lines.
struct GoalSpec {
  double cx = 0.05;
  double half_x = 0.03;  // 6 cm along x
  double half_y = 0.02;  // 4 cm along y

  bool contains(const Vec2& p) const {
    return p.x >= cx - half_x && p.x <= cx + half_x && p.y >= -half_y && p.y <= half_y;
  }
};

struct InitialBeliefSpec {
  double mean_x = 0.08;
  double std_x = 0.005;
  double std_y = 0.10;
};

constexpr int kNumObs = 4;  // two binary contact sensors

// Discretized Rel-POMDP: sparse transition rows, dense observation rows and
// the state reward table. Rows are normalized and sorted in canonical state
// order (ix-major, OUT last).
struct DiscreteModel {
  RelGrid grid;
  ActionSet actions;
  GoalSpec goal;
  double gamma = 0.99;

  std::vector<std::uint32_t> t_off;   // (S*A + 1) CSR offsets
  std::vector<std::uint32_t> t_dest;
  std::vector<double> t_prob;
  std::vector<double> omega;          // S*A*4 dense, p(o | s', a)
  std::vector<double> reward;         // S, in {-1, 0}

  int states() const { return grid.state_count(); }

  struct Row {
    const std::uint32_t* dest;
    const double* prob;
    int n;
  };

  Row t_row(int s, int a) const {
    const std::size_t r = std::size_t(s) * actions.size() + a;
    return {t_dest.data() + t_off[r], t_prob.data() + t_off[r], int(t_off[r + 1] - t_off[r])};
  }

  const double* omega_row(int s, int a) const {
    return omega.data() + (std::size_t(s) * actions.size() + a) * kNumObs;
  }
};

using Belief = std::vector<double>;

struct ImpossibleObservation : std::runtime_error {
  ImpossibleObservation() : std::runtime_error("belief update: observation has zero likelihood") {}
};

// Determinized randomness: an initial state plus a lazily materialized stream
// of uniforms. Two uniforms are consumed per timestep.
struct Scenario {
  int s0 = 0;
  UniformStream psi;

  Scenario() = default;
  Scenario(int s0_, std::uint64_t seed) : s0(s0_), psi(seed) {}
};

namespace detail {

inline int inverse_cdf(const double* prob, const std::uint32_t* dest, int n, double u) {
  double c = 0.0;
  for (int i = 0; i < n; ++i) {
    c += prob[i];
    if (u < c) return int(dest[i]);
  }
  return int(dest[n - 1]);
}

inline int inverse_cdf_dense(const double* prob, int n, double u) {
  double c = 0.0;
  for (int i = 0; i < n; ++i) {
    c += prob[i];
    if (u < c) return i;
  }
  return n - 1;
}

}  // namespace detail

// s' by inverse CDF over T(s,a,.) using the first uniform, o by inverse CDF
// over Omega(s',a,.) using the second, r = R(s).
struct ScenarioStep {
  int next;
  int obs;
  double reward;
};

inline ScenarioStep step_scenario(const DiscreteModel& m, int s, int a, double u1, double u2) {
  const auto row = m.t_row(s, a);
  const int next = detail::inverse_cdf(row.prob, row.dest, row.n, u1);
  const int obs = detail::inverse_cdf_dense(m.omega_row(next, a), kNumObs, u2);
  return {next, obs, m.reward[s]};
}

inline Belief belief_update(const DiscreteModel& m, const Belief& b, int a, int o) {
  const int S = m.states();
  Belief next(S, 0.0);
  for (int s = 0; s < S; ++s) {
    const double bs = b[s];
    if (bs <= 0.0) continue;
    const auto row = m.t_row(s, a);
    for (int i = 0; i < row.n; ++i) next[row.dest[i]] += bs * row.prob[i];
  }
  double norm = 0.0;
  for (int s = 0; s < S; ++s) {
    next[s] *= m.omega_row(s, a)[o];
    norm += next[s];
  }
  if (norm <= 0.0) throw ImpossibleObservation();
  for (auto& v : next) v /= norm;
  return next;
}

// Gaussian measure of each cell rectangle; mass outside the window goes to OUT.
inline Belief discretize_initial_belief(const InitialBeliefSpec& spec, const RelGrid& grid) {
  Belief b(grid.state_count(), 0.0);
  std::vector<double> cdf_x(grid.nx + 1), cdf_y(grid.ny + 1);
  for (int i = 0; i <= grid.nx; ++i)
    cdf_x[i] = gaussian_cdf(grid.x_min + i * grid.resolution, spec.mean_x, spec.std_x);
  for (int j = 0; j <= grid.ny; ++j)
    cdf_y[j] = gaussian_cdf(grid.y_min + j * grid.resolution, 0.0, spec.std_y);
  double total = 0.0;
  for (int ix = 0; ix < grid.nx; ++ix)
    for (int iy = 0; iy < grid.ny; ++iy) {
      const double mass = (cdf_x[ix + 1] - cdf_x[ix]) * (cdf_y[iy + 1] - cdf_y[iy]);
      b[grid.id(ix, iy)] = mass;
      total += mass;
    }
  b[grid.out_cell()] = std::max(0.0, 1.0 - total);
  const double norm = std::accumulate(b.begin(), b.end(), 0.0);
  for (auto& v : b) v /= norm;
  return b;
}

// True iff a disc anywhere in the cell stays clear of every hand polygon
// (by contact_eps) throughout the swept action. For such cells the discrete
// transition is an exact frame shift and no contact can be sensed.
inline bool cell_action_noncontact(const RelGrid& grid, int cell, const Vec2& delta,
                                   const HandGeometry& hand, const PhysicsParams& params) {
  const Vec2 c = grid.center(cell);
  const double clearance =
      params.disc_radius + params.contact_eps + grid.resolution * 0.70710678118654752440 + 1e-9;
  for (int i = 0; i < HandGeometry::kSolids; ++i) {
    const Polygon swept = swept_polygon(hand.solid(i), delta);
    if (polygon_distance(swept, c) < clearance) return false;
  }
  return true;
}

struct ModelBuildParams {
  int n_samples = 1024;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

namespace detail {

struct RowAccum {
  std::vector<std::pair<std::uint32_t, double>> t;  // sorted (dest, prob)
};

// Stratified in-cell offsets: an m x m jittered grid when n is a square,
// plain uniforms otherwise. Keeps the uniform marginal, cuts estimator noise.
inline Vec2 cell_offset(Rng& rng, int k, int n, int m) {
  if (m * m == n) {
    const int gx = k % m, gy = k / m;
    return {(gx + rng.uniform()) / m, (gy + rng.uniform()) / m};
  }
  return {rng.uniform(), rng.uniform()};
}

}  // namespace detail

// Monte-Carlo expectation of the continuous push physics over each (cell,
// action) pair, with the hand held at the origin. Deterministic given the
// seed and independent of iteration order.
inline DiscreteModel build_discrete_model(const PhysicsParams& params, const HandGeometry& hand,
                                          const RelGrid& grid, const ActionSet& actions,
                                          const GoalSpec& goal, const ModelBuildParams& bp) {
  const int S = grid.state_count();
  const int A = actions.size();
  const int OUT = grid.out_cell();
  const int n = std::max(1, bp.n_samples);
  const int m = int(std::lround(std::sqrt(double(n))));

  std::vector<detail::RowAccum> rows(std::size_t(S) * A);

  // omega counts are keyed by destination and merged after the parallel
  // section so the result does not depend on source iteration order
  struct Outcome {
    std::uint32_t dest;
    std::uint8_t obs;
  };

  const int cells = grid.cell_count();
  std::vector<std::vector<Outcome>> outcomes(std::size_t(cells) * A);

  auto build_row = [&](int cell, int a) {
    const std::size_t r = std::size_t(cell) * A + a;
    const Vec2 delta = actions.delta(a);
    if (cell_action_noncontact(grid, cell, delta, hand, params)) {
      const Vec2 shifted = grid.center(cell) - delta;
      const int dest = grid.cell_of(shifted.x, shifted.y);
      rows[r].t = {{std::uint32_t(dest), 1.0}};
      return;
    }
    Rng rng(derive_seed(bp.seed, std::uint64_t(cell), std::uint64_t(a), 0x6d6f64656cULL));
    const int ix = grid.ix_of(cell), iy = grid.iy_of(cell);
    const double x0 = grid.x_min + ix * grid.resolution;
    const double y0 = grid.y_min + iy * grid.resolution;
    std::vector<std::uint32_t> counts(std::size_t(S), 0);
    auto& outs = outcomes[r];
    outs.reserve(n);
    for (int k = 0; k < n; ++k) {
      const Vec2 off = detail::cell_offset(rng, k, n, m);
      const Vec2 start{x0 + off.x * grid.resolution, y0 + off.y * grid.resolution};
      const NoiseSample noise = sample_noise(params, rng);
      const auto [world, contacts] = step(Pose2::identity(), delta, start, noise, hand, params);
      const Vec2 rel = world - delta;
      const int dest = grid.cell_of(rel.x, rel.y);
      const int obs = (contacts.left ? 1 : 0) | (contacts.right ? 2 : 0);
      counts[dest]++;
      outs.push_back({std::uint32_t(dest), std::uint8_t(obs)});
    }
    for (int s = 0; s < S; ++s)
      if (counts[s] > 0) rows[r].t.push_back({std::uint32_t(s), double(counts[s]) / n});
  };

  {
    const int nthreads = bp.threads > 0 ? bp.threads
                                        : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::size_t total = std::size_t(cells) * A;
    std::size_t chunk = (total + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const std::size_t lo = t * chunk, hi = std::min(total, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) build_row(int(i / A), int(i % A));
      });
    }
    for (auto& th : pool) th.join();
  }

  DiscreteModel model;
  model.grid = grid;
  model.actions = actions;
  model.goal = goal;

  // OUT is absorbing
  for (int a = 0; a < A; ++a) rows[std::size_t(OUT) * A + a].t = {{std::uint32_t(OUT), 1.0}};

  model.t_off.assign(std::size_t(S) * A + 1, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) model.t_off[r + 1] = model.t_off[r] + rows[r].t.size();
  model.t_dest.resize(model.t_off.back());
  model.t_prob.resize(model.t_off.back());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t i = 0; i < rows[r].t.size(); ++i) {
      model.t_dest[model.t_off[r] + i] = rows[r].t[i].first;
      model.t_prob[model.t_off[r] + i] = rows[r].t[i].second;
    }

  // observation rows from the sensed outcomes, aggregated over source cells
  std::vector<std::array<std::uint64_t, kNumObs>> oc(std::size_t(S) * A, {0, 0, 0, 0});
  for (int cell = 0; cell < cells; ++cell)
    for (int a = 0; a < A; ++a)
      for (const auto& out : outcomes[std::size_t(cell) * A + a]) oc[std::size_t(out.dest) * A + a][out.obs]++;

  model.omega.assign(std::size_t(S) * A * kNumObs, 0.0);
  for (int s = 0; s < S; ++s)
    for (int a = 0; a < A; ++a) {
      double* row = model.omega.data() + (std::size_t(s) * A + a) * kNumObs;
      const auto& c = oc[std::size_t(s) * A + a];
      const std::uint64_t tot = c[0] + c[1] + c[2] + c[3];
      if (tot > 0) {
        for (int o = 0; o < kNumObs; ++o) row[o] = double(c[o]) / double(tot);
      } else if (s == OUT) {
        row[0] = 1.0;  // outside the window nothing can touch a sensor
      } else {
        // no sampled arrivals: uniform-in-cell expectation of the sensor bits
        const int ix = grid.ix_of(s), iy = grid.iy_of(s);
        const double x0 = grid.x_min + ix * grid.resolution;
        const double y0 = grid.y_min + iy * grid.resolution;
        constexpr int kSub = 8;
        int hist[kNumObs] = {0, 0, 0, 0};
        for (int i = 0; i < kSub; ++i)
          for (int j = 0; j < kSub; ++j) {
            const Vec2 p{x0 + (i + 0.5) * grid.resolution / kSub,
                         y0 + (j + 0.5) * grid.resolution / kSub};
            hist[sense(p, Pose2::identity(), hand, params)]++;
          }
        for (int o = 0; o < kNumObs; ++o) row[o] = double(hist[o]) / (kSub * kSub);
      }
    }

  model.reward.assign(S, -1.0);
  for (int s = 0; s < cells; ++s)
    if (goal.contains(grid.center(s))) model.reward[s] = 0.0;

  return model;
}

// ---------------------------------------------------------------------------
// model cache

inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Cache key over everything the tables depend on.
inline std::uint64_t model_cache_key(const PhysicsParams& params, const HandGeometry& hand,
                                     const RelGrid& grid, const ActionSet& actions,
                                     const GoalSpec& goal, int n_samples, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* d, std::size_t n) { h = fnv1a(d, n, h); };
  const double pp[] = {params.mu_mean, params.mu_std,      params.slip_gain, params.pressure_std,
                       params.contact_eps, params.substep, params.disc_radius};
  mix(pp, sizeof(pp));
  const double gg[] = {grid.x_min, grid.y_min, grid.resolution, double(grid.nx), double(grid.ny)};
  mix(gg, sizeof(gg));
  for (const auto& d : actions.displacements) mix(&d, sizeof(d));
  const double go[] = {goal.cx, goal.half_x, goal.half_y};
  mix(go, sizeof(go));
  for (int i = 0; i < HandGeometry::kSolids; ++i)
    for (const auto& v : hand.solid(i).vertices) mix(&v, sizeof(v));
  for (const auto& v : hand.sensor_left.vertices) mix(&v, sizeof(v));
  for (const auto& v : hand.sensor_right.vertices) mix(&v, sizeof(v));
  const std::uint64_t tail[] = {std::uint64_t(n_samples), seed};
  mix(tail, sizeof(tail));
  return h;
}

constexpr std::uint32_t kModelCacheMagic = 0x4c504d43;  // "LPMC"
constexpr std::uint32_t kModelCacheVersion = 1;

inline bool save_model(const DiscreteModel& m, const std::string& path, std::uint64_t key) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  auto w = [&f](const void* d, std::size_t n) { f.write(static_cast<const char*>(d), n); };
  w(&kModelCacheMagic, 4);
  w(&kModelCacheVersion, 4);
  w(&key, 8);
  const double gg[] = {m.grid.x_min, m.grid.y_min, m.grid.resolution};
  w(gg, sizeof(gg));
  const std::int32_t dims[] = {m.grid.nx, m.grid.ny, m.actions.size()};
  w(dims, sizeof(dims));
  for (const auto& d : m.actions.displacements) w(&d, sizeof(d));
  const double go[] = {m.goal.cx, m.goal.half_x, m.goal.half_y, m.gamma};
  w(go, sizeof(go));
  auto wv = [&](const auto& v) {
    const std::uint64_t n = v.size();
    w(&n, 8);
    w(v.data(), n * sizeof(v[0]));
  };
  wv(m.t_off);
  wv(m.t_dest);
  wv(m.t_prob);
  wv(m.omega);
  wv(m.reward);
  return bool(f);
}

inline std::optional<DiscreteModel> load_model(const std::string& path, std::uint64_t expected_key) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  auto r = [&f](void* d, std::size_t n) { f.read(static_cast<char*>(d), n); };
  std::uint32_t magic = 0, version = 0;
  std::uint64_t key = 0;
  r(&magic, 4);
  r(&version, 4);
  r(&key, 8);
  if (!f || magic != kModelCacheMagic || version != kModelCacheVersion || key != expected_key)
    return std::nullopt;
  DiscreteModel m;
  double gg[3];
  r(gg, sizeof(gg));
  m.grid.x_min = gg[0];
  m.grid.y_min = gg[1];
  m.grid.resolution = gg[2];
  std::int32_t dims[3];
  r(dims, sizeof(dims));
  m.grid.nx = dims[0];
  m.grid.ny = dims[1];
  m.actions.displacements.resize(dims[2]);
  for (auto& d : m.actions.displacements) r(&d, sizeof(d));
  double go[4];
  r(go, sizeof(go));
  m.goal.cx = go[0];
  m.goal.half_x = go[1];
  m.goal.half_y = go[2];
  m.gamma = go[3];
  auto rv = [&](auto& v) {
    std::uint64_t n = 0;
    r(&n, 8);
    v.resize(n);
    r(v.data(), n * sizeof(v[0]));
  };
  rv(m.t_off);
  rv(m.t_dest);
  rv(m.t_prob);
  rv(m.omega);
  rv(m.reward);
  if (!f) return std::nullopt;
  return m;
}

}  // namespace latpush
