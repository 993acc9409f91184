#include <catch2/catch_amalgamated.hpp>

#include "latpush/physics.hpp"

using namespace latpush;

namespace {
const HandGeometry kHand = default_hand();
const PhysicsParams kParams;
}  // namespace

TEST_CASE("sample_noise: degenerate gaussians collapse to the mean") {
  PhysicsParams p;
  p.mu_std = 0.0;
  p.pressure_std = 0.0;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const NoiseSample n = sample_noise(p, rng);
    CHECK(n.mu == kParams.mu_mean);
    CHECK(n.pressure_offset == 0.0);
  }
}

TEST_CASE("sample_noise: sample mean within 3 sigma / sqrt(n)") {
  Rng rng(17);
  const int n = 100000;
  double sum_mu = 0.0, sum_p = 0.0;
  for (int i = 0; i < n; ++i) {
    const NoiseSample s = sample_noise(kParams, rng);
    sum_mu += s.mu;
    sum_p += s.pressure_offset;
    CHECK(s.mu >= 0.01);
  }
  CHECK(std::abs(sum_mu / n - kParams.mu_mean) < 3.0 * kParams.mu_std / std::sqrt(double(n)));
  CHECK(std::abs(sum_p / n) < 3.0 * kParams.pressure_std / std::sqrt(double(n)));
}

TEST_CASE("sample_noise: fixed seed reproduces the sequence") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    const NoiseSample na = sample_noise(kParams, a);
    const NoiseSample nb = sample_noise(kParams, b);
    CHECK(na.mu == nb.mu);
    CHECK(na.pressure_offset == nb.pressure_offset);
  }
}

TEST_CASE("step: no contact means the object does not move at all") {
  const Vec2 start{0.18, 0.0};  // 10 cm ahead of the fingertips
  const auto [pos, contacts] = step(Pose2::identity(), {0.01, 0.0}, start,
                                    {kParams.mu_mean, 0.0}, kHand, kParams);
  CHECK(pos.x == start.x);
  CHECK(pos.y == start.y);
  CHECK_FALSE(contacts.left);
  CHECK_FALSE(contacts.right);
  CHECK_FALSE(contacts.palm);
}

TEST_CASE("step: lateral offset beyond the hand never makes contact") {
  const Vec2 start{0.03, 0.15};
  const auto [pos, contacts] = step(Pose2::identity(), {0.01, 0.0}, start,
                                    {kParams.mu_mean, 0.0}, kHand, kParams);
  CHECK(pos.x == start.x);
  CHECK(pos.y == start.y);
  CHECK_FALSE(contacts.palm);
}

TEST_CASE("step: flush palm push carries the disc with the hand") {
  const Vec2 start{kParams.disc_radius, 0.0};  // touching the palm face dead-center
  const auto [pos, contacts] = step(Pose2::identity(), {0.01, 0.0}, start,
                                    {kParams.mu_mean, 0.0}, kHand, kParams);
  CHECK(pos.x == Catch::Approx(start.x + 0.01).margin(1e-9));
  CHECK(pos.y == Catch::Approx(0.0).margin(1e-12));
  CHECK(contacts.palm);

  // fine-substep oracle: 0.1 mm substeps accumulate the same displacement
  PhysicsParams fine = kParams;
  fine.substep = 1e-4;
  const auto [oracle, oc] = step(Pose2::identity(), {0.01, 0.0}, start,
                                 {kParams.mu_mean, 0.0}, kHand, fine);
  CHECK(oc.palm);
  CHECK(std::abs(pos.x - oracle.x) < 1e-4);
  CHECK(std::abs(pos.y - oracle.y) < 1e-4);
}

TEST_CASE("step: zero-noise flush pushes move the disc by the normal component") {
  struct Case {
    Vec2 start;
    Vec2 delta;
    Vec2 expected_move;
  };
  // palm face push, and a lateral drag along the left finger outer face
  const std::vector<Case> cases = {
      {{0.03, 0.0}, {0.01, 0.0}, {0.01, 0.0}},
      {{0.04, 0.09}, {0.0, 0.01}, {0.0, 0.01}},
      {{0.04, -0.09}, {0.0, -0.01}, {0.0, -0.01}},
  };
  for (const auto& c : cases) {
    PhysicsParams fine = kParams;
    fine.substep = 1e-4;
    const auto [pos, contacts] = step(Pose2::identity(), c.delta, c.start,
                                      {kParams.mu_mean, 0.0}, kHand, kParams);
    const auto [oracle, oc] = step(Pose2::identity(), c.delta, c.start,
                                   {kParams.mu_mean, 0.0}, kHand, fine);
    CHECK(std::abs(pos.x - (c.start.x + c.expected_move.x)) < 1e-4);
    CHECK(std::abs(pos.y - (c.start.y + c.expected_move.y)) < 1e-4);
    CHECK(std::abs(pos.x - oracle.x) < 1e-4);
    CHECK(std::abs(pos.y - oracle.y) < 1e-4);
    (void)contacts;
    (void)oc;
  }
}

TEST_CASE("step: non-penetration and determinism under random pushes") {
  Rng rng(31);
  for (int i = 0; i < 2000; ++i) {
    const Vec2 start{rng.uniform(-0.05, 0.17), rng.uniform(-0.2, 0.2)};
    const double ang = rng.uniform(-kPi, kPi);
    const Vec2 delta{0.01 * std::cos(ang), 0.01 * std::sin(ang)};
    Rng noise_rng(derive_seed(31, i));
    const NoiseSample noise = sample_noise(kParams, noise_rng);

    const auto [pos1, c1] = step(Pose2::identity(), delta, start, noise, kHand, kParams);
    const auto [pos2, c2] = step(Pose2::identity(), delta, start, noise, kHand, kParams);
    CHECK(pos1.x == pos2.x);
    CHECK(pos1.y == pos2.y);
    CHECK(c1.left == c2.left);
    CHECK(c1.right == c2.right);

    const Vec2 local = invert(Pose2(delta.x, delta.y, 0.0)).apply(pos1);
    for (int s = 0; s < HandGeometry::kSolids; ++s) {
      const auto pen = disc_polygon_penetration(Disc{local, kParams.disc_radius}, kHand.solid(s));
      if (pen) CHECK(pen->depth <= 1e-6);
    }
  }
}

TEST_CASE("sense: sensor bits") {
  // touching the left sensor only (just above the left finger tip region)
  const double r = kParams.disc_radius;
  CHECK(sense({0.065, 0.06 + r + 0.0005}, Pose2::identity(), kHand, kParams) == 1);
  CHECK(sense({0.065, -0.06 - r - 0.0005}, Pose2::identity(), kHand, kParams) == 2);
  CHECK(sense({1.0, 0.0}, Pose2::identity(), kHand, kParams) == 0);

  // a wide disc wedged symmetrically in the channel touches both sensors
  PhysicsParams wide = kParams;
  wide.disc_radius = 0.04;
  CHECK(sense({0.065, 0.0}, Pose2::identity(), kHand, wide) == 3);
}

TEST_CASE("sense: respects the hand pose") {
  const Pose2 hand(0.5, -0.2, 0.0);
  const double r = kParams.disc_radius;
  const Vec2 world = hand.apply({0.065, 0.06 + r});
  CHECK(sense(world, hand, kHand, kParams) == 1);
}
