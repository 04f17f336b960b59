#include <doctest.h>

#include <cmath>

#include "grf/baseline_gd.hpp"
#include "grf/rng.hpp"

using namespace grf;

TEST_CASE("flat at the full-speed minimum") {
  const EnergyModel m;
  const GradientParams g;
  LocalView view({5, 5}, 0, 0.5);
  const Vec2 v(0.6, 0.8);
  CHECK((gd_velocity(view, v, m, g) - v).norm() < 1e-5);
}

TEST_CASE("same-type robots beyond the well move toward each other") {
  EnergyModel m;
  m.potential.speed_incentive = false;
  const GradientParams g;
  const double r = 0.4;  // well minimum sits near r0 = 0.22
  LocalView a({1, 1}, 0, 0.5);
  a.add({{r, 0}, {0, 0}, 0, ObservationKind::robot});
  LocalView b({1 + r, 1}, 0, 0.5);
  b.add({{-r, 0}, {0, 0}, 0, ObservationKind::robot});
  const Vec2 va = gd_velocity(a, Vec2::Zero(), m, g);
  const Vec2 vb = gd_velocity(b, Vec2::Zero(), m, g);
  CHECK(va.x() > 0.0);
  CHECK(vb.x() < 0.0);
  CHECK(std::abs(va.y()) < 1e-9);
  // the sign agrees with direct evaluation at perturbed candidates
  CHECK(hamiltonian(a, {0.01, 0}, m) < hamiltonian(a, {-0.01, 0}, m));
}

TEST_CASE("central difference matches a dense secant") {
  const EnergyModel m;
  LocalView view({1, 1}, 0, 0.5);
  view.add({{0.3, 0.1}, {0.2, 0.0}, 0, ObservationKind::robot});
  view.add({{-0.2, 0.25}, {0.0, -0.3}, 1, ObservationKind::robot});
  auto f = [&](const Vec2& v) { return hamiltonian(view, v, m); };
  RandomStream rng(6);
  for (int k = 0; k < 20; ++k) {
    // the speed term has a kink at v = 0, so stay clear of it
    const double speed = 0.3 + 0.6 * rng.uniform();
    const double th = 6.283185307179586 * rng.uniform();
    const Vec2 x(speed * std::cos(th), speed * std::sin(th));
    const Vec2 grad = central_difference_gradient(f, x, 1e-3);
    for (int axis = 0; axis < 2; ++axis) {
      // secant slope of a finely sampled slice
      const double h = 1e-6;
      Vec2 up = x, down = x;
      up[axis] += h;
      down[axis] -= h;
      const double secant = (f(up) - f(down)) / (2 * h);
      CHECK(std::abs(grad[axis] - secant) <= 1e-4 * std::max(1.0, std::abs(secant)));
    }
  }
}

TEST_CASE("non-finite slopes are zeroed") {
  auto f = [](const Vec2& v) { return v.x() > 0 ? std::numeric_limits<double>::infinity() : v.y(); };
  const Vec2 g = central_difference_gradient(f, Vec2(0, 0), 1e-3);
  CHECK(g.x() == 0.0);
  CHECK(g.y() == doctest::Approx(1.0));
}

TEST_CASE("a small step never raises the energy") {
  const EnergyModel m;
  GradientParams g;
  g.step_size = 1e-3;
  RandomStream rng(12);
  for (int k = 0; k < 200; ++k) {
    LocalView view({2, 2}, 0, 0.5);
    const int n = rng.integer(1, 4);
    for (int j = 0; j < n; ++j) {
      const double r = 0.2 + 0.29 * rng.uniform();
      const double th = 6.283185307179586 * rng.uniform();
      view.add({{r * std::cos(th), r * std::sin(th)},
                {0.4 * (rng.uniform() - 0.5), 0.4 * (rng.uniform() - 0.5)},
                rng.integer(0, 1), ObservationKind::robot});
    }
    const Vec2 v(0.5 * (rng.uniform() - 0.5), 0.5 * (rng.uniform() - 0.5));
    CHECK(hamiltonian(view, gd_velocity(view, v, m, g), m) <= hamiltonian(view, v, m) + 1e-12);
  }
}

TEST_CASE("gradient descent is deterministic and bounded") {
  const EnergyModel m;
  GradientParams g;
  g.step_size = 100.0;
  LocalView view({1, 1}, 0, 0.5);
  view.add({{0.1, 0}, {0, 0}, 1, ObservationKind::robot});
  const Vec2 a = gd_velocity(view, {0.1, 0.1}, m, g);
  const Vec2 b = gd_velocity(view, {0.1, 0.1}, m, g);
  CHECK(a == b);
  CHECK(a.norm() <= m.v_max + 1e-15);
}
