#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tauc/observer.hpp"

#include <cmath>

using namespace tauc;

TEST_CASE("observer gain stability check") {
    CHECK_NOTHROW(ObserverGain(2.0, 20.0));
    CHECK_THROWS_AS(ObserverGain(-1.0, 20.0), std::invalid_argument);
    CHECK_THROWS_AS(ObserverGain(2.0, 0.0), std::invalid_argument);
}

TEST_CASE("observer_step") {
    const ObserverGain gain(2.0, 20.0);

    SUBCASE("dt must be positive") {
        ObserverState s;
        s.z = 1.0;
        CHECK_THROWS_AS(observer_step(s, 0.0, 0.0, std::nullopt, 0.0, gain),
                        std::invalid_argument);
    }
    SUBCASE("measurement equal to the estimate is a pure prediction step") {
        ObserverState s;
        s.z = 3.0;
        s.z_dot = 0.2;
        const double a = -1.0, g = 0.5, dt = 0.01;
        const auto with_meas = observer_step(
            s, dt, a, DepthMeasurement{s.z, s.z_dot}, g, gain);
        const auto without = observer_step(s, dt, a, std::nullopt, g, gain);
        CHECK(with_meas.z == doctest::Approx(without.z).epsilon(1e-15));
        CHECK(with_meas.z_dot == doctest::Approx(without.z_dot).epsilon(1e-15));
        CHECK(with_meas.z == doctest::Approx(3.0 + dt * 0.2));
        CHECK(with_meas.z_dot == doctest::Approx(0.2 + dt * (g - a)));
    }
    SUBCASE("convergence from 50% depth error on constant truth") {
        // truth: Z = 3, Zdot = 0, reading a = g so the input term vanishes
        const double dt = 0.01;
        ObserverState s;
        s.z = 1.5;
        s.z_dot = 0.0;
        const double e0 = std::abs(s.z - 3.0);
        double worst_after_5s = 0;
        for (int k = 0; k < 800; ++k) {
            s = observer_step(s, dt, 9.81, DepthMeasurement{3.0, 0.0}, 9.81, gain);
            if (k * dt >= 5.0)
                worst_after_5s = std::max(worst_after_5s, std::abs(s.z - 3.0));
        }
        CHECK(worst_after_5s < 0.01 * e0);
    }
    SUBCASE("decay rate matches the continuous closed loop within 10%") {
        // dominant continuous eigenvalue is -min(l1, l2) = -2
        const double dt = 0.01;
        ObserverState s;
        s.z = 1.5;
        const double e0 = 1.5;
        double t_measured = 0;
        for (int k = 0; k < 2000; ++k) {
            s = observer_step(s, dt, 9.81, DepthMeasurement{3.0, 0.0}, 9.81, gain);
            t_measured = (k + 1) * dt;
            if (std::abs(s.z - 3.0) < e0 * std::exp(-4.0)) break;
        }
        // e-folding-by-4 time under rate 2 is 2 s
        const double rate = 4.0 / t_measured;
        CHECK(rate == doctest::Approx(gain.slowest_decay()).epsilon(0.10));
    }
    SUBCASE("tracking a ramp with exact measurements stays bounded") {
        const double dt = 0.01;
        ObserverState s;
        s.z = 2.0;
        s.z_dot = 0.0;
        double worst_tail = 0;
        for (int k = 0; k < 1000; ++k) {
            const double t = k * dt;
            const double z_true = 2.0 + 0.3 * t;
            s = observer_step(s, dt, 9.81, DepthMeasurement{z_true, 0.3}, 9.81,
                              gain);
            if (t > 5.0) worst_tail = std::max(worst_tail, std::abs(s.z - (z_true + 0.3 * dt)));
        }
        CHECK(worst_tail < 1e-3);
    }
    SUBCASE("depth crossing zero is a reported failure") {
        ObserverState s;
        s.z = 0.001;
        s.z_dot = -1.0;
        CHECK_THROWS_AS(observer_step(s, 0.01, 0.0, std::nullopt, 0.0, gain),
                        std::runtime_error);
    }
}

TEST_CASE("dead_reckon") {
    ObserverState s;
    s.z = 2.0;
    s.z_dot = 0.1;

    SUBCASE("zero F_z keeps depth") {
        const auto out = dead_reckon(s, 0.0, 0.5);
        CHECK(out.z == doctest::Approx(2.0));
        CHECK(out.z_dot == 0.0);
        CHECK(out.mode == ObserverState::Mode::dead_reckoning);
    }
    SUBCASE("constant F_z = -0.5 for 2 s scales by e^{-1}") {
        ObserverState cur = s;
        for (int k = 0; k < 200; ++k) cur = dead_reckon(cur, -0.5, 0.01);
        CHECK(cur.z == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-9));
        CHECK(cur.z_dot == doctest::Approx(-0.5 * cur.z));
    }
}

TEST_CASE("fuse_axes") {
    WindowSolution x, y, z;
    x.axis = 0;
    y.axis = 1;
    z.axis = 2;

    SUBCASE("single posed axis passes through") {
        x.posed = x.valid = true;
        x.z0 = 2.0;
        const auto m = fuse_axes({x, y, z}, {true, false, false}, 1.0, -0.1);
        REQUIRE(m.has_value());
        CHECK(m->z == doctest::Approx(2.0));
        CHECK(m->z_dot == doctest::Approx(-0.2));
    }
    SUBCASE("two axes average") {
        x.posed = x.valid = true;
        x.z0 = 1.9;
        y.posed = y.valid = true;
        y.z0 = 2.1;
        const auto m = fuse_axes({x, y, z}, {true, true, false}, 1.0, 0.0);
        REQUIRE(m.has_value());
        CHECK(m->z == doctest::Approx(2.0));
    }
    SUBCASE("gated-off and unposed axes are excluded") {
        x.posed = x.valid = true;
        x.z0 = 1.9;
        y.posed = y.valid = true;
        y.z0 = 99.0;
        const auto m = fuse_axes({x, y, z}, {true, false, true}, 1.0, 0.0);
        REQUIRE(m.has_value());
        CHECK(m->z == doctest::Approx(1.9));
    }
    SUBCASE("nothing qualifies, nothing returned") {
        CHECK_FALSE(fuse_axes({x, y, z}, {true, true, true}, 1.0, 0.0).has_value());
    }
    SUBCASE("invalid (too-shallow) solutions are excluded") {
        x.posed = true;
        x.valid = false;
        x.z0 = 0.01;
        CHECK_FALSE(fuse_axes({x}, {true, true, true}, 1.0, 0.0).has_value());
    }
}

TEST_CASE("reconstruct_xyz") {
    ObserverState s;
    s.z = 2.0;
    SUBCASE("optical axis") {
        CHECK((reconstruct_xyz(s, Vec2(0, 0)) - Vec3(0, 0, 2)).norm() == 0.0);
    }
    SUBCASE("off-axis point") {
        CHECK((reconstruct_xyz(s, Vec2(0.5, -0.25)) - Vec3(1.0, -0.5, 2.0))
                  .norm() < 1e-15);
    }
}
