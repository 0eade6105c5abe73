#include <doctest.h>

#include <cmath>
#include <numbers>

#include "roadtrack/orca.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace roadtrack;

namespace {

AgentState agent(AgentId id, Vec2 p, Vec2 v, double r = 0.5) {
    AgentState a;
    a.id = id;
    a.position = p;
    a.velocity = v;
    a.v_pref = v;
    a.radius = r;
    return a;
}

// Truncated velocity obstacle: relative velocities that collide within the horizon.
bool in_vo(const Vec2& rel_pos, double combined, double horizon, const Vec2& v) {
    const double vv = abs_sq(v);
    const double t = vv > 0.0 ? std::clamp(dot(rel_pos, v) / vv, 0.0, horizon) : 0.0;
    return norm(rel_pos - t * v) < combined;
}

// Distance from rel_vel to the VO boundary, by sampling the (convex) boundary
// along rays from an interior point.
double vo_boundary_distance(const Vec2& rel_pos, double combined, double horizon, const Vec2& rel_vel) {
    const Vec2 inner = rel_pos / horizon;
    double best = 1e300;
    constexpr int kRays = 20000;
    for (int k = 0; k < kRays; ++k) {
        const Vec2 dir = unit_from_angle(2.0 * std::numbers::pi * k / kRays);
        double lo = 0.0;
        double hi = 200.0;
        if (in_vo(rel_pos, combined, horizon, inner + hi * dir)) continue;  // unbounded direction
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (in_vo(rel_pos, combined, horizon, inner + mid * dir) ? lo : hi) = mid;
        }
        best = std::min(best, distance(inner + lo * dir, rel_vel));
    }
    return best;
}

}  // namespace

TEST_CASE("no constraint beyond the reachable horizon") {
    OrcaParams p;
    p.time_horizon = 2.0;
    p.max_speed.fill(20.0);
    CHECK_FALSE(orca_halfplane(agent(1, {0, 0}, {}), agent(2, {100, 0}, {}), p).has_value());
}

TEST_CASE("head-on pair gets a tie-broken constraint") {
    OrcaParams p;
    p.time_horizon = 10.0;
    const auto h = orca_halfplane(agent(1, {-5, 0}, {1, 0}), agent(2, {5, 0}, {-1, 0}), p);
    REQUIRE(h.has_value());
    CHECK(std::abs(h->normal.y) > 1e-6);
    CHECK(norm(h->normal) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(*h == *orca_halfplane(agent(1, {-5, 0}, {1, 0}), agent(2, {5, 0}, {-1, 0}), p));
}

TEST_CASE("half-plane offset is the minimal escape from the velocity obstacle") {
    testing::Gen g(31);
    OrcaParams p;
    p.time_horizon = 2.0;
    for (int trial = 0; trial < 40; ++trial) {
        const AgentState a = agent(1, {0, 0}, g.in_disc(2.0), g.real(0.2, 0.6));
        AgentState b = agent(2, g.vec(-4, 4), g.in_disc(2.0), g.real(0.2, 0.6));
        const double combined = a.radius + b.radius;
        if (norm(b.position) < combined + 0.05) continue;
        const auto h = orca_halfplane(a, b, p);
        REQUIRE(h.has_value());
        const Vec2 u = (h->point - a.velocity) / p.reciprocity;
        const Vec2 rel_pos = b.position - a.position;
        const Vec2 rel_vel = a.velocity - b.velocity;
        const double oracle = vo_boundary_distance(rel_pos, combined, p.time_horizon, rel_vel);
        REQUIRE(norm(u) == doctest::Approx(oracle).epsilon(2e-3));
        // Normal is along u, pointing out of the obstacle.
        REQUIRE(std::abs(std::abs(dot(h->normal, u)) - norm(u)) < 1e-9 + 1e-9 * norm(u));
        const bool inside = in_vo(rel_pos, combined, p.time_horizon, rel_vel);
        if (norm(u) > 1e-6) REQUIRE((h->violation(a.velocity) > 0.0) == inside);
    }
}

TEST_CASE("solve_velocity examples") {
    CHECK(solve_velocity({1, 0}, {}, 2.0) == Vec2{1, 0});
    const Vec2 clamped = solve_velocity({3, 4}, {}, 2.0);
    CHECK(norm(clamped) == doctest::Approx(2.0));
    CHECK(clamped.x == doctest::Approx(1.2));

    const HalfPlane satisfied{{0, 0}, {1, 0}};
    CHECK(solve_velocity({1, 0.5}, std::span(&satisfied, 1), 5.0) == Vec2{1, 0.5});

    // Violated: projection onto the boundary x = 1.
    const HalfPlane violated{{1, 0}, {1, 0}};
    const Vec2 v = solve_velocity({0.2, 0.7}, std::span(&violated, 1), 5.0);
    CHECK(v.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v.y == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("solve_velocity is never beaten by a 400x400 grid search") {
    testing::Gen g(32);
    int infeasible = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double max_speed = g.real(1.0, 5.0);
        std::vector<HalfPlane> hs(g.integer(1, 6));
        for (auto& h : hs) h = {g.in_disc(max_speed), unit_from_angle(g.real(0, 2 * std::numbers::pi))};
        const Vec2 v_pref = g.in_disc(1.5 * max_speed);
        const Vec2 v = solve_velocity(v_pref, hs, max_speed);
        REQUIRE(norm(v) <= max_speed + 1e-9);

        bool infeasible_lp = false;
        REQUIRE(testing::solver_matches_grid(v_pref, hs, max_speed, v, &infeasible_lp));
        if (infeasible_lp) ++infeasible;
    }
    MESSAGE("infeasible instances: " << infeasible);
}

TEST_CASE("grid neighbour search equals the brute-force scan") {
    testing::Gen g(33);
    for (int trial = 0; trial < 200; ++trial) {
        OrcaParams p;
        p.max_neighbors = static_cast<std::size_t>(g.integer(0, 6));
        auto agents = testing::lattice_agents(g, g.integer(1, 60), g.real(0.9, 3.0), 1.5);
        for (auto& a : agents) {
            if (g.coin(0.2)) a.type = AgentType::car;
            if (g.coin(0.1)) a.position = agents[0].position + g.in_disc(2.0);  // clusters and overlaps
        }
        const std::size_t skip_a = g.integer(0, static_cast<int>(agents.size()) - 1);
        const PairFilter skip = [&](std::size_t s, std::size_t o) { return s == skip_a || o == skip_a; };
        const auto all = build_all_constraints(agents, p, trial % 2 ? skip : nullptr);
        for (std::size_t i = 0; i < agents.size(); ++i)
            REQUIRE(all[i] == build_constraints(agents, i, p, trial % 2 ? skip : nullptr));
    }
}

TEST_CASE("single agent advances by v_pref * dt") {
    OrcaParams p;
    const AgentState a = agent(1, {1, 2}, {0.5, -0.25});
    const auto out = predict_orca(std::span(&a, 1), p);
    CHECK(out[0].position == a.position + a.v_pref * p.dt);
}

TEST_CASE("head-on pair stays mirror symmetric") {
    OrcaParams p;
    std::vector<AgentState> s{agent(1, {-5, 0.01}, {1, 0}), agent(2, {5, -0.01}, {-1, 0})};
    for (int step = 0; step < 400; ++step) {
        for (auto& a : s) a.v_pref = a.id == 1 ? Vec2{1, 0} : Vec2{-1, 0};
        s = predict_orca(s, p);
        REQUIRE(std::abs(s[0].position.x + s[1].position.x) <= 1e-6);
        REQUIRE(std::abs(s[0].position.y + s[1].position.y) <= 1e-6);
        REQUIRE(distance(s[0].position, s[1].position) >= 1.0 - 1e-6);
    }
    CHECK(s[0].position.x > 5.0);
}

TEST_CASE("feasible steps never interpenetrate") {
    // The guarantee needs every agent's LP to be feasible; jammed steps are counted, not asserted.
    testing::Gen g(34);
    OrcaParams p;
    int feasible_steps = 0;
    int total_steps = 0;
    for (int scenario = 0; scenario < 20; ++scenario) {
        auto agents = testing::lattice_agents(g, g.integer(2, 25), 2.0, 1.2);
        std::vector<Vec2> goals;
        for (std::size_t i = 0; i < agents.size(); ++i) goals.push_back(g.vec(-5, 15));
        for (int step = 0; step < 200; ++step) {
            for (std::size_t i = 0; i < agents.size(); ++i) {
                const Vec2 to_goal = goals[i] - agents[i].position;
                agents[i].v_pref = norm(to_goal) > 1.2 ? normalized(to_goal) * 1.2 : to_goal;
            }
            const auto constraints = build_all_constraints(agents, p);
            bool feasible = testing::min_gap(agents) >= 0.0;
            for (std::size_t i = 0; i < agents.size() && feasible; ++i) {
                const Vec2 v = solve_velocity(agents[i].v_pref, constraints[i], at(p.max_speed, agents[i].type));
                feasible = testing::max_violation(v, constraints[i]) <= 1e-9;
            }
            agents = predict_orca(agents, p);
            ++total_steps;
            if (!feasible) continue;
            ++feasible_steps;
            REQUIRE(testing::min_gap(agents) >= -1e-6);
        }
    }
    CHECK(feasible_steps > total_steps * 9 / 10);
}

TEST_CASE("predict_orca is deterministic") {
    testing::Gen g(35);
    const auto agents = testing::lattice_agents(g, 30, 1.5, 1.0);
    const auto a = predict_orca(agents, OrcaParams{});
    const auto b = predict_orca(agents, OrcaParams{});
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].position == b[i].position);
        REQUIRE(a[i].velocity == b[i].velocity);
    }
}
