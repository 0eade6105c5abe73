#include "roadtrack/simcai.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace roadtrack {

void InteractionParams::validate() const {
    if (!(social_distance >= 0.0 && social_distance < public_distance)) {
        throw std::invalid_argument("interaction: require 0 <= social_distance < public_distance");
    }
    if (tau < 1) throw std::invalid_argument("interaction: tau must be >= 1");
    if (!(personal_margin >= 0.0)) throw std::invalid_argument("interaction: personal_margin < 0");
    for (double a : steer_half_angle) {
        if (!(a > 0.0 && a < 1.5707963267948966)) {
            throw std::invalid_argument("interaction: steer_half_angle must lie in (0, pi/2)");
        }
    }
    if (!(delta_t >= 0.0)) throw std::invalid_argument("interaction: delta_t < 0");
    if (!(epsilon_scale > 0.0)) throw std::invalid_argument("interaction: epsilon_scale <= 0");
    if (max_candidates == 0) throw std::invalid_argument("interaction: max_candidates == 0");
}

double personal_radius(const AgentState& a, const InteractionParams& p) {
    return a.radius + p.personal_margin;
}

double merge_epsilon(const AgentState& a, const AgentState& b, const InteractionParams& p) {
    return p.epsilon_scale * 0.5 * (personal_radius(a, p) + personal_radius(b, p));
}

// ---------------------------------------------------------------------------
// Intent

const PairIntent* IntentTable::find(AgentId self, AgentId other) const {
    auto it = entries_.find({self, other});
    return it == entries_.end() ? nullptr : &it->second;
}

bool IntentTable::active(AgentId self, AgentId other) const {
    const auto* p = find(self, other);
    return p != nullptr && p->active;
}

void IntentTable::set(const PairIntent& intent) { entries_[intent.pair] = intent; }

void IntentTable::erase(AgentId self, AgentId other) { entries_.erase({self, other}); }

void IntentTable::force_active(AgentId self, AgentId other, int tau) {
    entries_[{self, other}] = PairIntent{{self, other}, tau, true};
}

IntentTable update_intents(std::span<const AgentState> agents, const IntentTable& intents,
                           const InteractionParams& params, const IntentEligibility& eligible) {
    IntentTable out;
    const double social_sq = params.social_distance * params.social_distance;
    for (const auto& a : agents) {
        for (const auto& b : agents) {
            if (a.id == b.id) continue;
            if (abs_sq(a.position - b.position) > social_sq) continue;
            if (eligible && !eligible(a.id, b.id)) continue;
            const PairIntent* prev = intents.find(a.id, b.id);
            PairIntent next{{a.id, b.id}, prev ? prev->consecutive_frames_within_social + 1 : 1,
                            false};
            next.active = next.consecutive_frames_within_social >= params.tau;
            out.set(next);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ability

Cone2D steering_cone(const AgentState& self, const Vec2& target, const InteractionParams& params) {
    Vec2 heading_vec = self.v_pref;
    if (abs_sq(heading_vec) < 1e-18) heading_vec = target - self.position;
    return Cone2D{self.position, std::atan2(heading_vec.y, heading_vec.x),
                  at(params.steer_half_angle, self.type)};
}

namespace {

// Omega1 on a single boundary ray: the line discriminant is non-negative and
// the touching part of the line lies ahead of the apex.
bool boundary_ray_reaches(const Vec2& apex, double angle, const Circle& zeta) {
    if (ray_circle_discriminant(apex, angle, zeta) < 0.0) return false;
    const Vec2 rel = zeta.center - apex;
    return dot(rel, unit_from_angle(angle)) >= 0.0 || abs_sq(rel) <= zeta.radius * zeta.radius;
}

}  // namespace

AbilityResult evaluate_ability(const AgentState& i, const AgentState& k,
                               std::span<const AgentState> others,
                               const InteractionParams& params) {
    if (i.position == k.position) {
        throw GeometryError("can_interact: agents share a position");
    }
    const Cone2D cone = steering_cone(i, k.position, params);
    const Circle zeta{k.position, personal_radius(k, params)};
    const double a1 = cone.heading + cone.half_angle;
    const double a2 = cone.heading - cone.half_angle;

    AbilityResult r;
    // The boundary ray nearer to the personal disc decides the slope used for Omega1.
    r.selected_ray_angle =
        perp_distance(cone.apex, a1, zeta.center) <= perp_distance(cone.apex, a2, zeta.center) ? a1
                                                                                               : a2;
    r.omega1 = boundary_ray_reaches(cone.apex, a1, zeta) || boundary_ray_reaches(cone.apex, a2, zeta);
    r.omega2 = in_forward_cone(cone, k.position);

    const double reach_sq = abs_sq(k.position - i.position);
    for (const auto& j : others) {
        if (j.id == i.id || j.id == k.id) continue;
        if (j.position == i.position) continue;
        if (abs_sq(j.position - i.position) >= reach_sq) continue;
        if (in_forward_cone(cone, j.position)) {
            r.obstructed = true;
            break;
        }
    }
    return r;
}

bool can_interact(const AgentState& i, const AgentState& k, std::span<const AgentState> others,
                  const InteractionParams& params) {
    return evaluate_ability(i, k, others, params).can_interact();
}

// ---------------------------------------------------------------------------
// Interaction

std::pair<AgentState, AgentState> interaction_step(const AgentState& i, const AgentState& k,
                                                   const InteractionParams& params) {
    auto speed_of = [&](const AgentState& a) {
        const double s = norm(a.v_pref);
        return s > 1e-9 ? s : at(params.preferred_speed, a.type);
    };
    const Vec2 dir = normalized(k.position - i.position);
    AgentState ni = i;
    AgentState nk = k;
    ni.v_pref = dir * speed_of(i);
    nk.v_pref = -dir * speed_of(k);
    ni.velocity = ni.v_pref;
    nk.velocity = nk.v_pref;
    return {ni, nk};
}

double convergence_time(const AgentState& i, const AgentState& k) {
    const double rel_speed = norm(i.velocity - k.velocity);
    if (rel_speed == 0.0) return std::numeric_limits<double>::infinity();
    return norm(i.position - k.position) / rel_speed;
}

namespace {

AgentState merged_body(const AgentState& i, const AgentState& k, const InteractionParams& params) {
    AgentState m = i.id <= k.id ? i : k;
    m.position = 0.5 * (i.position + k.position);
    m.velocity = 0.5 * (i.velocity + k.velocity);
    m.v_pref = 0.5 * (i.v_pref + k.v_pref);
    m.radius = 2.0 * merge_epsilon(i, k, params);
    return m;
}

}  // namespace

std::optional<AgentState> merge_if_overlapping(const AgentState& i, const AgentState& k,
                                               const InteractionParams& params) {
    const double reach = personal_radius(i, params) + personal_radius(k, params);
    if (abs_sq(i.position - k.position) >= reach * reach) return std::nullopt;
    return merged_body(i, k, params);
}

AgentId resolve_multi(std::span<const AgentState> candidates, const AgentState& k,
                      const InteractionParams& params) {
    if (candidates.empty()) throw std::invalid_argument("resolve_multi: empty candidate set");
    const AgentState* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& w : candidates) {
        const double d = norm((w.position + w.velocity * params.delta_t) - k.position);
        if (best == nullptr || d < best_d || (d == best_d && w.id < best->id)) {
            best = &w;
            best_d = d;
        }
    }
    return best->id;
}

// ---------------------------------------------------------------------------
// Prediction

SimcaiOutput predict_simcai(std::span<const AgentState> agents, const IntentTable& intents,
                            std::span<const MergeRecord> merges, const InteractionParams& params,
                            const OrcaParams& orca) {
    const std::size_t n = agents.size();
    SimcaiOutput out;
    out.phases.assign(n, CollisionAvoiding{});

    std::unordered_map<AgentId, std::size_t> index_of;
    index_of.reserve(n);
    for (std::size_t i = 0; i < n; ++i) index_of.emplace(agents[i].id, i);

    // partner[i]: index of the pair partner, or n when unpaired.
    std::vector<std::size_t> partner(n, n);
    std::vector<bool> merged(n, false);
    for (const auto& m : merges) {
        auto ia = index_of.find(m.a);
        auto ib = index_of.find(m.b);
        if (ia == index_of.end() || ib == index_of.end()) continue;
        if (partner[ia->second] != n || partner[ib->second] != n) continue;
        partner[ia->second] = ib->second;
        partner[ib->second] = ia->second;
        merged[ia->second] = merged[ib->second] = true;
        out.merges.push_back(m);
    }

    std::vector<bool> stationary(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        stationary[i] = norm(agents[i].velocity) < params.stationary_speed &&
                        norm(agents[i].v_pref) < params.stationary_speed;
    }

    std::vector<AgentState> working(agents.begin(), agents.end());

    // Pair selection: each target k (in id order) takes the resolved winner of
    // its candidate set; agents join at most one pair.
    if (!intents.entries().empty()) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return agents[a].id < agents[b].id; });

        // wanting[k]: indices w with an active intent towards k, ascending.
        std::vector<std::vector<std::size_t>> wanting(n);
        for (const auto& [pair, intent] : intents.entries()) {
            if (!intent.active) continue;
            const auto iw = index_of.find(pair.first);
            const auto ik = index_of.find(pair.second);
            if (iw == index_of.end() || ik == index_of.end()) continue;
            wanting[ik->second].push_back(iw->second);
        }
        for (auto& list : wanting) std::sort(list.begin(), list.end());

        std::vector<AgentState> q;
        for (std::size_t k : order) {
            if (partner[k] != n) continue;
            q.clear();
            for (std::size_t w : wanting[k]) {
                if (w == k || partner[w] != n) continue;
                if (agents[w].position == agents[k].position) continue;
                if (can_interact(agents[w], agents[k], agents, params) ||
                    can_interact(agents[k], agents[w], agents, params)) {
                    q.push_back(agents[w]);
                }
            }
            if (q.empty()) continue;
            if (q.size() > params.max_candidates) {
                const Vec2 pk = agents[k].position;
                std::partial_sort(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(params.max_candidates),
                                  q.end(), [&](const AgentState& a, const AgentState& b) {
                                      const double da = abs_sq(a.position - pk);
                                      const double db = abs_sq(b.position - pk);
                                      return da != db ? da < db : a.id < b.id;
                                  });
                q.resize(params.max_candidates);
            }
            const std::size_t w = index_of.at(resolve_multi(q, agents[k], params));
            partner[w] = k;
            partner[k] = w;

            if (merge_if_overlapping(agents[w], agents[k], params)) {
                merged[w] = merged[k] = true;
                out.merges.push_back({std::min(agents[w].id, agents[k].id),
                                      std::max(agents[w].id, agents[k].id), 0});
            } else {
                auto [nw, nk] = interaction_step(agents[w], agents[k], params);
                // The pair has no mutual constraint; never close past contact in one step.
                const double gap = distance(nw.position, nk.position) - nw.radius - nk.radius;
                const double closing = (norm(nw.v_pref) + norm(nk.v_pref)) * orca.dt;
                if (closing > 0.0 && closing > gap) {
                    const double scale = std::max(0.0, gap) / closing * 0.999;
                    nw.v_pref = nw.v_pref * scale;
                    nk.v_pref = nk.v_pref * scale;
                    nw.velocity = nw.v_pref;
                    nk.velocity = nk.v_pref;
                }
                working[w] = nw;
                working[k] = nk;
            }
        }
    }

    // Bodies for the collision-avoidance solve: merged pairs collapse to one.
    std::vector<AgentState> bodies;
    std::vector<std::size_t> body_of(n, 0);
    bodies.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (merged[i] && partner[i] < i) {
            body_of[i] = body_of[partner[i]];
            continue;
        }
        body_of[i] = bodies.size();
        if (merged[i]) {
            bodies.push_back(merged_body(agents[i], agents[partner[i]], params));
        } else {
            bodies.push_back(working[i]);
        }
    }

    std::vector<std::size_t> body_partner(bodies.size(), bodies.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (partner[i] != n && !merged[i]) body_partner[body_of[i]] = body_of[partner[i]];
    }
    const bool any_pair =
        std::any_of(body_partner.begin(), body_partner.end(), [&](std::size_t p) { return p != bodies.size(); });
    PairFilter skip;
    if (any_pair) {
        skip = [&](std::size_t self, std::size_t other) { return body_partner[self] == other; };
    }

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Vec2> body_velocity(bodies.size());
    const auto all_constraints = build_all_constraints(bodies, orca, skip);
    for (std::size_t b = 0; b < bodies.size(); ++b) {
        const auto& constraints = all_constraints[b];
        body_velocity[b] =
            solve_velocity(bodies[b].v_pref, constraints, at(orca.max_speed, bodies[b].type));
        ++out.solver_calls;
    }
    out.solver_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    out.agents.assign(agents.begin(), agents.end());
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 v = body_velocity[body_of[i]];
        out.agents[i].v_pref = working[i].v_pref;
        out.agents[i].velocity = v;
        out.agents[i].position += v * orca.dt;
        if (merged[i]) {
            out.phases[i] = Merged{agents[partner[i]].id};
        } else if (partner[i] != n) {
            out.phases[i] = Interacting{agents[partner[i]].id};
        } else if (stationary[i]) {
            out.phases[i] = Stationary{};
        }
    }
    return out;
}

SimcaiModel::SimcaiModel(InteractionParams params, OrcaParams orca)
    : params_(std::move(params)), orca_(std::move(orca)) {
    params_.validate();
    orca_.validate();
}

SimcaiOutput SimcaiModel::step(std::span<const AgentState> agents) {
    intents_ = update_intents(agents, intents_, params_, eligible_);
    SimcaiOutput out = predict_simcai(agents, intents_, merges_, params_, orca_);
    merges_ = out.merges;
    return out;
}

void SimcaiModel::observe(std::span<const AgentState> observed) {
    std::unordered_map<AgentId, const AgentState*> by_id;
    for (const auto& a : observed) by_id.emplace(a.id, &a);
    std::vector<MergeRecord> kept;
    for (auto m : merges_) {
        auto ia = by_id.find(m.a);
        auto ib = by_id.find(m.b);
        if (ia == by_id.end() || ib == by_id.end()) continue;
        const double eps = merge_epsilon(*ia->second, *ib->second, params_);
        if (distance(ia->second->position, ib->second->position) > 2.0 * eps) {
            ++m.separated_frames;
        } else {
            m.separated_frames = 0;
        }
        if (m.separated_frames >= params_.tau) continue;
        kept.push_back(m);
    }
    merges_ = std::move(kept);
}

}  // namespace roadtrack
