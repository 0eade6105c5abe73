#include "roadtrack/orca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace roadtrack {

namespace {

constexpr double kParallelEps = 1e-9;

constexpr std::array<std::string_view, kAgentTypeCount> kTypeNames{
    "pedestrian", "two_wheeler", "three_wheeler", "car", "bus", "truck"};

// Directed-line form used by the incremental LP: admissible side is to the left.
struct Line {
    Vec2 point;
    Vec2 direction;
};

Line to_line(const HalfPlane& h) { return {h.point, {h.normal.y, -h.normal.x}}; }

bool lp1(std::span<const Line> lines, std::size_t line_no, double radius, const Vec2& opt,
         bool direction_opt, Vec2& result) {
    const Line& line = lines[line_no];
    const double dp = dot(line.point, line.direction);
    const double discriminant = dp * dp + radius * radius - abs_sq(line.point);
    if (discriminant < 0.0) return false;  // speed disc misses the line entirely

    const double sq = std::sqrt(discriminant);
    double t_left = -dp - sq;
    double t_right = -dp + sq;

    for (std::size_t i = 0; i < line_no; ++i) {
        const double denominator = cross(line.direction, lines[i].direction);
        const double numerator = cross(lines[i].direction, line.point - lines[i].point);
        if (std::abs(denominator) <= kParallelEps) {
            if (numerator < 0.0) return false;
            continue;
        }
        const double t = numerator / denominator;
        if (denominator >= 0.0) {
            t_right = std::min(t_right, t);
        } else {
            t_left = std::max(t_left, t);
        }
        if (t_left > t_right) return false;
    }

    if (direction_opt) {
        result = dot(opt, line.direction) > 0.0 ? line.point + t_right * line.direction
                                                : line.point + t_left * line.direction;
    } else {
        const double t = std::clamp(dot(line.direction, opt - line.point), t_left, t_right);
        result = line.point + t * line.direction;
    }
    return true;
}

std::size_t lp2(std::span<const Line> lines, double radius, const Vec2& opt, bool direction_opt,
                Vec2& result) {
    if (direction_opt) {
        result = opt * radius;
    } else if (abs_sq(opt) > radius * radius) {
        result = normalized(opt) * radius;
    } else {
        result = opt;
    }

    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (cross(lines[i].direction, lines[i].point - result) > 0.0) {
            const Vec2 previous = result;
            if (!lp1(lines, i, radius, opt, direction_opt, result)) {
                result = previous;
                return i;
            }
        }
    }
    return lines.size();
}

// Minimizes the maximum violation over lines[begin..], keeping earlier lines as
// they were satisfied by the partial solution.
void lp3(std::span<const Line> lines, std::size_t begin, double radius, Vec2& result) {
    double dist = 0.0;
    std::vector<Line> projected;
    for (std::size_t i = begin; i < lines.size(); ++i) {
        if (cross(lines[i].direction, lines[i].point - result) <= dist) continue;

        projected.clear();
        for (std::size_t j = 0; j < i; ++j) {
            Line line;
            const double determinant = cross(lines[i].direction, lines[j].direction);
            if (std::abs(determinant) <= kParallelEps) {
                if (dot(lines[i].direction, lines[j].direction) > 0.0) continue;
                line.point = 0.5 * (lines[i].point + lines[j].point);
            } else {
                line.point = lines[i].point +
                             (cross(lines[j].direction, lines[i].point - lines[j].point) /
                              determinant) *
                                 lines[i].direction;
            }
            line.direction = normalized(lines[j].direction - lines[i].direction);
            projected.push_back(line);
        }

        const Vec2 previous = result;
        if (lp2(projected, radius, Vec2{-lines[i].direction.y, lines[i].direction.x}, true,
                result) < projected.size()) {
            // Floating-point failure; the previous result is already feasible here.
            result = previous;
        }
        dist = cross(lines[i].direction, lines[i].point - result);
    }
}

}  // namespace

std::string_view to_string(AgentType t) { return kTypeNames[static_cast<std::size_t>(t)]; }

AgentType agent_type_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (kTypeNames[i] == name) return static_cast<AgentType>(i);
    }
    throw std::invalid_argument("unknown agent type '" + std::string(name) + "'");
}

bool is_vehicle(AgentType t) { return t != AgentType::pedestrian; }

void OrcaParams::validate() const {
    if (!(dt > 0.0) || !(time_horizon > dt)) {
        throw std::invalid_argument("orca: require time_horizon > dt > 0");
    }
    if (!(reciprocity > 0.0 && reciprocity <= 1.0)) {
        throw std::invalid_argument("orca: reciprocity must lie in (0, 1]");
    }
    for (double s : max_speed) {
        if (!(s > 0.0)) throw std::invalid_argument("orca: max_speed must be positive");
    }
}

std::optional<HalfPlane> orca_halfplane(const AgentState& self, const AgentState& other,
                                        const OrcaParams& params) {
    const Vec2 rel_pos = other.position - self.position;
    const Vec2 rel_vel = self.velocity - other.velocity;
    const double dist_sq = abs_sq(rel_pos);
    const double combined = self.radius + other.radius;
    const double combined_sq = combined * combined;

    const double reach =
        params.time_horizon * (at(params.max_speed, self.type) + at(params.max_speed, other.type));
    if (std::sqrt(dist_sq) - combined > reach) return std::nullopt;

    Vec2 direction;
    Vec2 u;
    if (dist_sq > combined_sq) {
        const double inv_horizon = 1.0 / params.time_horizon;
        const Vec2 w = rel_vel - inv_horizon * rel_pos;
        const double w_len_sq = abs_sq(w);
        const double dp = dot(w, rel_pos);

        if (dp < 0.0 && dp * dp > combined_sq * w_len_sq) {
            // Closest boundary point lies on the truncation arc.
            const double w_len = std::sqrt(w_len_sq);
            const Vec2 unit_w = w / w_len;
            direction = {unit_w.y, -unit_w.x};
            u = (combined * inv_horizon - w_len) * unit_w;
        } else {
            const double leg = std::sqrt(dist_sq - combined_sq);
            if (cross(rel_pos, w) > 0.0) {
                direction = Vec2{rel_pos.x * leg - rel_pos.y * combined,
                                 rel_pos.x * combined + rel_pos.y * leg} /
                            dist_sq;
            } else {
                direction = -Vec2{rel_pos.x * leg + rel_pos.y * combined,
                                  -rel_pos.x * combined + rel_pos.y * leg} /
                            dist_sq;
            }
            u = dot(rel_vel, direction) * direction - rel_vel;
        }
    } else {
        // Already overlapping: resolve within one step.
        const double inv_dt = 1.0 / params.dt;
        const Vec2 w = rel_vel - inv_dt * rel_pos;
        const double w_len = norm(w);
        const Vec2 unit_w = w_len > 0.0 ? w / w_len : Vec2{1.0, 0.0};
        direction = {unit_w.y, -unit_w.x};
        u = (combined * inv_dt - w_len) * unit_w;
    }

    return HalfPlane{self.velocity + params.reciprocity * u, {-direction.y, direction.x}};
}

Vec2 solve_velocity(const Vec2& v_pref, std::span<const HalfPlane> constraints, double max_speed) {
    if (!(max_speed > 0.0)) throw std::invalid_argument("solve_velocity: max_speed must be > 0");
    std::vector<Line> lines;
    lines.reserve(constraints.size());
    for (const auto& h : constraints) lines.push_back(to_line(h));

    Vec2 result;
    const std::size_t fail = lp2(lines, max_speed, v_pref, false, result);
    if (fail < lines.size()) lp3(lines, fail, max_speed, result);
    return result;
}

namespace {

bool within_reach(const AgentState& self, const AgentState& other, const OrcaParams& params) {
    const double reach =
        params.time_horizon * (at(params.max_speed, self.type) + at(params.max_speed, other.type));
    return distance(self.position, other.position) - (self.radius + other.radius) <= reach;
}

}  // namespace

std::vector<HalfPlane> build_constraints(std::span<const AgentState> agents, std::size_t self,
                                         const OrcaParams& params, const PairFilter& skip) {
    struct Candidate {
        double dist_sq;
        std::size_t index;
    };
    // Select neighbours on distance alone; half-planes are built for the kept ones only.
    std::vector<Candidate> found;
    for (std::size_t j = 0; j < agents.size(); ++j) {
        if (j == self) continue;
        if (skip && skip(self, j)) continue;
        if (!within_reach(agents[self], agents[j], params)) continue;
        found.push_back({abs_sq(agents[j].position - agents[self].position), j});
    }
    if (params.max_neighbors > 0 && found.size() > params.max_neighbors) {
        std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(params.max_neighbors),
                          found.end(), [](const Candidate& a, const Candidate& b) {
                              return a.dist_sq != b.dist_sq ? a.dist_sq < b.dist_sq
                                                            : a.index < b.index;
                          });
        found.resize(params.max_neighbors);
        std::sort(found.begin(), found.end(),
                  [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
    }
    std::vector<HalfPlane> out;
    out.reserve(found.size());
    for (const auto& c : found) {
        if (auto h = orca_halfplane(agents[self], agents[c.index], params)) out.push_back(*h);
    }
    return out;
}

namespace {

// Agents bucketed into square cells covering their bounding box.
class NeighborGrid {
public:
    explicit NeighborGrid(std::span<const AgentState> agents) {
        Vec2 lo = agents[0].position;
        Vec2 hi = lo;
        for (const auto& a : agents) {
            lo = {std::min(lo.x, a.position.x), std::min(lo.y, a.position.y)};
            hi = {std::max(hi.x, a.position.x), std::max(hi.y, a.position.y)};
        }
        origin_ = lo;
        const double w = hi.x - lo.x;
        const double h = hi.y - lo.y;
        // About two agents per cell on average.
        cell_ = std::sqrt(w * h * 2.0 / static_cast<double>(agents.size()));
        cell_ = std::max({cell_, std::max(w, h) / 1024.0, 1e-6});
        nx_ = static_cast<int>(w / cell_) + 1;
        ny_ = static_cast<int>(h / cell_) + 1;

        std::vector<int> cell_of(agents.size());
        start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const auto [cx, cy] = cell(agents[i].position);
            cell_of[i] = cy * nx_ + cx;
            ++start_[static_cast<std::size_t>(cell_of[i]) + 1];
        }
        for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
        members_.resize(agents.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < agents.size(); ++i) members_[fill[cell_of[i]]++] = i;
    }

    std::pair<int, int> cell(const Vec2& p) const {
        const int cx = std::clamp(static_cast<int>((p.x - origin_.x) / cell_), 0, nx_ - 1);
        const int cy = std::clamp(static_cast<int>((p.y - origin_.y) / cell_), 0, ny_ - 1);
        return {cx, cy};
    }

    double cell_size() const { return cell_; }
    int max_ring() const { return std::max(nx_, ny_); }

    // Calls f(index) for every agent in the square ring at Chebyshev radius r.
    template <class F>
    void visit_ring(int cx, int cy, int r, F&& f) const {
        for (int y = cy - r; y <= cy + r; ++y) {
            if (y < 0 || y >= ny_) continue;
            const bool edge_row = y == cy - r || y == cy + r;
            const int step = edge_row || r == 0 ? 1 : 2 * r;
            for (int x = cx - r; x <= cx + r; x += step) {
                if (x < 0 || x >= nx_) continue;
                const std::size_t c = static_cast<std::size_t>(y) * nx_ + x;
                for (std::size_t m = start_[c]; m < start_[c + 1]; ++m) f(members_[m]);
            }
        }
    }

private:
    Vec2 origin_;
    double cell_ = 1.0;
    int nx_ = 1;
    int ny_ = 1;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> members_;
};

struct Neighbor {
    double dist_sq;
    std::size_t index;
    bool operator<(const Neighbor& o) const {
        return dist_sq != o.dist_sq ? dist_sq < o.dist_sq : index < o.index;
    }
};

}  // namespace

std::vector<std::vector<HalfPlane>> build_all_constraints(std::span<const AgentState> agents,
                                                          const OrcaParams& params,
                                                          const PairFilter& skip) {
    std::vector<std::vector<HalfPlane>> out(agents.size());
    if (agents.empty()) return out;
    if (params.max_neighbors == 0) {
        for (std::size_t i = 0; i < agents.size(); ++i) out[i] = build_constraints(agents, i, params, skip);
        return out;
    }
    const NeighborGrid grid(agents);
    const std::size_t k = params.max_neighbors;
    std::vector<Neighbor> found;
    std::vector<Neighbor> scratch;
    for (std::size_t self = 0; self < agents.size(); ++self) {
        found.clear();
        const auto [cx, cy] = grid.cell(agents[self].position);
        for (int r = 0; r <= grid.max_ring(); ++r) {
            grid.visit_ring(cx, cy, r, [&](std::size_t j) {
                if (j == self) return;
                if (skip && skip(self, j)) return;
                if (!within_reach(agents[self], agents[j], params)) return;
                found.push_back({abs_sq(agents[j].position - agents[self].position), j});
            });
            if (found.size() < k) continue;
            // Unvisited agents are at least r cells away.
            scratch = found;
            std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1), scratch.end());
            const double bound = r * grid.cell_size();
            if (scratch[k - 1].dist_sq < bound * bound) break;
        }
        if (found.size() > k) {
            std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(k), found.end());
            found.resize(k);
        }
        std::sort(found.begin(), found.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
        out[self].reserve(found.size());
        for (const auto& c : found) {
            if (auto h = orca_halfplane(agents[self], agents[c.index], params)) out[self].push_back(*h);
        }
    }
    return out;
}

std::vector<AgentState> predict_orca(std::span<const AgentState> agents, const OrcaParams& params) {
    std::vector<Vec2> new_velocity(agents.size());
    const auto constraints = build_all_constraints(agents, params);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        new_velocity[i] =
            solve_velocity(agents[i].v_pref, constraints[i], at(params.max_speed, agents[i].type));
    }
    std::vector<AgentState> out(agents.begin(), agents.end());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].velocity = new_velocity[i];
        out[i].position += new_velocity[i] * params.dt;
    }
    return out;
}

}  // namespace roadtrack
