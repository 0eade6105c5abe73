#include "roadtrack/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "roadtrack/association.hpp"

namespace roadtrack {

using nlohmann::json;

void DetectorModel::validate() const {
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) throw ScenarioError(std::string(name) + " must lie in [0, 1]");
    };
    prob(miss_prob_base, "miss_prob_base");
    prob(occlusion_miss_boost, "occlusion_miss_boost");
    prob(min_visibility, "min_visibility");
    if (!(bbox_jitter_sigma >= 0.0)) throw ScenarioError("bbox_jitter_sigma must be >= 0");
    if (mask_erosion < 0) throw ScenarioError("mask_erosion must be >= 0");
}

void ScenarioSpec::validate() const {
    if (!(fps > 0.0)) throw ScenarioError("fps must be positive");
    if (duration_frames < 1) throw ScenarioError("duration_frames must be >= 1");
    if (!(world_size.x > 0.0 && world_size.y > 0.0)) throw ScenarioError("world_size must be positive");
    if (!(camera.px_per_meter > 0.0) || camera.image_width < 1 || camera.image_height < 1)
        throw ScenarioError("camera needs a positive scale and image size");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto& a = agents[i];
        if (!(a.radius > 0.0)) throw ScenarioError("agent " + std::to_string(i) + ": radius must be positive");
        if (!(a.preferred_speed >= 0.0))
            throw ScenarioError("agent " + std::to_string(i) + ": preferred_speed must be >= 0");
        if (a.spawn.x < 0.0 || a.spawn.y < 0.0 || a.spawn.x > world_size.x || a.spawn.y > world_size.y)
            throw ScenarioError("agent " + std::to_string(i) + ": spawn outside world");
        if (a.spawn_frame < 1) throw ScenarioError("agent " + std::to_string(i) + ": spawn_frame must be >= 1");
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            if (agents[i].spawn_frame != agents[j].spawn_frame) continue;
            if (distance(agents[i].spawn, agents[j].spawn) < agents[i].radius + agents[j].radius) {
                throw ScenarioError("agents " + std::to_string(i) + " and " + std::to_string(j) +
                                    " overlap at spawn");
            }
        }
    }
    for (const auto& s : interactions) {
        if (s.a >= agents.size() || s.b >= agents.size() || s.a == s.b)
            throw ScenarioError("scripted interaction references invalid agents");
        if (s.start_frame < 1) throw ScenarioError("scripted interaction start_frame must be >= 1");
    }
    if (detector) detector->validate();
    try {
        interaction.validate();
        orca.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError(e.what());
    }
}

double ScenarioSpec::interacting_fraction() const {
    if (agents.empty()) return 0.0;
    std::set<std::size_t> in;
    for (const auto& s : interactions) {
        in.insert(s.a);
        in.insert(s.b);
    }
    return static_cast<double>(in.size()) / static_cast<double>(agents.size());
}

// ---------------------------------------------------------------------------
// JSON

namespace {

Vec2 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ScenarioError("expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json vec_to_json(const Vec2& v) { return json::array({v.x, v.y}); }

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return it.key() == k; }))
            throw ScenarioError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
}

}  // namespace

ScenarioSpec spec_from_json_text(std::string_view text) {
    ScenarioSpec s;
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw ScenarioError("scenario spec must be a JSON object");
        reject_unknown(j,
                       {"name", "duration_frames", "fps", "world_size", "agents", "interactions",
                        "camera", "seed", "detector", "interaction", "orca"},
                       "spec");
        s.name = j.value("name", s.name);
        s.duration_frames = j.value("duration_frames", s.duration_frames);
        s.fps = j.value("fps", s.fps);
        if (j.contains("world_size")) s.world_size = vec_from_json(j["world_size"]);
        s.seed = j.value("seed", s.seed);
        if (j.contains("camera")) {
            const auto& c = j["camera"];
            reject_unknown(c, {"px_per_meter", "image_width", "image_height"}, "camera");
            s.camera.px_per_meter = c.value("px_per_meter", s.camera.px_per_meter);
            s.camera.image_width = c.value("image_width", s.camera.image_width);
            s.camera.image_height = c.value("image_height", s.camera.image_height);
        }
        for (const auto& a : j.value("agents", json::array())) {
            reject_unknown(a, {"type", "radius", "preferred_speed", "spawn", "goals", "spawn_frame"}, "agent");
            ScenarioAgent ag;
            ag.type = agent_type_from_string(a.value("type", std::string("pedestrian")));
            ag.radius = a.value("radius", ag.radius);
            ag.preferred_speed = a.value("preferred_speed", ag.preferred_speed);
            if (!a.contains("spawn")) throw ScenarioError("agent without spawn");
            ag.spawn = vec_from_json(a["spawn"]);
            for (const auto& g : a.value("goals", json::array())) ag.goals.push_back(vec_from_json(g));
            ag.spawn_frame = a.value("spawn_frame", 1);
            s.agents.push_back(std::move(ag));
        }
        for (const auto& i : j.value("interactions", json::array())) {
            reject_unknown(i, {"a", "b", "start_frame"}, "interaction");
            s.interactions.push_back(
                {i.at("a").get<std::size_t>(), i.at("b").get<std::size_t>(), i.value("start_frame", 1)});
        }
        if (j.contains("detector")) {
            const auto& d = j["detector"];
            reject_unknown(d,
                           {"miss_prob_base", "occlusion_miss_boost", "bbox_jitter_sigma", "mask_erosion",
                            "min_visibility"},
                           "detector");
            DetectorModel m;
            m.miss_prob_base = d.value("miss_prob_base", m.miss_prob_base);
            m.occlusion_miss_boost = d.value("occlusion_miss_boost", m.occlusion_miss_boost);
            m.bbox_jitter_sigma = d.value("bbox_jitter_sigma", m.bbox_jitter_sigma);
            m.mask_erosion = d.value("mask_erosion", m.mask_erosion);
            m.min_visibility = d.value("min_visibility", m.min_visibility);
            s.detector = m;
        }
        if (j.contains("interaction")) {
            const auto& p = j["interaction"];
            reject_unknown(p, {"social_distance", "public_distance", "tau", "personal_margin", "delta_t"},
                           "interaction");
            s.interaction.social_distance = p.value("social_distance", s.interaction.social_distance);
            s.interaction.public_distance = p.value("public_distance", s.interaction.public_distance);
            s.interaction.tau = p.value("tau", s.interaction.tau);
            s.interaction.personal_margin = p.value("personal_margin", s.interaction.personal_margin);
            s.interaction.delta_t = p.value("delta_t", s.interaction.delta_t);
        }
        if (j.contains("orca")) {
            const auto& o = j["orca"];
            reject_unknown(o, {"time_horizon", "reciprocity", "max_neighbors"}, "orca");
            s.orca.time_horizon = o.value("time_horizon", s.orca.time_horizon);
            s.orca.reciprocity = o.value("reciprocity", s.orca.reciprocity);
            s.orca.max_neighbors = o.value("max_neighbors", s.orca.max_neighbors);
        }
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("malformed scenario spec: ") + e.what());
    }
    s.validate();
    return s;
}

std::string spec_to_json_text(const ScenarioSpec& s) {
    json j;
    j["name"] = s.name;
    j["duration_frames"] = s.duration_frames;
    j["fps"] = s.fps;
    j["world_size"] = vec_to_json(s.world_size);
    j["seed"] = s.seed;
    j["camera"] = {{"px_per_meter", s.camera.px_per_meter},
                   {"image_width", s.camera.image_width},
                   {"image_height", s.camera.image_height}};
    j["agents"] = json::array();
    for (const auto& a : s.agents) {
        json goals = json::array();
        for (const auto& g : a.goals) goals.push_back(vec_to_json(g));
        j["agents"].push_back({{"type", std::string(to_string(a.type))},
                               {"radius", a.radius},
                               {"preferred_speed", a.preferred_speed},
                               {"spawn", vec_to_json(a.spawn)},
                               {"goals", goals},
                               {"spawn_frame", a.spawn_frame}});
    }
    j["interactions"] = json::array();
    for (const auto& i : s.interactions)
        j["interactions"].push_back({{"a", i.a}, {"b", i.b}, {"start_frame", i.start_frame}});
    if (s.detector) {
        const auto& d = *s.detector;
        j["detector"] = {{"miss_prob_base", d.miss_prob_base},
                         {"occlusion_miss_boost", d.occlusion_miss_boost},
                         {"bbox_jitter_sigma", d.bbox_jitter_sigma},
                         {"mask_erosion", d.mask_erosion},
                         {"min_visibility", d.min_visibility}};
    }
    j["interaction"] = {{"social_distance", s.interaction.social_distance},
                        {"public_distance", s.interaction.public_distance},
                        {"tau", s.interaction.tau},
                        {"personal_margin", s.interaction.personal_margin},
                        {"delta_t", s.interaction.delta_t}};
    j["orca"] = {{"time_horizon", s.orca.time_horizon},
                 {"reciprocity", s.orca.reciprocity},
                 {"max_neighbors", s.orca.max_neighbors}};
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

bool in_ellipse(const BBox& box, double x, double y) {
    const double a = box.w / 2.0, b = box.h / 2.0;
    const double dx = (x - (box.u + a)) / a;
    const double dy = (y - (box.v + b)) / b;
    return dx * dx + dy * dy <= 1.0;
}

std::size_t cells(double extent) {
    return static_cast<std::size_t>(std::max(1L, std::lround(extent)));
}

}  // namespace

RleMask ellipse_mask(const BBox& box) {
    const std::size_t rows = cells(box.h), cols = cells(box.w);
    std::vector<std::uint8_t> bits(rows * cols, 0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double y = box.v + (r + 0.5) * box.h / rows;
        for (std::size_t c = 0; c < cols; ++c) {
            const double x = box.u + (c + 0.5) * box.w / cols;
            bits[r * cols + c] = in_ellipse(box, x, y) ? 1 : 0;
        }
    }
    // Degenerate tiny boxes: keep the center cell.
    if (std::none_of(bits.begin(), bits.end(), [](auto b) { return b != 0; }))
        bits[(rows / 2) * cols + cols / 2] = 1;
    return RleMask::encode(bits, rows, cols);
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

Vec2 goal_velocity(const AgentState& a, const ScenarioAgent& spec, std::size_t goal, double dt) {
    if (goal >= spec.goals.size() || spec.preferred_speed <= 0.0) return {};
    const Vec2 d = spec.goals[goal] - a.position;
    const double len = norm(d);
    if (len <= 0.0) return {};
    return d / len * std::min(spec.preferred_speed, len / dt);
}

}  // namespace

GtSequence simulate(const ScenarioSpec& spec) {
    spec.validate();
    OrcaParams orca = spec.orca;
    orca.dt = 1.0 / spec.fps;
    const InteractionParams& params = spec.interaction;
    const double s = spec.camera.px_per_meter;

    GtSequence seq;
    seq.frames = spec.duration_frames;
    seq.fps = spec.fps;
    seq.px_per_meter = s;
    seq.image_width = spec.camera.image_width;
    seq.image_height = spec.camera.image_height;

    std::set<std::pair<AgentId, AgentId>> scripted;
    for (const auto& si : spec.interactions) {
        const AgentId a = static_cast<AgentId>(si.a + 1), b = static_cast<AgentId>(si.b + 1);
        scripted.insert({a, b});
        scripted.insert({b, a});
    }
    const IntentEligibility eligible = [&](AgentId a, AgentId b) { return scripted.contains({a, b}); };

    std::vector<AgentState> active;
    std::vector<std::size_t> goal_index(spec.agents.size(), 0);
    std::vector<bool> spawned(spec.agents.size(), false);
    IntentTable intents;
    std::vector<MergeRecord> merges;

    for (int frame = 1; frame <= spec.duration_frames; ++frame) {
        for (std::size_t i = 0; i < spec.agents.size(); ++i) {
            const auto& a = spec.agents[i];
            if (spawned[i] || a.spawn_frame > frame) continue;
            const bool blocked = std::any_of(active.begin(), active.end(), [&](const AgentState& o) {
                return distance(o.position, a.spawn) < o.radius + a.radius;
            });
            if (blocked) continue;  // retried next frame
            spawned[i] = true;
            AgentState st;
            st.id = static_cast<AgentId>(i + 1);
            st.position = a.spawn;
            st.radius = a.radius;
            st.type = a.type;
            st.velocity = goal_velocity(st, a, 0, orca.dt);
            active.push_back(st);
        }
        std::sort(active.begin(), active.end(),
                  [](const AgentState& x, const AgentState& y) { return x.id < y.id; });

        for (auto& st : active) st.v_pref = goal_velocity(st, spec.agents[st.id - 1], goal_index[st.id - 1], orca.dt);

        intents = update_intents(active, intents, params, eligible);
        for (const auto& si : spec.interactions) {
            if (frame < si.start_frame) continue;
            const AgentId a = static_cast<AgentId>(si.a + 1), b = static_cast<AgentId>(si.b + 1);
            const auto present = [&](AgentId id) {
                return std::any_of(active.begin(), active.end(), [&](const AgentState& x) { return x.id == id; });
            };
            if (!present(a) || !present(b)) continue;
            intents.force_active(a, b, params.tau);
            intents.force_active(b, a, params.tau);
        }

        SimcaiOutput out = predict_simcai(active, intents, merges, params, orca);
        merges = out.merges;

        for (std::size_t i = 0; i < active.size(); ++i) {
            const AgentState& st = active[i];
            const Vec2 c = st.position * s;
            if (c.x < 0.0 || c.y < 0.0 || c.x >= spec.camera.image_width || c.y >= spec.camera.image_height)
                continue;
            GtRow row;
            row.frame = frame;
            row.gt_id = static_cast<int>(st.id);
            row.type = st.type;
            const Vec2 ext = box_extent_px(st.type, st.radius, s);
            row.bbox = bbox_at_center(c, ext.x, ext.y);
            row.mask = ellipse_mask(row.bbox);
            row.stationary = std::holds_alternative<Stationary>(out.phases[i]);
            row.position = st.position;
            row.radius = st.radius;
            seq.rows.push_back(std::move(row));
        }

        active = std::move(out.agents);
        std::erase_if(active, [&](const AgentState& st) {
            const auto& a = spec.agents[st.id - 1];
            std::size_t& g = goal_index[st.id - 1];
            if (g >= a.goals.size()) return false;
            const double tol = std::max(a.radius, a.preferred_speed * orca.dt);
            if (distance(st.position, a.goals[g]) > tol) return false;
            ++g;
            return g >= a.goals.size();
        });
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Detector

namespace {

// Nearer boxes have a larger bottom edge; equal edges go to the later index.
bool nearer(const std::vector<BBox>& boxes, std::size_t j, std::size_t i) {
    const double bj = boxes[j].bottom(), bi = boxes[i].bottom();
    return bj > bi || (bj == bi && j > i);
}

// Area of the union of rectangles clipped to `clip`, by coordinate compression.
double covered_area(const BBox& clip, const std::vector<BBox>& rects) {
    if (rects.empty()) return 0.0;
    std::vector<double> xs{clip.u, clip.right()}, ys{clip.v, clip.bottom()};
    for (const auto& r : rects) {
        xs.push_back(std::clamp(r.u, clip.u, clip.right()));
        xs.push_back(std::clamp(r.right(), clip.u, clip.right()));
        ys.push_back(std::clamp(r.v, clip.v, clip.bottom()));
        ys.push_back(std::clamp(r.bottom(), clip.v, clip.bottom()));
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    double area = 0.0;
    for (std::size_t a = 0; a + 1 < xs.size(); ++a) {
        const double mx = 0.5 * (xs[a] + xs[a + 1]);
        for (std::size_t b = 0; b + 1 < ys.size(); ++b) {
            const double my = 0.5 * (ys[b] + ys[b + 1]);
            const bool hit = std::any_of(rects.begin(), rects.end(), [&](const BBox& r) {
                return mx > r.u && mx < r.right() && my > r.v && my < r.bottom();
            });
            if (hit) area += (xs[a + 1] - xs[a]) * (ys[b + 1] - ys[b]);
        }
    }
    return area;
}

std::vector<std::uint8_t> erode(const std::vector<std::uint8_t>& bits, std::size_t rows, std::size_t cols,
                                int steps) {
    std::vector<std::uint8_t> cur = bits, next(bits.size());
    for (int s = 0; s < steps; ++s) {
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const auto at = [&](std::size_t rr, std::size_t cc) { return cur[rr * cols + cc]; };
                bool keep = at(r, c) != 0;
                keep = keep && r > 0 && at(r - 1, c) && r + 1 < rows && at(r + 1, c);
                keep = keep && c > 0 && at(r, c - 1) && c + 1 < cols && at(r, c + 1);
                next[r * cols + c] = keep ? 1 : 0;
            }
        }
        std::swap(cur, next);
    }
    return cur;
}

}  // namespace

std::vector<double> frame_visibility(std::span<const BBox> boxes_in) {
    const std::vector<BBox> boxes(boxes_in.begin(), boxes_in.end());
    std::vector<double> vis(boxes.size(), 1.0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        std::vector<BBox> occluders;
        for (std::size_t j = 0; j < boxes.size(); ++j) {
            if (j == i || !nearer(boxes, j, i)) continue;
            if (intersection_area(boxes[i], boxes[j]) > 0.0) occluders.push_back(boxes[j]);
        }
        const double area = boxes[i].area();
        vis[i] = area > 0.0 ? std::clamp(1.0 - covered_area(boxes[i], occluders) / area, 0.0, 1.0) : 0.0;
    }
    return vis;
}

std::vector<FramePacket> degrade(const GtSequence& gt, const DetectorModel& model, std::uint64_t seed) {
    model.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, 1.0);

    std::vector<FramePacket> packets(static_cast<std::size_t>(std::max(0, gt.frames)));
    for (int f = 1; f <= gt.frames; ++f) packets[f - 1].frame = f;

    std::size_t begin = 0;
    while (begin < gt.rows.size()) {
        std::size_t end = begin;
        const int frame = gt.rows[begin].frame;
        while (end < gt.rows.size() && gt.rows[end].frame == frame) ++end;
        if (frame < 1 || frame > gt.frames) throw ScenarioError("GT row outside the sequence");

        std::vector<BBox> boxes;
        for (std::size_t r = begin; r < end; ++r) boxes.push_back(gt.rows[r].bbox);
        const auto vis = frame_visibility(boxes);
        auto& out = packets[frame - 1].detections;

        for (std::size_t i = 0; i < boxes.size(); ++i) {
            const GtRow& row = gt.rows[begin + i];
            const double draw = unit(rng);
            if (vis[i] < model.min_visibility) continue;
            const double p = std::clamp(model.miss_prob_base + model.occlusion_miss_boost * (1.0 - vis[i]), 0.0, 1.0);
            if (draw < p) continue;

            // Mask pixels hidden behind nearer agents are removed, then eroded.
            auto bits = row.mask.decode();
            const std::size_t rows = row.mask.rows, cols = row.mask.cols;
            for (std::size_t j = 0; j < boxes.size(); ++j) {
                if (j == i || !nearer(boxes, j, i) || intersection_area(boxes[i], boxes[j]) <= 0.0) continue;
                for (std::size_t r = 0; r < rows; ++r) {
                    const double y = row.bbox.v + (r + 0.5) * row.bbox.h / rows;
                    for (std::size_t c = 0; c < cols; ++c) {
                        const double x = row.bbox.u + (c + 0.5) * row.bbox.w / cols;
                        if (bits[r * cols + c] && in_ellipse(boxes[j], x, y)) bits[r * cols + c] = 0;
                    }
                }
            }
            if (model.mask_erosion > 0) bits = erode(bits, rows, cols, model.mask_erosion);
            if (std::none_of(bits.begin(), bits.end(), [](auto b) { return b != 0; })) continue;

            Detection d;
            d.frame = frame;
            d.bbox = row.bbox;
            if (model.bbox_jitter_sigma > 0.0) {
                const double sg = model.bbox_jitter_sigma;
                d.bbox.u += sg * jitter(rng);
                d.bbox.v += sg * jitter(rng);
                d.bbox.w = std::max(1.0, d.bbox.w + sg * jitter(rng));
                d.bbox.h = std::max(1.0, d.bbox.h + sg * jitter(rng));
            }
            d.mask = RleMask::encode(bits, rows, cols);
            d.confidence = vis[i];
            out.push_back(std::move(d));
        }
        begin = end;
    }
    return packets;
}

// ---------------------------------------------------------------------------
// Suites

SuiteKind suite_kind_from_string(std::string_view name) {
    if (name == "interaction_heavy") return SuiteKind::interaction_heavy;
    if (name == "occlusion_heavy") return SuiteKind::occlusion_heavy;
    if (name == "density_sweep") return SuiteKind::density_sweep;
    throw std::invalid_argument("unknown suite: " + std::string(name));
}

std::string_view to_string(SuiteKind k) {
    switch (k) {
        case SuiteKind::interaction_heavy: return "interaction_heavy";
        case SuiteKind::occlusion_heavy: return "occlusion_heavy";
        case SuiteKind::density_sweep: return "density_sweep";
    }
    return "?";
}

namespace {

bool clear_of(const std::vector<ScenarioAgent>& agents, const Vec2& p, double radius, double margin) {
    return std::all_of(agents.begin(), agents.end(), [&](const ScenarioAgent& a) {
        return distance(a.spawn, p) >= a.radius + radius + margin;
    });
}

ScenarioSpec interaction_heavy(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScenarioSpec s;
    s.name = "interaction_heavy_" + std::to_string(seed);
    s.seed = seed;
    s.fps = 10.0;
    s.duration_frames = 100;
    s.world_size = {40.0, 30.0};
    s.camera = {20.0, 800, 600};
    s.detector = DetectorModel{0.3, 0.6, 1.0, 0, 0.3};

    // Pairs: a faster follower catches up with its leader from behind and to
    // the side. Once within social distance for tau frames the leader sits in
    // the follower's steering cone, so the pair closes in, merges, and goes on
    // to a shared exit. start_frame is a late backstop; intent normally forms
    // on its own.
    for (int p = 0; p < 8; ++p) {
        const bool rightward = p % 2 == 0;
        const double dir = rightward ? 1.0 : -1.0;
        const double y = 2.5 + 3.4 * p + u(rng);
        const double x0 = rightward ? 2.0 + 3.0 * u(rng) : 38.0 - 3.0 * u(rng);
        const double ahead = 3.2 + 0.5 * u(rng);
        const double lateral = 0.8 + 0.4 * u(rng);
        const double speed = 1.0 + 0.2 * u(rng);
        const double catch_up = 0.35;
        const Vec2 exit{rightward ? 38.5 : 1.5, y + lateral / 2.0};
        ScenarioAgent leader;
        leader.preferred_speed = speed;
        leader.spawn = {x0 + dir * ahead, y};
        leader.goals = {exit};
        ScenarioAgent follower = leader;
        follower.preferred_speed = speed + catch_up;
        follower.spawn = {x0, y + lateral};
        s.agents.push_back(leader);
        s.agents.push_back(follower);
        const double social_long = std::sqrt(std::max(0.0, 9.0 - lateral * lateral));
        const int enter = static_cast<int>(std::ceil((ahead - social_long) / catch_up * s.fps));
        const std::size_t b = s.agents.size() - 2;
        s.interactions.push_back({b, b + 1, enter + s.interaction.tau + 10});
    }
    // Cross traffic: vehicles and pedestrians moving vertically.
    for (int c = 0; c < 4; ++c) {
        ScenarioAgent a;
        const bool vehicle = c % 2 == 1;
        a.type = vehicle ? AgentType::car : AgentType::pedestrian;
        a.radius = vehicle ? 1.0 : 0.3;
        a.preferred_speed = vehicle ? 3.0 + u(rng) : 1.3 + 0.3 * u(rng);
        const double x = 8.0 + 7.0 * c + 2.0 * u(rng);
        const bool down = u(rng) < 0.5;
        a.spawn = {x, down ? 1.5 : 28.5};
        a.goals = {{x + (u(rng) - 0.5) * 4.0, down ? 29.0 : 1.0}};
        a.spawn_frame = 1 + static_cast<int>(30 * u(rng));
        if (!clear_of(s.agents, a.spawn, a.radius, 0.2)) a.spawn.x += 3.0;
        s.agents.push_back(a);
    }
    return s;
}

ScenarioSpec occlusion_heavy(std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScenarioSpec s;
    s.name = "occlusion_heavy_" + std::to_string(seed);
    s.seed = seed;
    s.fps = 30.0;
    s.duration_frames = 240;
    s.world_size = {40.0, 20.0};
    s.camera = {20.0, 800, 400};
    s.detector = DetectorModel{0.05, 0.8, 1.0, 1, 0.25};

    // Two opposing pedestrian lanes a body-width apart in depth, and a slow
    // vehicle lane in front that shadows the far lanes.
    const double lane_y[2] = {9.0, 9.9};
    for (int lane = 0; lane < 2; ++lane) {
        const bool rightward = lane == 0;
        for (int k = 0; k < 6; ++k) {
            ScenarioAgent a;
            a.radius = 0.3;
            a.preferred_speed = 1.1 + 0.4 * u(rng);
            const double x = rightward ? 1.0 + 3.0 * k + u(rng) : 39.0 - 3.0 * k - u(rng);
            const double y = lane_y[lane] + (u(rng) - 0.5) * 0.3;
            a.spawn = {x, y};
            a.goals = {{rightward ? 39.5 : 0.5, y}};
            if (!clear_of(s.agents, a.spawn, a.radius, 0.1)) a.spawn.x += 0.8;
            s.agents.push_back(a);
        }
    }
    for (int k = 0; k < 3; ++k) {
        ScenarioAgent a;
        a.type = AgentType::car;
        a.radius = 1.0;
        a.preferred_speed = 1.0 + 0.6 * u(rng);
        a.spawn = {2.0 + 12.0 * k + 2.0 * u(rng), 11.8};
        a.goals = {{39.0, 11.8}};
        s.agents.push_back(a);
    }
    return s;
}

}  // namespace

ScenarioSpec density_spec(std::uint64_t seed, int n) {
    if (n < 1) throw std::invalid_argument("density_spec: n must be >= 1");
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    ScenarioSpec s;
    s.name = "density_" + std::to_string(n) + "_" + std::to_string(seed);
    s.seed = seed;
    s.fps = 30.0;
    s.duration_frames = 90;
    // Constant density: 16 m^2 per agent, 4:3 world.
    const double area = 16.0 * n;
    const double h = std::sqrt(area * 3.0 / 4.0);
    s.world_size = {h * 4.0 / 3.0, h};
    s.camera.px_per_meter = 10.0;
    s.camera.image_width = static_cast<int>(std::ceil(s.world_size.x * 10.0)) + 1;
    s.camera.image_height = static_cast<int>(std::ceil(s.world_size.y * 10.0)) + 1;
    s.detector = DetectorModel{};
    while (static_cast<int>(s.agents.size()) < n) {
        ScenarioAgent a;
        const bool vehicle = u(rng) < 0.25;
        a.type = vehicle ? AgentType::car : AgentType::pedestrian;
        a.radius = vehicle ? 1.0 : 0.3;
        a.preferred_speed = vehicle ? 2.0 + 2.0 * u(rng) : 1.0 + 0.5 * u(rng);
        a.spawn = {1.0 + (s.world_size.x - 2.0) * u(rng), 1.0 + (s.world_size.y - 2.0) * u(rng)};
        for (int g = 0; g < 3; ++g)
            a.goals.push_back({1.0 + (s.world_size.x - 2.0) * u(rng), 1.0 + (s.world_size.y - 2.0) * u(rng)});
        if (clear_of(s.agents, a.spawn, a.radius, 0.5)) s.agents.push_back(a);
    }
    return s;
}

std::vector<ScenarioSpec> suite(SuiteKind kind, std::span<const std::uint64_t> seeds) {
    if (seeds.empty()) throw std::invalid_argument("suite: no seeds");
    std::vector<ScenarioSpec> out;
    for (std::uint64_t seed : seeds) {
        switch (kind) {
            case SuiteKind::interaction_heavy: out.push_back(interaction_heavy(seed)); break;
            case SuiteKind::occlusion_heavy: out.push_back(occlusion_heavy(seed)); break;
            case SuiteKind::density_sweep:
                for (int n : kDensityCounts) out.push_back(density_spec(seed, n));
                break;
        }
    }
    for (const auto& s : out) s.validate();
    return out;
}

}  // namespace roadtrack
