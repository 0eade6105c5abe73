#include "roadtrack/run_config.hpp"

#include <fstream>
#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "roadtrack/mot_io.hpp"

namespace roadtrack {

namespace {

struct Field {
    std::string key;
    std::function<std::optional<std::string>(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

template <class T>
Field real(std::string key, T RunConfig::*block, double T::*member) {
    return {std::move(key), [=](const RunConfig& c) -> std::optional<std::string> { return format_double(c.*block.*member); },
            [=](RunConfig& c, std::string_view v) { c.*block.*member = parse_double(v); }};
}

Field real_tracker(std::string key, double TrackerConfig::*member) { return real(std::move(key), &RunConfig::tracker, member); }

template <class Sub>
Field real_nested(std::string key, Sub TrackerConfig::*sub, double Sub::*member) {
    return {std::move(key),
            [=](const RunConfig& c) -> std::optional<std::string> { return format_double(c.tracker.*sub.*member); },
            [=](RunConfig& c, std::string_view v) { c.tracker.*sub.*member = parse_double(v); }};
}

template <class Sub, class Int>
Field integer_nested(std::string key, Sub TrackerConfig::*sub, Int Sub::*member) {
    return {std::move(key),
            [=](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.tracker.*sub.*member); },
            [=](RunConfig& c, std::string_view v) {
                const long long x = parse_int(v);
                if (x < 0) throw FormatError("must be >= 0");
                c.tracker.*sub.*member = static_cast<Int>(x);
            }};
}

template <class Sub>
Field per_type(std::string prefix, AgentType t, Sub TrackerConfig::*sub, PerType<double> Sub::*member) {
    return {prefix + "." + std::string(to_string(t)),
            [=](const RunConfig& c) -> std::optional<std::string> { return format_double(at(c.tracker.*sub.*member, t)); },
            [=](RunConfig& c, std::string_view v) { at(c.tracker.*sub.*member, t) = parse_double(v); }};
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw FormatError("expected true/false");
}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = [] {
        constexpr AgentType kTypes[] = {AgentType::pedestrian, AgentType::two_wheeler, AgentType::three_wheeler,
                                        AgentType::car,        AgentType::bus,         AgentType::truck};
        std::vector<Field> f;
        f.push_back({"motion_model",
                     [](const RunConfig& c) -> std::optional<std::string> { return std::string(to_string(c.tracker.motion)); },
                     [](RunConfig& c, std::string_view v) { c.tracker.motion = motion_model_from_string(v); }});
        f.push_back({"seed", [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.seed); },
                     [](RunConfig& c, std::string_view v) {
                         const long long s = parse_int(v);
                         if (s < 0) throw FormatError("seed must be >= 0");
                         c.seed = static_cast<std::uint64_t>(s);
                     }});
        f.push_back({"px_per_meter",
                     [](const RunConfig& c) -> std::optional<std::string> {
                         if (!c.px_per_meter) return std::nullopt;
                         return format_double(*c.px_per_meter);
                     },
                     [](RunConfig& c, std::string_view v) { c.px_per_meter = parse_double(v); }});
        f.push_back({"fps",
                     [](const RunConfig& c) -> std::optional<std::string> {
                         if (!c.fps) return std::nullopt;
                         return format_double(*c.fps);
                     },
                     [](RunConfig& c, std::string_view v) { c.fps = parse_double(v); }});
        f.push_back(real_tracker("velocity_smoothing", &TrackerConfig::velocity_smoothing));
        f.push_back({"coast_output_frames",
                     [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.tracker.coast_output_frames); },
                     [](RunConfig& c, std::string_view v) { c.tracker.coast_output_frames = static_cast<int>(parse_int(v)); }});

        f.push_back(real_nested("time_horizon", &TrackerConfig::orca, &OrcaParams::time_horizon));
        f.push_back(real_nested("reciprocity", &TrackerConfig::orca, &OrcaParams::reciprocity));
        f.push_back(integer_nested("max_neighbors", &TrackerConfig::orca, &OrcaParams::max_neighbors));
        for (AgentType t : kTypes) f.push_back(per_type("max_speed", t, &TrackerConfig::orca, &OrcaParams::max_speed));

        f.push_back(real_nested("social_distance", &TrackerConfig::interaction, &InteractionParams::social_distance));
        f.push_back(real_nested("public_distance", &TrackerConfig::interaction, &InteractionParams::public_distance));
        f.push_back(integer_nested("tau", &TrackerConfig::interaction, &InteractionParams::tau));
        f.push_back(real_nested("personal_margin", &TrackerConfig::interaction, &InteractionParams::personal_margin));
        for (AgentType t : kTypes)
            f.push_back(per_type("steer_half_angle", t, &TrackerConfig::interaction, &InteractionParams::steer_half_angle));
        f.push_back(real_nested("delta_t", &TrackerConfig::interaction, &InteractionParams::delta_t));
        f.push_back(real_nested("epsilon_scale", &TrackerConfig::interaction, &InteractionParams::epsilon_scale));
        f.push_back(real_nested("stationary_speed", &TrackerConfig::interaction, &InteractionParams::stationary_speed));
        f.push_back(integer_nested("max_candidates", &TrackerConfig::interaction, &InteractionParams::max_candidates));
        for (AgentType t : kTypes)
            f.push_back(per_type("preferred_speed", t, &TrackerConfig::interaction, &InteractionParams::preferred_speed));

        f.push_back(real_nested("cosine_threshold", &TrackerConfig::assoc, &AssocConfig::cosine_threshold));
        f.push_back(integer_nested("max_age", &TrackerConfig::assoc, &AssocConfig::max_age));
        f.push_back(real_nested("gating_radius", &TrackerConfig::assoc, &AssocConfig::gating_radius));
        f.push_back(real_nested("lambda1", &TrackerConfig::assoc, &AssocConfig::lambda1));
        f.push_back(real_nested("lambda2", &TrackerConfig::assoc, &AssocConfig::lambda2));
        f.push_back(integer_nested("min_hits_to_confirm", &TrackerConfig::assoc, &AssocConfig::min_hits_to_confirm));
        f.push_back(integer_nested("gallery_size", &TrackerConfig::assoc, &AssocConfig::gallery_size));
        f.push_back(real_nested("score_floor", &TrackerConfig::assoc, &AssocConfig::score_floor));
        f.push_back({"feature_kind",
                     [](const RunConfig& c) -> std::optional<std::string> {
                         return c.tracker.assoc.feature_kind == FeatureKind::mask ? "mask" : "bbox_fill";
                     },
                     [](RunConfig& c, std::string_view v) {
                         if (v == "mask") c.tracker.assoc.feature_kind = FeatureKind::mask;
                         else if (v == "bbox_fill") c.tracker.assoc.feature_kind = FeatureKind::bbox_fill;
                         else throw FormatError("expected mask or bbox_fill");
                     }});
        f.push_back(integer_nested("feature_rows", &TrackerConfig::assoc, &AssocConfig::feature_rows));
        f.push_back(integer_nested("feature_cols", &TrackerConfig::assoc, &AssocConfig::feature_cols));

        f.push_back(real("iou_match_threshold", &RunConfig::eval, &EvalConfig::iou_match_threshold));
        f.push_back({"count_fp",
                     [](const RunConfig& c) -> std::optional<std::string> { return c.eval.count_fp ? "true" : "false"; },
                     [](RunConfig& c, std::string_view v) { c.eval.count_fp = parse_bool(v); }});
        f.push_back(real("mt_fraction", &RunConfig::eval, &EvalConfig::mt_fraction));
        f.push_back(real("ml_fraction", &RunConfig::eval, &EvalConfig::ml_fraction));

        f.push_back(real("miss_prob_base", &RunConfig::detector, &DetectorModel::miss_prob_base));
        f.push_back(real("occlusion_miss_boost", &RunConfig::detector, &DetectorModel::occlusion_miss_boost));
        f.push_back(real("bbox_jitter_sigma", &RunConfig::detector, &DetectorModel::bbox_jitter_sigma));
        f.push_back({"mask_erosion",
                     [](const RunConfig& c) -> std::optional<std::string> { return std::to_string(c.detector.mask_erosion); },
                     [](RunConfig& c, std::string_view v) { c.detector.mask_erosion = static_cast<int>(parse_int(v)); }});
        f.push_back(real("min_visibility", &RunConfig::detector, &DetectorModel::min_visibility));
        return f;
    }();
    return table;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& f : fields()) {
        if (auto v = f.get(*this)) out += f.key + "=" + *v + "\n";
    }
    return out;
}

TrackerConfig RunConfig::resolved(std::optional<double> header_px_per_meter, std::optional<double> header_fps) const {
    TrackerConfig t = tracker;
    if (px_per_meter) t.px_per_meter = *px_per_meter;
    else if (header_px_per_meter) t.px_per_meter = *header_px_per_meter;
    const std::optional<double> rate = fps ? fps : header_fps;
    if (rate) {
        if (!(*rate > 0.0)) throw std::invalid_argument("fps must be positive");
        t.orca.dt = 1.0 / *rate;
    }
    t.validate();
    return t;
}

std::vector<std::string> run_config_keys() {
    std::vector<std::string> keys;
    for (const auto& f : fields()) keys.push_back(f.key);
    return keys;
}

RunConfig parse_run_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto where = "config line " + std::to_string(lineno) + ": ";
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument(where + "expected key=value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& table = fields();
        const auto it = std::find_if(table.begin(), table.end(), [&](const Field& f) { return f.key == key; });
        if (it == table.end()) throw std::invalid_argument(where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw std::invalid_argument(where + "duplicate key '" + key + "'");
        try {
            it->set(cfg, value);
        } catch (const std::exception& e) {
            throw std::invalid_argument(where + key + ": " + e.what());
        }
    }
    try {
        cfg.tracker.validate();
        cfg.eval.validate();
        cfg.detector.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

}  // namespace roadtrack
