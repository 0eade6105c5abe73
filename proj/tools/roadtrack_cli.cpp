#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "roadtrack/experiments.hpp"
#include "roadtrack/features.hpp"
#include "roadtrack/metrics.hpp"
#include "roadtrack/mot_io.hpp"
#include "roadtrack/run_config.hpp"
#include "roadtrack/scenario.hpp"
#include "roadtrack/tracker.hpp"

using namespace roadtrack;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

MotFile load_mot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return read_mot(in);
    } catch (const FormatError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

RunConfig config_or_default(const std::string& path) {
    return path.empty() ? RunConfig{} : load_run_config(path);
}

int cmd_simulate(const std::string& spec_path, const std::string& gt_path, const std::string& det_path,
                 const std::string& mask_path, std::optional<std::uint64_t> seed) {
    const ScenarioSpec spec = spec_from_json_text(read_file(spec_path));
    const SequenceData data = generate(spec, seed.value_or(spec.seed));
    {
        auto out = open_out(gt_path);
        write_mot(out, gt_to_mot(data.gt));
    }
    const auto [det, masks] = detections_to_mot(data.packets, data.gt);
    {
        auto out = open_out(det_path);
        write_mot(out, det);
    }
    auto out = open_out(mask_path);
    write_masks(out, masks);
    return 0;
}

int cmd_track(const std::string& det_path, const std::string& mask_path, const std::string& config_path,
              const std::string& out_path, const std::string& timing_path) {
    const RunConfig cfg = config_or_default(config_path);
    const MotFile det = load_mot(det_path);
    const TrackerConfig tc = cfg.resolved(det.header_double("px_per_meter"), det.header_double("fps"));

    std::vector<MaskRow> masks;
    const bool need_masks = tc.assoc.feature_kind == FeatureKind::mask && !det.rows.empty();
    if (need_masks && mask_path.empty()) throw std::runtime_error("feature_kind=mask needs --mask");
    if (!mask_path.empty()) {
        std::ifstream in(mask_path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + mask_path);
        masks = read_masks(in);
    }
    const auto packets = mot_to_packets(det, mask_path.empty() ? nullptr : &masks);
    const RunResult res = run(packets, tc);

    std::map<std::string, std::string> header;
    for (const char* key : {"fps", "frames", "image_height", "image_width", "px_per_meter"}) {
        if (auto it = det.header.find(key); it != det.header.end()) header[key] = it->second;
    }
    {
        auto out = open_out(out_path);
        write_mot(out, tracks_to_mot(res.rows, header));
    }
    if (!timing_path.empty()) {
        auto out = open_out(timing_path);
        out << "frame,us,solver_us\n";
        for (std::size_t i = 0; i < res.frames.size(); ++i)
            out << res.frames[i] << ',' << format_double(res.frame_us[i]) << ',' << format_double(res.predict_us[i])
                << '\n';
    }
    return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& hyp_path, const std::string& config_path,
             const std::string& out_path) {
    const RunConfig cfg = config_or_default(config_path);
    const MotFile gt = load_mot(gt_path);
    const MotFile hyp = load_mot(hyp_path);
    const MetricsReport r = evaluate(mot_to_gt(gt), mot_to_hyp(hyp), cfg.eval);
    const double fps = cfg.fps.value_or(gt.header_double("fps").value_or(0.0));
    auto out = open_out(out_path);
    out << report_csv(r, fps);
    return 0;
}

int cmd_ablate(const std::string& suite_name, const std::string& seeds, const std::string& config_path,
               const std::string& out_path) {
    const RunConfig cfg = config_or_default(config_path);
    const auto rows = run_ablation(suite_kind_from_string(suite_name), parse_seed_list(seeds), cfg);
    auto out = open_out(out_path);
    out << "# ground truth is generated by the interaction model itself; baselines carry model mismatch\n";
    out << ablation_csv(rows);
    return 0;
}

int cmd_verify_appendix(std::size_t trials, std::uint64_t seed, const std::string& out_path) {
    auto out = open_out(out_path);
    out << "c1,c2,empirical_p,bound,analytic_uniform\n";
    for (std::size_t c1 = 2; c1 <= 10; ++c1) {
        for (std::size_t c2 = 0; c2 < c1; ++c2) {
            const double p = estimate_prob_pa_gt_pb(c1, c2, trials, seed + 131 * c1 + c2);
            out << c1 << ',' << c2 << ',' << format_double(p) << ',' << format_double(count_bound_prob(c1, c2))
                << ',' << format_double(analytic_uniform_prob(c1, c2)) << '\n';
        }
    }
    return 0;
}

int cmd_bench(const std::string& suite_name, const std::string& seeds, const std::string& config_path,
              const std::string& out_path) {
    if (suite_kind_from_string(suite_name) != SuiteKind::density_sweep)
        throw std::runtime_error("bench supports --suite density_sweep only");
    const RunConfig cfg = config_or_default(config_path);
    const auto rows = run_bench(parse_seed_list(seeds), cfg);
    auto out = open_out(out_path);
    out << bench_csv(rows);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"roadtrack: interaction-aware multi-agent tracking by detection"};
    app.require_subcommand(1);

    std::string spec, gt, det, mask, out, config, timing, hyp, suite_name, seeds = "1-20";
    std::uint64_t seed_value = 0;
    std::size_t trials = 100000;

    auto* sim = app.add_subcommand("simulate", "generate ground truth and degraded detections");
    sim->add_option("--spec", spec, "scenario JSON")->required();
    sim->add_option("--out-gt", gt, "ground-truth MOT file")->required();
    sim->add_option("--out-det", det, "detection MOT file")->required();
    sim->add_option("--out-mask", mask, "mask sidecar file")->required();
    auto* sim_seed = sim->add_option("--seed", seed_value, "detector seed (default: spec seed)");

    auto* trk = app.add_subcommand("track", "run the tracker over a detection file");
    trk->add_option("--det", det, "detection MOT file")->required();
    trk->add_option("--mask", mask, "mask sidecar file");
    trk->add_option("--config", config, "key=value run config");
    trk->add_option("--out", out, "track MOT file")->required();
    trk->add_option("--timing", timing, "per-frame timing CSV");

    auto* ev = app.add_subcommand("eval", "CLEAR-MOT metrics of a track file");
    ev->add_option("--gt", gt, "ground-truth MOT file")->required();
    ev->add_option("--hyp", hyp, "track MOT file")->required();
    ev->add_option("--config", config, "key=value run config");
    ev->add_option("--out", out, "report CSV")->required();

    auto* abl = app.add_subcommand("ablate", "compare motion models on a scenario suite");
    abl->add_option("--suite", suite_name, "interaction_heavy | occlusion_heavy | density_sweep")->required();
    abl->add_option("--seeds", seeds, "seed list, e.g. 1-20 or 1,4,9");
    abl->add_option("--config", config, "key=value run config");
    abl->add_option("--out", out, "CSV")->required();

    auto* ver = app.add_subcommand("verify-appendix", "Monte-Carlo check of the feature-count bound");
    ver->add_option("--trials", trials, "trials per (c1, c2)");
    ver->add_option("--seed", seed_value, "base seed");
    ver->add_option("--out", out, "CSV")->required();

    auto* bench = app.add_subcommand("bench", "per-frame tracking time versus agent count");
    bench->add_option("--suite", suite_name, "density_sweep")->required();
    bench->add_option("--seeds", seeds, "seed list");
    bench->add_option("--config", config, "key=value run config");
    bench->add_option("--out", out, "CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            std::optional<std::uint64_t> s;
            if (*sim_seed) s = seed_value;
            return cmd_simulate(spec, gt, det, mask, s);
        }
        if (*trk) return cmd_track(det, mask, config, out, timing);
        if (*ev) return cmd_eval(gt, hyp, config, out);
        if (*abl) return cmd_ablate(suite_name, seeds, config, out);
        if (*ver) return cmd_verify_appendix(trials, seed_value, out);
        if (*bench) return cmd_bench(suite_name, seeds, config, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
