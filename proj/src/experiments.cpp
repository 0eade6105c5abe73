#include "roadtrack/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

#include "roadtrack/mot_io.hpp"

namespace roadtrack {

SequenceData generate(const ScenarioSpec& spec, std::uint64_t detector_seed) {
    SequenceData d;
    d.spec = spec;
    d.gt = simulate(spec);
    d.packets = degrade(d.gt, spec.detector.value_or(DetectorModel{}), detector_seed);
    return d;
}

std::vector<GroundTruthEntry> gt_entries(const GtSequence& gt) {
    std::vector<GroundTruthEntry> out;
    out.reserve(gt.rows.size());
    for (const auto& r : gt.rows) out.push_back({r.frame, r.gt_id, r.bbox, r.type, r.stationary, 1.0});
    return out;
}

std::vector<HypothesisEntry> hyp_entries(std::span<const OutputRow> rows) {
    std::vector<HypothesisEntry> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({r.frame, static_cast<int>(r.id), r.bbox});
    return out;
}

TrackerConfig config_for(const GtSequence& gt, const TrackerConfig& base) {
    TrackerConfig c = base;
    c.px_per_meter = gt.px_per_meter;
    c.orca.dt = 1.0 / gt.fps;
    return c;
}

namespace {

double tracking_fps(const RunResult& r) {
    const double total_us = std::accumulate(r.frame_us.begin(), r.frame_us.end(), 0.0);
    return total_us > 0.0 ? 1e6 * static_cast<double>(r.frame_us.size()) / total_us : 0.0;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

}  // namespace

std::vector<AblationRow> run_ablation(SuiteKind kind, std::span<const std::uint64_t> seeds, const RunConfig& cfg) {
    std::vector<AblationRow> rows;
    for (const auto& spec : suite(kind, seeds)) {
        const SequenceData data = generate(spec, spec.seed);
        const auto gt = gt_entries(data.gt);
        for (auto model : {MotionModelKind::constant_velocity, MotionModelKind::rvo_only, MotionModelKind::simcai}) {
            TrackerConfig tc = config_for(data.gt, cfg.tracker);
            tc.motion = model;
            const RunResult res = run(data.packets, tc);
            rows.push_back({spec.seed, model, evaluate(gt, hyp_entries(res.rows), cfg.eval), tracking_fps(res)});
        }
    }
    return rows;
}

std::string ablation_csv(std::span<const AblationRow> rows) {
    std::string out = "seed,model,mota,motp_pct,mt_pct,ml_pct,ids,fn,fp,gt\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%llu,%s,%.6f,%.2f,%.2f,%.2f,%d,%d,%d,%d\n",
                      static_cast<unsigned long long>(r.seed), std::string(to_string(r.model)).c_str(), r.report.mota,
                      r.report.motp, r.report.mt_pct, r.report.ml_pct, r.report.ids, r.report.fn, r.report.fp,
                      r.report.gt);
        out += buf;
    }
    return out;
}

std::vector<FeatureRow> run_feature_comparison(SuiteKind kind, std::span<const std::uint64_t> seeds,
                                               const RunConfig& cfg) {
    std::vector<FeatureRow> rows;
    for (const auto& spec : suite(kind, seeds)) {
        const SequenceData data = generate(spec, spec.seed);
        const auto gt = gt_entries(data.gt);
        for (auto fk : {FeatureKind::mask, FeatureKind::bbox_fill}) {
            TrackerConfig tc = config_for(data.gt, cfg.tracker);
            tc.assoc.feature_kind = fk;
            const RunResult res = run(data.packets, tc);
            FeatureRow row;
            row.seed = spec.seed;
            row.kind = fk;
            row.report = evaluate(gt, hyp_entries(res.rows), cfg.eval);
            row.lost_tracks = res.stats.lost_tracks;
            row.rejection_rate = res.stats.tracks_with_candidates
                                     ? static_cast<double>(res.stats.rejected_by_cosine) /
                                           static_cast<double>(res.stats.tracks_with_candidates)
                                     : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: x has no spread");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

std::vector<BenchRow> run_bench(std::span<const std::uint64_t> seeds, const RunConfig& cfg) {
    std::map<int, std::vector<double>> total, solver;
    for (const auto& spec : suite(SuiteKind::density_sweep, seeds)) {
        const SequenceData data = generate(spec, spec.seed);
        const RunResult res = run(data.packets, config_for(data.gt, cfg.tracker));
        const int n = static_cast<int>(spec.agents.size());
        total[n].insert(total[n].end(), res.frame_us.begin(), res.frame_us.end());
        solver[n].insert(solver[n].end(), res.predict_us.begin(), res.predict_us.end());
    }
    std::vector<BenchRow> rows;
    for (const auto& [n, t] : total) {
        const auto& s = solver[n];
        rows.push_back({n, std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size()),
                        std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size()), median(t)});
    }
    return rows;
}

std::string bench_csv(std::span<const BenchRow> rows) {
    std::string out = "n,mean_us_per_frame,mean_solver_us_per_frame,median_us_per_frame\n";
    std::vector<double> x, y;
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + format_double(r.mean_us_per_frame) + "," +
               format_double(r.mean_solver_us_per_frame) + "," + format_double(r.median_us_per_frame) + "\n";
        x.push_back(r.n);
        y.push_back(r.mean_solver_us_per_frame);
    }
    if (rows.size() >= 2) out += "r2," + format_double(linear_fit(x, y).r2) + "\n";
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
        if (tok.empty()) continue;
        const std::size_t dash = tok.find('-');
        if (dash == std::string::npos) {
            out.push_back(static_cast<std::uint64_t>(parse_int(tok)));
        } else {
            const long long a = parse_int(tok.substr(0, dash)), b = parse_int(tok.substr(dash + 1));
            if (a < 0 || b < a) throw std::invalid_argument("bad seed range '" + tok + "'");
            for (long long s = a; s <= b; ++s) out.push_back(static_cast<std::uint64_t>(s));
        }
    }
    if (out.empty()) throw std::invalid_argument("empty seed list");
    return out;
}

}  // namespace roadtrack
