#include "roadtrack/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <tuple>

#include "roadtrack/hungarian.hpp"

namespace roadtrack {

void EvalConfig::validate() const {
    if (!(iou_match_threshold > 0.0 && iou_match_threshold <= 1.0))
        throw std::invalid_argument("iou_match_threshold must lie in (0, 1]");
    if (!(ml_fraction > 0.0 && ml_fraction < mt_fraction && mt_fraction <= 1.0))
        throw std::invalid_argument("need 0 < ml_fraction < mt_fraction <= 1");
}

FrameMatch match_frame(std::span<const GroundTruthEntry> gt, std::span<const HypothesisEntry> hyp,
                       const EvalConfig& cfg, const std::map<int, int>& previous) {
    FrameMatch fm;
    if (!gt.empty()) fm.frame = gt.front().frame;
    else if (!hyp.empty()) fm.frame = hyp.front().frame;

    std::vector<const GroundTruthEntry*> counted;
    std::vector<const GroundTruthEntry*> ignored;
    for (const auto& g : gt) (g.stationary ? ignored : counted).push_back(&g);
    std::sort(counted.begin(), counted.end(),
              [](auto* a, auto* b) { return a->gt_id < b->gt_id; });
    for (auto* g : counted) fm.gt_ids.push_back(g->gt_id);

    std::vector<bool> gt_used(counted.size(), false);
    std::vector<bool> hyp_used(hyp.size(), false);
    const double thr = cfg.iou_match_threshold;

    auto add = [&](std::size_t gi, std::size_t hi) {
        gt_used[gi] = true;
        hyp_used[hi] = true;
        fm.matches.emplace_back(counted[gi]->gt_id, hyp[hi].id);
        fm.ious.push_back(iou(counted[gi]->bbox, hyp[hi].bbox));
    };

    for (std::size_t gi = 0; gi < counted.size(); ++gi) {
        const auto it = previous.find(counted[gi]->gt_id);
        if (it == previous.end()) continue;
        for (std::size_t hi = 0; hi < hyp.size(); ++hi) {
            if (hyp_used[hi] || hyp[hi].id != it->second) continue;
            if (iou(counted[gi]->bbox, hyp[hi].bbox) >= thr) add(gi, hi);
            break;
        }
    }

    ScoreMatrix scores(counted.size(), hyp.size(), kForbidden);
    for (std::size_t gi = 0; gi < counted.size(); ++gi) {
        if (gt_used[gi]) continue;
        for (std::size_t hi = 0; hi < hyp.size(); ++hi) {
            if (hyp_used[hi]) continue;
            const double o = iou(counted[gi]->bbox, hyp[hi].bbox);
            if (o >= thr) scores(gi, hi) = o;
        }
    }
    for (const auto& [gi, hi] : hungarian(scores).pairs) add(gi, hi);

    fm.fn = static_cast<int>(std::count(gt_used.begin(), gt_used.end(), false));
    for (std::size_t hi = 0; hi < hyp.size(); ++hi) {
        if (hyp_used[hi]) continue;
        const bool on_ignored = std::any_of(ignored.begin(), ignored.end(), [&](auto* g) {
            return iou(g->bbox, hyp[hi].bbox) >= thr;
        });
        if (!on_ignored) ++fm.fp;
    }
    return fm;
}

int ids_count(std::span<const int> matched_hyp_ids) {
    int n = 0;
    for (std::size_t i = 1; i < matched_hyp_ids.size(); ++i)
        if (matched_hyp_ids[i] != matched_hyp_ids[i - 1]) ++n;
    return n;
}

std::pair<double, double> mt_ml(std::span<const double> coverage, const EvalConfig& cfg) {
    if (coverage.empty()) return {0.0, 0.0};
    std::size_t mt = 0, ml = 0;
    for (double c : coverage) {
        if (c >= cfg.mt_fraction) ++mt;
        if (c <= cfg.ml_fraction) ++ml;
    }
    const double n = static_cast<double>(coverage.size());
    return {100.0 * mt / n, 100.0 * ml / n};
}

MetricsReport accumulate(std::span<const FrameMatch> frames, const EvalConfig& cfg) {
    MetricsReport r;
    std::map<int, std::vector<int>> history;  // gt_id -> matched hyp ids in frame order
    std::map<int, int> present;               // gt_id -> frames present
    double iou_sum = 0.0;
    for (const auto& f : frames) {
        r.gt += static_cast<int>(f.gt_ids.size());
        r.fn += f.fn;
        r.fp += f.fp;
        r.matched += static_cast<int>(f.matches.size());
        for (double o : f.ious) iou_sum += o;

        std::set<int> matched_gt;
        for (const auto& [g, h] : f.matches) {
            matched_gt.insert(g);
            history[g].push_back(h);
        }
        for (int g : f.gt_ids) {
            ++present[g];
            if (!matched_gt.contains(g)) ++r.fn_per_agent;
        }
    }
    if (r.gt == 0) throw std::invalid_argument("accumulate: no ground-truth rows");
    if (r.fn != r.fn_per_agent) throw std::logic_error("accumulate: FN counts disagree");

    std::vector<double> coverage;
    for (const auto& [g, n] : present) {
        const auto it = history.find(g);
        const std::size_t m = it == history.end() ? 0 : it->second.size();
        coverage.push_back(static_cast<double>(m) / n);
        if (it != history.end()) r.ids += ids_count(it->second);
    }
    r.trajectories = static_cast<int>(coverage.size());
    std::tie(r.mt_pct, r.ml_pct) = mt_ml(coverage, cfg);
    const int errors = r.fn + (cfg.count_fp ? r.fp : 0) + r.ids;
    r.mota = 1.0 - static_cast<double>(errors) / r.gt;
    r.motp = r.matched > 0 ? 100.0 * iou_sum / r.matched : 0.0;
    return r;
}

MetricsReport evaluate(std::span<const GroundTruthEntry> gt, std::span<const HypothesisEntry> hyp,
                       const EvalConfig& cfg) {
    cfg.validate();
    std::map<int, std::pair<std::vector<GroundTruthEntry>, std::vector<HypothesisEntry>>> by_frame;
    for (const auto& g : gt) by_frame[g.frame].first.push_back(g);
    for (const auto& h : hyp) by_frame[h.frame].second.push_back(h);

    std::vector<FrameMatch> frames;
    frames.reserve(by_frame.size());
    std::map<int, int> previous;
    for (auto& [frame, rows] : by_frame) {
        FrameMatch fm = match_frame(rows.first, rows.second, cfg, previous);
        fm.frame = frame;
        for (const auto& [g, h] : fm.matches) previous[g] = h;
        frames.push_back(std::move(fm));
    }
    return accumulate(frames, cfg);
}

std::string report_csv(const MetricsReport& r, double fps) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "fps,mt_pct,ml_pct,ids,fn,motp_pct,mota\n%.2f,%.2f,%.2f,%d,%d,%.2f,%.6f\n",
                  fps, r.mt_pct, r.ml_pct, r.ids, r.fn, r.motp, r.mota);
    return buf;
}

}  // namespace roadtrack
