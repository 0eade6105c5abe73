#include "roadtrack/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <thread>

namespace roadtrack {

// ---------------------------------------------------------------------------
// RLE masks

RleMask RleMask::encode(std::span<const std::uint8_t> bits, std::size_t rows, std::size_t cols) {
    if (bits.size() != rows * cols) throw std::invalid_argument("RleMask::encode: size mismatch");
    RleMask m{rows, cols, {}};
    std::uint8_t current = 0;
    std::uint32_t run = 0;
    for (std::uint8_t b : bits) {
        const std::uint8_t v = b ? 1 : 0;
        if (v != current) {
            m.runs.push_back(run);
            run = 0;
            current = v;
        }
        ++run;
    }
    m.runs.push_back(run);
    return m;
}

std::vector<std::uint8_t> RleMask::decode() const {
    validate();
    std::vector<std::uint8_t> bits;
    bits.reserve(rows * cols);
    std::uint8_t v = 0;
    for (std::uint32_t r : runs) {
        bits.insert(bits.end(), r, v);
        v ^= 1;
    }
    return bits;
}

std::size_t RleMask::count_ones() const {
    std::size_t n = 0;
    for (std::size_t i = 1; i < runs.size(); i += 2) n += runs[i];
    return n;
}

void RleMask::validate() const {
    const std::size_t total = std::accumulate(runs.begin(), runs.end(), std::size_t{0});
    if (total != rows * cols) {
        throw std::invalid_argument("RleMask: runs sum to " + std::to_string(total) +
                                    ", expected " + std::to_string(rows * cols));
    }
}

// ---------------------------------------------------------------------------
// Features

std::size_t BinaryFeature::ones() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

BinaryFeature feature_from_detection(const Detection& d, FeatureKind kind, std::size_t rows,
                                     std::size_t cols) {
    if (rows == 0 || cols == 0) throw FeatureError("feature grid must be non-empty");
    if (!d.bbox.valid()) throw FeatureError("feature_from_detection: invalid bbox");

    std::vector<std::uint8_t> mask_bits;
    if (kind == FeatureKind::mask) {
        if (!d.mask) throw FeatureError("feature_from_detection: mask feature needs a mask");
        if (d.mask->count_ones() == 0) throw FeatureError("feature_from_detection: empty mask");
        mask_bits = d.mask->decode();
    }

    // Letterbox: cells are square, the box keeps its aspect ratio.
    std::size_t region_w = cols;
    std::size_t region_h = rows;
    const double box_aspect = d.bbox.w / d.bbox.h;
    const double grid_aspect = static_cast<double>(cols) / static_cast<double>(rows);
    if (box_aspect >= grid_aspect) {
        region_h = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::lround(static_cast<double>(cols) / box_aspect)), 1, rows);
    } else {
        region_w = std::clamp<std::size_t>(
            static_cast<std::size_t>(std::lround(static_cast<double>(rows) * box_aspect)), 1, cols);
    }
    const std::size_t r0 = (rows - region_h) / 2;
    const std::size_t c0 = (cols - region_w) / 2;

    BinaryFeature f{std::vector<std::uint8_t>(rows * cols, 0), rows, cols, kind};
    for (std::size_t r = 0; r < region_h; ++r) {
        for (std::size_t c = 0; c < region_w; ++c) {
            std::uint8_t bit = 1;
            if (kind == FeatureKind::mask) {
                const double fy = (static_cast<double>(r) + 0.5) / static_cast<double>(region_h);
                const double fx = (static_cast<double>(c) + 0.5) / static_cast<double>(region_w);
                const auto mr = std::min(d.mask->rows - 1,
                                         static_cast<std::size_t>(fy * static_cast<double>(d.mask->rows)));
                const auto mc = std::min(d.mask->cols - 1,
                                         static_cast<std::size_t>(fx * static_cast<double>(d.mask->cols)));
                bit = mask_bits[mr * d.mask->cols + mc];
            }
            f.bits[(r0 + r) * cols + (c0 + c)] = bit;
        }
    }

    if (kind == FeatureKind::mask && f.ones() == 0) {
        // Mask thinner than one cell: keep the cell under the mask centroid.
        double sr = 0.0, sc = 0.0, n = 0.0;
        for (std::size_t i = 0; i < mask_bits.size(); ++i) {
            if (!mask_bits[i]) continue;
            sr += static_cast<double>(i / d.mask->cols) + 0.5;
            sc += static_cast<double>(i % d.mask->cols) + 0.5;
            n += 1.0;
        }
        const auto r = std::min(region_h - 1, static_cast<std::size_t>(sr / n / static_cast<double>(d.mask->rows) *
                                                                       static_cast<double>(region_h)));
        const auto c = std::min(region_w - 1, static_cast<std::size_t>(sc / n / static_cast<double>(d.mask->cols) *
                                                                       static_cast<double>(region_w)));
        f.bits[(r0 + r) * cols + (c0 + c)] = 1;
    }
    return f;
}

std::pair<BinaryFeature, BinaryFeature> pad_pair(const BinaryFeature& a, const BinaryFeature& b) {
    const std::size_t rows = std::max(a.rows, b.rows);
    const std::size_t cols = std::max(a.cols, b.cols);
    auto pad = [&](const BinaryFeature& f) {
        if (f.rows == rows && f.cols == cols) return f;
        BinaryFeature out{std::vector<std::uint8_t>(rows * cols, 0), rows, cols, f.kind};
        for (std::size_t r = 0; r < f.rows; ++r) {
            std::copy_n(f.bits.begin() + static_cast<std::ptrdiff_t>(r * f.cols), f.cols,
                        out.bits.begin() + static_cast<std::ptrdiff_t>(r * cols));
        }
        return out;
    };
    return {pad(a), pad(b)};
}

double cosine_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw FeatureError("cosine_distance: length mismatch (pad first)");
    std::size_t na = 0, nb = 0, both = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a[i] != 0;
        const bool y = b[i] != 0;
        na += x;
        nb += y;
        both += x && y;
    }
    if (na == 0 || nb == 0) throw FeatureError("cosine_distance: zero vector");
    const double sim = static_cast<double>(both) /
                       std::sqrt(static_cast<double>(na) * static_cast<double>(nb));
    return std::clamp(1.0 - sim, 0.0, 1.0);
}

double cosine_distance(const BinaryFeature& a, const BinaryFeature& b) {
    return cosine_distance(std::span<const std::uint8_t>(a.bits), std::span<const std::uint8_t>(b.bits));
}

// ---------------------------------------------------------------------------
// Counting quantities

std::vector<std::int8_t> delta(std::span<const std::uint8_t> f_mask,
                               std::span<const std::uint8_t> f_box) {
    if (f_mask.size() != f_box.size()) throw FeatureError("delta: length mismatch");
    std::vector<std::int8_t> d(f_mask.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = static_cast<std::int8_t>((f_mask[i] ? 1 : 0) - (f_box[i] ? 1 : 0));
    }
    return d;
}

DeltaStats delta_stats(std::span<const std::uint8_t> f_mask, std::span<const std::uint8_t> f_box) {
    if (f_mask.size() != f_box.size()) throw FeatureError("delta_stats: length mismatch");
    DeltaStats s;
    for (std::size_t i = 0; i < f_mask.size(); ++i) {
        const int m = f_mask[i] ? 1 : 0;
        const int f = f_box[i] ? 1 : 0;
        s.x += static_cast<std::size_t>(m);
        s.y += static_cast<std::size_t>(f);
        if (m - f == 1) ++s.c1;
        if (m - f == -1) ++s.c2;
    }
    return s;
}

std::pair<std::size_t, std::size_t> pa_pb(std::span<const std::uint8_t> f_track,
                                          std::span<const std::int8_t> d) {
    if (f_track.size() != d.size()) throw FeatureError("pa_pb: length mismatch");
    std::size_t pa = 0, pb = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!f_track[i]) continue;
        if (d[i] == 1) ++pa;
        if (d[i] == -1) ++pb;
    }
    return {pa, pb};
}

// ---------------------------------------------------------------------------
// Monte-Carlo

namespace {

constexpr std::size_t kMonteCarloWorkers = 8;

std::mt19937_64 worker_rng(std::uint64_t seed, std::size_t worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(worker)};
    return std::mt19937_64(seq);
}

}  // namespace

double analytic_uniform_prob(std::size_t c1, std::size_t c2) {
    return 1.0 - static_cast<double>(c2) / (2.0 * static_cast<double>(c1));
}

double count_bound_prob(std::size_t c1, std::size_t c2) {
    return 1.0 - static_cast<double>(c2) / static_cast<double>(c1);
}

double estimate_prob_pa_gt_pb(std::size_t c1, std::size_t c2, std::size_t trials,
                              std::uint64_t seed) {
    if (c1 <= c2) throw std::invalid_argument("estimate_prob_pa_gt_pb: requires c1 > c2");
    if (trials < 10000) throw std::invalid_argument("estimate_prob_pa_gt_pb: requires trials >= 10^4");

    std::vector<std::size_t> hits(kMonteCarloWorkers, 0);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < kMonteCarloWorkers; ++w) {
        const std::size_t begin = trials * w / kMonteCarloWorkers;
        const std::size_t end = trials * (w + 1) / kMonteCarloWorkers;
        pool.emplace_back([&, w, begin, end] {
            auto rng = worker_rng(seed, w);
            std::uniform_real_distribution<double> ua(0.0, static_cast<double>(c1));
            std::uniform_real_distribution<double> ub(0.0, c2 > 0 ? static_cast<double>(c2) : 1.0);
            std::size_t local = 0;
            for (std::size_t t = begin; t < end; ++t) {
                const double pa = ua(rng);
                const double pb = c2 > 0 ? ub(rng) : 0.0;
                local += pa > pb;
            }
            hits[w] = local;
        });
    }
    for (auto& t : pool) t.join();
    const std::size_t total = std::accumulate(hits.begin(), hits.end(), std::size_t{0});
    return static_cast<double>(total) / static_cast<double>(trials);
}

OrderingReport verify_feature_ordering(std::size_t trials, std::size_t vector_len, std::uint64_t seed) {
    if (vector_len < 2) throw std::invalid_argument("verify_feature_ordering: vector_len must be >= 2");
    OrderingReport report;
    report.trials = trials;
    report.vector_len = vector_len;

    std::mt19937_64 rng = worker_rng(seed, 0);
    std::uniform_real_distribution<double> density(0.2, 0.8);
    std::vector<std::uint8_t> fpi(vector_len), fm(vector_len), ff(vector_len);
    auto fill = [&](std::vector<std::uint8_t>& v, double p) {
        std::bernoulli_distribution bit(p);
        std::size_t n = 0;
        for (auto& b : v) n += (b = bit(rng) ? 1 : 0);
        return n;
    };

    std::map<std::pair<std::size_t, std::size_t>, OrderingCell> cells;
    for (std::size_t t = 0; t < trials; ++t) {
        while (fill(fpi, density(rng)) == 0) {}
        std::size_t x = 0, y = 0;
        do {
            x = fill(fm, density(rng));
            y = fill(ff, density(rng));
        } while (!(x > y && y > 0));

        const bool smaller = cosine_distance(fpi, fm) < cosine_distance(fpi, ff);
        const auto d = delta(fm, ff);
        const auto [pa, pb] = pa_pb(fpi, d);
        const DeltaStats s = delta_stats(fm, ff);

        report.distance_smaller += smaller;
        report.dot_positive += pa > pb;
        auto& cell = cells[{s.c1, s.c2}];
        cell.c1 = s.c1;
        cell.c2 = s.c2;
        ++cell.samples;
        cell.pa_gt_pb += pa > pb;
        cell.distance_smaller += smaller;
    }
    for (auto& [key, cell] : cells) report.cells.push_back(cell);
    return report;
}

}  // namespace roadtrack
