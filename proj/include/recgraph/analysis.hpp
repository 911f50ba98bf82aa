#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "recgraph/core.hpp"
#include "recgraph/errors.hpp"
#include "recgraph/scoring.hpp"

namespace recgraph {

/// Box statistics for one metric at one depth. Values are the transformed
/// (log10(x+1)) observations for engagement metrics.
struct DepthAggregate {
    int depth = 0;
    std::string metric;
    std::size_t n = 0;
    double mean = 0;
    double median = 0;
    double q1 = 0;
    double q3 = 0;
    double whisker_lo = 0;  // Tukey: most extreme point within 1.5*IQR
    double whisker_hi = 0;
    std::size_t outlier_count = 0;
};

enum class TrendDirection { Increasing, Decreasing, Flat };

inline const char* to_string(TrendDirection d) {
    switch (d) {
        case TrendDirection::Increasing: return "increasing";
        case TrendDirection::Decreasing: return "decreasing";
        case TrendDirection::Flat: return "flat";
    }
    return "?";
}

struct TrendSummary {
    std::string metric;
    std::optional<TextChannel> channel;
    double slope_per_depth = 0;
    double spearman_rho = 0;
    TrendDirection direction = TrendDirection::Flat;
};

inline constexpr double kFlatRhoThreshold = 0.3;

namespace analysis_detail {

inline double quantile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0;
    double pos = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = static_cast<std::size_t>(std::ceil(pos));
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1 - frac) + sorted[hi] * frac;
}

inline DepthAggregate aggregate(int depth, std::string metric, std::vector<double> values) {
    DepthAggregate a;
    a.depth = depth;
    a.metric = std::move(metric);
    a.n = values.size();
    if (values.empty()) return a;
    std::sort(values.begin(), values.end());
    double sum = 0;
    for (double v : values) sum += v;
    a.mean = sum / static_cast<double>(values.size());
    a.median = quantile(values, 0.5);
    a.q1 = quantile(values, 0.25);
    a.q3 = quantile(values, 0.75);
    double iqr = a.q3 - a.q1;
    double lo_fence = a.q1 - 1.5 * iqr;
    double hi_fence = a.q3 + 1.5 * iqr;
    a.whisker_lo = values.back();
    a.whisker_hi = values.front();
    for (double v : values) {
        if (v >= lo_fence) {
            a.whisker_lo = std::min(a.whisker_lo, v);
            break;
        }
    }
    for (auto it = values.rbegin(); it != values.rend(); ++it) {
        if (*it <= hi_fence) {
            a.whisker_hi = std::max(a.whisker_hi, *it);
            break;
        }
    }
    for (double v : values)
        if (v < lo_fence || v > hi_fence) ++a.outlier_count;
    return a;
}

inline std::vector<double> ranks(const std::vector<double>& xs) {
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> r(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    auto n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0;  // constant series -> rho 0 by convention
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace analysis_detail

/// Least-squares slope over the depth index plus Spearman rank correlation.
inline TrendSummary trend(const std::vector<double>& series, std::string metric = "",
                          std::optional<TextChannel> channel = std::nullopt,
                          double flat_threshold = kFlatRhoThreshold) {
    if (series.size() < 3) throw ConfigError("trend: series needs at least 3 points");
    TrendSummary t;
    t.metric = std::move(metric);
    t.channel = channel;

    std::vector<double> idx(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) idx[i] = static_cast<double>(i);
    double mx = (static_cast<double>(series.size()) - 1) / 2.0;
    double my = 0;
    for (double v : series) my += v;
    my /= static_cast<double>(series.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sxy += (idx[i] - mx) * (series[i] - my);
        sxx += (idx[i] - mx) * (idx[i] - mx);
    }
    t.slope_per_depth = sxx > 0 ? sxy / sxx : 0;
    t.spearman_rho = analysis_detail::pearson(analysis_detail::ranks(idx),
                                              analysis_detail::ranks(series));
    if (std::abs(t.spearman_rho) < flat_threshold)
        t.direction = TrendDirection::Flat;
    else
        t.direction = t.spearman_rho > 0 ? TrendDirection::Increasing
                                         : TrendDirection::Decreasing;
    return t;
}

using MetadataMap = std::unordered_map<VideoId, VideoMeta>;

/// Box statistics per depth for views/likes/comments over log10(x+1)
/// transformed values. Ad records are excluded unless include_ads is set.
/// Empty depth buckets are omitted.
inline std::vector<DepthAggregate> engagement_by_depth(
    const std::vector<RecommendationRecord>& records, const MetadataMap& metadata,
    bool include_ads = false) {
    static const char* kMetrics[] = {"views", "likes", "comments"};
    std::map<int, std::array<std::vector<double>, 3>> buckets;
    for (const auto& rec : records) {
        if (rec.is_ad && !include_ads) continue;
        auto it = metadata.find(rec.video_id);
        if (it == metadata.end())
            throw NotFoundError("engagement_by_depth: no metadata for " +
                                rec.video_id.str());
        const VideoMeta& m = it->second;
        auto& b = buckets[rec.depth];
        b[0].push_back(std::log10(static_cast<double>(m.views) + 1.0));
        b[1].push_back(std::log10(static_cast<double>(m.likes) + 1.0));
        b[2].push_back(std::log10(static_cast<double>(m.comment_count) + 1.0));
    }
    std::vector<DepthAggregate> out;
    for (auto& [depth, b] : buckets)
        for (int metric = 0; metric < 3; ++metric)
            out.push_back(analysis_detail::aggregate(depth, kMetrics[metric],
                                                     std::move(b[static_cast<std::size_t>(metric)])));
    return out;
}

/// Mean-by-depth series, per text channel and per emotion class. Index 0 of
/// each series is depth 1. Records whose video lacks a score for a channel
/// simply do not contribute to it.
struct EmotionDepthSeries {
    TextChannel channel;
    // [class][depth-1] mean, plus per-depth sample counts.
    std::array<std::vector<double>, lexicon::kEmotionClassCount> mean;
    std::vector<std::size_t> n;
};

using ScoreKey = std::pair<std::string, TextChannel>;

struct ScoreKeyHash {
    std::size_t operator()(const ScoreKey& k) const noexcept {
        return std::hash<std::string>{}(k.first) * 31 +
               static_cast<std::size_t>(k.second);
    }
};

using ScoreMap = std::unordered_map<ScoreKey, ChannelScores, ScoreKeyHash>;

inline ScoreMap index_scores(const std::vector<ChannelScores>& scores) {
    ScoreMap map;
    for (const auto& s : scores) map.insert({{s.video_id.str(), s.channel}, s});
    return map;
}

inline std::vector<EmotionDepthSeries> emotion_by_depth(
    const std::vector<ChannelScores>& scores,
    const std::vector<RecommendationRecord>& records, bool include_ads = true) {
    int max_depth = 0;
    for (const auto& rec : records) max_depth = std::max(max_depth, rec.depth);
    auto index = index_scores(scores);

    std::vector<EmotionDepthSeries> out;
    for (TextChannel channel : {TextChannel::Title, TextChannel::Description,
                                TextChannel::Transcript, TextChannel::Comments}) {
        EmotionDepthSeries series{channel, {}, {}};
        for (auto& v : series.mean) v.assign(static_cast<std::size_t>(max_depth), 0.0);
        series.n.assign(static_cast<std::size_t>(max_depth), 0);
        bool any = false;
        for (const auto& rec : records) {
            if (rec.is_ad && !include_ads) continue;
            auto it = index.find({rec.video_id.str(), channel});
            if (it == index.end()) continue;
            any = true;
            auto d = static_cast<std::size_t>(rec.depth - 1);
            for (std::size_t c = 0; c < lexicon::kEmotionClassCount; ++c)
                series.mean[c][d] += it->second.emotion.v[c];
            series.n[d] += 1;
        }
        if (!any) continue;  // channel missing entirely -> omitted
        for (std::size_t d = 0; d < series.n.size(); ++d)
            if (series.n[d] > 0)
                for (auto& v : series.mean) v[d] /= static_cast<double>(series.n[d]);
        out.push_back(std::move(series));
    }
    return out;
}

/// Per depth: overall mean toxicity and the mean over scores at or above the
/// depth's tail quantile. Buckets too small to resolve the tail fall back to
/// the bucket max and are flagged.
struct ToxicityDepthSeries {
    TextChannel channel;
    std::vector<double> mean;       // index 0 = depth 1
    std::vector<double> tail_mean;
    std::vector<std::size_t> n;
    std::vector<bool> low_n;
};

inline std::vector<ToxicityDepthSeries> toxicity_by_depth(
    const std::vector<ChannelScores>& scores,
    const std::vector<RecommendationRecord>& records, double tail_q = 0.9,
    bool include_ads = true) {
    if (tail_q <= 0 || tail_q >= 1)
        throw ConfigError("toxicity_by_depth: tail_q must be in (0,1)");
    int max_depth = 0;
    for (const auto& rec : records) max_depth = std::max(max_depth, rec.depth);
    auto index = index_scores(scores);

    std::vector<ToxicityDepthSeries> out;
    for (TextChannel channel : {TextChannel::Title, TextChannel::Description,
                                TextChannel::Transcript, TextChannel::Comments}) {
        std::vector<std::vector<double>> buckets(static_cast<std::size_t>(max_depth));
        bool any = false;
        for (const auto& rec : records) {
            if (rec.is_ad && !include_ads) continue;
            auto it = index.find({rec.video_id.str(), channel});
            if (it == index.end()) continue;
            any = true;
            buckets[static_cast<std::size_t>(rec.depth - 1)].push_back(
                it->second.toxicity.toxicity);
        }
        if (!any) continue;
        ToxicityDepthSeries series{channel, {}, {}, {}, {}};
        for (auto& b : buckets) {
            std::sort(b.begin(), b.end());
            series.n.push_back(b.size());
            if (b.empty()) {
                series.mean.push_back(0);
                series.tail_mean.push_back(0);
                series.low_n.push_back(true);
                continue;
            }
            double sum = 0;
            for (double v : b) sum += v;
            series.mean.push_back(sum / static_cast<double>(b.size()));
            bool low_n =
                static_cast<double>(b.size()) < 1.0 / (1.0 - tail_q);
            if (low_n) {
                series.tail_mean.push_back(b.back());
            } else {
                double threshold = analysis_detail::quantile(b, tail_q);
                double tsum = 0;
                std::size_t tn = 0;
                for (double v : b)
                    if (v >= threshold) {
                        tsum += v;
                        ++tn;
                    }
                series.tail_mean.push_back(tn ? tsum / static_cast<double>(tn) : b.back());
            }
            series.low_n.push_back(low_n);
        }
        out.push_back(std::move(series));
    }
    return out;
}

/// Finds the period of periodic ad injection in one chain's is_ad flags.
/// Brute-force over (period, offset); a candidate must cover at least 0.8 of
/// the union of predicted and observed ad positions (so p and its multiples
/// do not tie). Returns nullopt when nothing periodic fits.
inline std::optional<int> detect_ad_period(const std::vector<bool>& flags,
                                           double min_match = 0.8) {
    const int len = static_cast<int>(flags.size());
    std::vector<int> ad_positions;  // 1-based
    for (int i = 0; i < len; ++i)
        if (flags[static_cast<std::size_t>(i)]) ad_positions.push_back(i + 1);

    std::optional<int> best_period;
    double best_score = 0;
    for (int p = 2; p * 2 <= len; ++p) {
        for (int offset = 0; offset < p; ++offset) {
            int predicted = 0, hits = 0;
            for (int pos = offset + p; pos <= len; pos += p) {
                ++predicted;
                if (flags[static_cast<std::size_t>(pos - 1)]) ++hits;
            }
            if (predicted == 0) continue;
            int unioned = predicted + static_cast<int>(ad_positions.size()) - hits;
            double score = unioned > 0 ? static_cast<double>(hits) / unioned : 0;
            if (score >= min_match && score > best_score) {
                best_score = score;
                best_period = p;
            }
        }
    }
    return best_period;
}

}  // namespace recgraph
