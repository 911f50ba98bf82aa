#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recgraph/analysis.hpp"
#include "recgraph/io.hpp"

namespace recgraph {

/// Per-chain ad periodicity, keyed by root in first-appearance order.
struct AdPeriodicityRow {
    VideoId root_id;
    std::optional<int> period;
};

inline std::vector<AdPeriodicityRow> ad_periodicity_by_root(
    const std::vector<RecommendationRecord>& records) {
    std::vector<VideoId> order;
    std::map<std::string, std::vector<std::pair<int, bool>>> chains;
    for (const auto& rec : records) {
        auto [it, inserted] = chains.try_emplace(rec.root_id.str());
        if (inserted) order.push_back(rec.root_id);
        it->second.emplace_back(rec.depth, rec.is_ad);
    }
    std::vector<AdPeriodicityRow> out;
    for (const auto& root : order) {
        auto& chain = chains[root.str()];
        std::sort(chain.begin(), chain.end());
        std::vector<bool> flags;
        flags.reserve(chain.size());
        for (auto& [depth, is_ad] : chain) flags.push_back(is_ad);
        out.push_back({root, detect_ad_period(flags)});
    }
    return out;
}

struct AnalysisReport {
    std::vector<DepthAggregate> engagement;
    std::vector<EmotionDepthSeries> emotion;
    std::vector<ToxicityDepthSeries> toxicity;
    std::vector<TrendSummary> trends;
    std::vector<AdPeriodicityRow> ad_periodicity;
};

inline AnalysisReport build_report(const std::vector<RecommendationRecord>& records,
                                   const MetadataMap& metadata,
                                   const std::vector<ChannelScores>& scores,
                                   CrawlFormat format, double tail_q = 0.9) {
    AnalysisReport rep;
    rep.engagement = engagement_by_depth(records, metadata);
    rep.emotion = emotion_by_depth(scores, records);
    rep.toxicity = toxicity_by_depth(scores, records, tail_q);

    // Engagement trends over the per-depth means.
    std::map<std::string, std::map<int, double>> by_metric;
    for (const auto& a : rep.engagement) by_metric[a.metric][a.depth] = a.mean;
    for (const auto& [metric, series_map] : by_metric) {
        std::vector<double> series;
        for (const auto& [depth, mean] : series_map) series.push_back(mean);
        if (series.size() >= 3) rep.trends.push_back(trend(series, metric));
    }
    for (const auto& es : rep.emotion) {
        for (std::size_t c = 0; c < lexicon::kEmotionClassCount; ++c) {
            if (es.mean[c].size() >= 3)
                rep.trends.push_back(trend(es.mean[c],
                                           std::string(lexicon::kEmotionClassNames[c]),
                                           es.channel));
        }
    }
    for (const auto& ts : rep.toxicity) {
        if (ts.mean.size() >= 3) {
            rep.trends.push_back(trend(ts.mean, "toxicity_mean", ts.channel));
            rep.trends.push_back(trend(ts.tail_mean, "toxicity_tail_mean", ts.channel));
        }
    }
    if (format == CrawlFormat::Shorts)
        rep.ad_periodicity = ad_periodicity_by_root(records);
    return rep;
}

inline void write_report(const AnalysisReport& rep, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        auto out = io::open_out(dir / "engagement.csv");
        out << "metric,depth,n,mean,median,q1,q3,whisker_lo,whisker_hi,outlier_count\n";
        for (const auto& a : rep.engagement)
            out << a.metric << ',' << a.depth << ',' << a.n << ','
                << io::format_double(a.mean) << ',' << io::format_double(a.median) << ','
                << io::format_double(a.q1) << ',' << io::format_double(a.q3) << ','
                << io::format_double(a.whisker_lo) << ','
                << io::format_double(a.whisker_hi) << ',' << a.outlier_count << '\n';
    }
    {
        auto out = io::open_out(dir / "emotion.csv");
        out << "channel,class,depth,n,mean\n";
        for (const auto& es : rep.emotion)
            for (std::size_t c = 0; c < lexicon::kEmotionClassCount; ++c)
                for (std::size_t d = 0; d < es.mean[c].size(); ++d)
                    out << to_string(es.channel) << ','
                        << lexicon::kEmotionClassNames[c] << ',' << d + 1 << ','
                        << es.n[d] << ',' << io::format_double(es.mean[c][d]) << '\n';
    }
    {
        auto out = io::open_out(dir / "toxicity.csv");
        out << "channel,depth,n,mean,tail_mean,low_n\n";
        for (const auto& ts : rep.toxicity)
            for (std::size_t d = 0; d < ts.mean.size(); ++d)
                out << to_string(ts.channel) << ',' << d + 1 << ',' << ts.n[d] << ','
                    << io::format_double(ts.mean[d]) << ','
                    << io::format_double(ts.tail_mean[d]) << ','
                    << (ts.low_n[d] ? "true" : "false") << '\n';
    }
    {
        auto out = io::open_out(dir / "trends.csv");
        out << "metric,channel,slope_per_depth,spearman_rho,direction\n";
        for (const auto& t : rep.trends)
            out << t.metric << ',' << (t.channel ? to_string(*t.channel) : "") << ','
                << io::format_double(t.slope_per_depth) << ','
                << io::format_double(t.spearman_rho) << ',' << to_string(t.direction)
                << '\n';
    }
    if (!rep.ad_periodicity.empty()) {
        auto out = io::open_out(dir / "ad_periodicity.csv");
        out << "root_id,period\n";
        for (const auto& row : rep.ad_periodicity) {
            out << row.root_id.str() << ',';
            if (row.period) out << *row.period;
            else out << "none";
            out << '\n';
        }
    }
    {
        // Plot data: (depth, value) series per metric/class, for any plotting tool.
        nlohmann::json doc;
        doc["engagement"] = nlohmann::json::array();
        std::map<std::string, nlohmann::json> eng_series;
        for (const auto& a : rep.engagement)
            eng_series[a.metric]["points"].push_back({a.depth, a.mean});
        for (auto& [metric, body] : eng_series) {
            body["metric"] = metric;
            doc["engagement"].push_back(body);
        }
        doc["emotion"] = nlohmann::json::array();
        for (const auto& es : rep.emotion)
            for (std::size_t c = 0; c < lexicon::kEmotionClassCount; ++c) {
                nlohmann::json body;
                body["channel"] = to_string(es.channel);
                body["class"] = lexicon::kEmotionClassNames[c];
                body["points"] = nlohmann::json::array();
                for (std::size_t d = 0; d < es.mean[c].size(); ++d)
                    body["points"].push_back({d + 1, es.mean[c][d]});
                doc["emotion"].push_back(body);
            }
        doc["toxicity"] = nlohmann::json::array();
        for (const auto& ts : rep.toxicity) {
            nlohmann::json body;
            body["channel"] = to_string(ts.channel);
            body["mean"] = nlohmann::json::array();
            body["tail_mean"] = nlohmann::json::array();
            for (std::size_t d = 0; d < ts.mean.size(); ++d) {
                body["mean"].push_back({d + 1, ts.mean[d]});
                body["tail_mean"].push_back({d + 1, ts.tail_mean[d]});
            }
            doc["toxicity"].push_back(body);
        }
        auto out = io::open_out(dir / "plot_data.json");
        out << doc.dump(2) << '\n';
    }
}

}  // namespace recgraph
