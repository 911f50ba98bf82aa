// Command-line surface: crawl, score, analyze, bench.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recgraph/config.hpp"
#include "recgraph/core.hpp"
#include "recgraph/io.hpp"
#include "recgraph/orchestrator.hpp"
#include "recgraph/report.hpp"
#include "recgraph/scoring.hpp"
#include "recgraph/scoring_service.hpp"
#include "recgraph/sim_platform.hpp"

namespace fs = std::filesystem;
using namespace recgraph;

namespace {

struct CrawlFlags {
    std::string format = "shorts";
    std::string roots_path;
    int depth = 1;
    int breadth = 5;
    double dwell_s = 0.0;
    int workers = 1;
    std::string stagger = "sync";
    std::string backend = "sim";
    std::int64_t seed = 1;
    std::string out_dir = "out";
    std::string config_path;
    int max_retries = 3;
    double grace_s = 1.0;
    double implicit_wait_s = 10.0;
    double poll_interval_s = 0.1;
    bool progress = false;

    // sim overrides; NaN/negative sentinel = keep config/default
    double latency_ms = -1, penalty_ms = -1, fail_rate = -1;
    int capacity = -1, ad_period = -1, breadth_served = -1;
    double noise_ad = -1, noise_playlist = -1, noise_live = -1;
    double drift = -1, sigma = -1, engagement_base = -1;
    double ad_threshold = -1;
};

void add_crawl_flags(CLI::App* cmd, CrawlFlags& f, bool with_workers = true) {
    cmd->add_option("--format", f.format, "shorts|long")
        ->check(CLI::IsMember({"shorts", "long"}));
    cmd->add_option("--roots", f.roots_path, "roots file (CSV or one ID per line)")
        ->required();
    cmd->add_option("--depth", f.depth, "recommendation depth D");
    cmd->add_option("--breadth", f.breadth, "recommendations per video B (long only)");
    cmd->add_option("--dwell", f.dwell_s, "watch time W in seconds (shorts)");
    if (with_workers) cmd->add_option("--workers", f.workers, "parallel worker count N");
    cmd->add_option("--stagger", f.stagger, "sync|even")
        ->check(CLI::IsMember({"sync", "even"}));
    cmd->add_option("--backend", f.backend, "sim (live adapter slot is not built)")
        ->check(CLI::IsMember({"sim"}));
    cmd->add_option("--seed", f.seed, "sim seed; all randomness flows from this");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--config", f.config_path, "key=value config file");
    cmd->add_option("--max-retries", f.max_retries, "retry budget per page/root");
    cmd->add_option("--grace", f.grace_s, "post-load grace pause, seconds");
    cmd->add_option("--implicit-wait", f.implicit_wait_s, "page load budget, seconds");
    cmd->add_option("--poll-interval", f.poll_interval_s, "URL/title poll interval");
    cmd->add_flag("--progress", f.progress, "progress lines on stderr");

    cmd->add_option("--latency-ms", f.latency_ms, "sim base page latency");
    cmd->add_option("--penalty-ms", f.penalty_ms, "sim latency per load beyond capacity");
    cmd->add_option("--capacity", f.capacity, "sim concurrent-load capacity");
    cmd->add_option("--fail-rate", f.fail_rate, "sim transient render failure rate");
    cmd->add_option("--ad-period", f.ad_period, "sim ad injection period");
    cmd->add_option("--ad-threshold", f.ad_threshold, "sim high-dwell threshold, seconds");
    cmd->add_option("--breadth-served", f.breadth_served, "sim column size");
    cmd->add_option("--noise-ad", f.noise_ad, "sim ad slot rate");
    cmd->add_option("--noise-playlist", f.noise_playlist, "sim playlist slot rate");
    cmd->add_option("--noise-live", f.noise_live, "sim live-stream slot rate");
    cmd->add_option("--drift", f.drift, "sim engagement drift g per depth");
    cmd->add_option("--sigma", f.sigma, "sim log10 engagement noise");
    cmd->add_option("--engagement-base", f.engagement_base, "sim base view count");
}

sim::SimParams resolve_sim_params(const CrawlFlags& f) {
    KeyValueConfig file_cfg;
    if (!f.config_path.empty()) file_cfg = KeyValueConfig::load(f.config_path);
    sim::SimParams p = sim_params_from(file_cfg);
    p.seed = static_cast<std::uint64_t>(f.seed);
    if (f.latency_ms >= 0) p.latency_base_ms = f.latency_ms;
    if (f.penalty_ms >= 0) p.latency_penalty_ms = f.penalty_ms;
    if (f.capacity >= 0) p.capacity = f.capacity;
    if (f.fail_rate >= 0) p.fail_rate = f.fail_rate;
    if (f.ad_period >= 0) p.ad_period = f.ad_period;
    if (f.ad_threshold >= 0) p.ad_dwell_threshold_s = f.ad_threshold;
    if (f.breadth_served >= 0) p.breadth_served = f.breadth_served;
    if (f.noise_ad >= 0) p.noise_ad_rate = f.noise_ad;
    if (f.noise_playlist >= 0) p.noise_playlist_rate = f.noise_playlist;
    if (f.noise_live >= 0) p.noise_live_rate = f.noise_live;
    if (f.drift >= 0) p.engagement_drift = f.drift;
    if (f.sigma >= 0) p.log10_noise_sigma = f.sigma;
    if (f.engagement_base >= 0) p.engagement_base = f.engagement_base;
    return p;
}

CrawlConfig resolve_crawl_config(const CrawlFlags& f) {
    CrawlConfig cfg;
    cfg.format = f.format == "shorts" ? CrawlFormat::Shorts : CrawlFormat::LongForm;
    cfg.roots = io::read_roots(f.roots_path);
    cfg.depth = f.depth;
    cfg.breadth = cfg.format == CrawlFormat::Shorts ? 1 : f.breadth;
    cfg.dwell_s = f.dwell_s;
    cfg.workers = f.workers;
    cfg.stagger = f.stagger == "even" ? StaggerMode::EvenOffset : StaggerMode::Synchronized;
    cfg.max_retries = f.max_retries;
    cfg.backend = BackendKind::Sim;
    cfg.tuning.grace_s = f.grace_s;
    cfg.tuning.implicit_wait_s = f.implicit_wait_s;
    cfg.tuning.poll_interval_s = f.poll_interval_s;
    cfg.progress = f.progress;
    cfg.validate();
    return cfg;
}

int run_crawl_once(const CrawlConfig& cfg, const sim::SimParams& params,
                   const fs::path& out_dir, TimingReport* timing_out) {
    sim::Platform platform(params);
    CrawlResult result = cfg.format == CrawlFormat::Shorts
                             ? run_shorts_crawl(cfg, platform)
                             : run_longform_crawl(cfg, platform);
    io::write_records_csv(result.records, out_dir / "records.csv", cfg.format);
    io::write_metadata_csv(result.metadata, out_dir / "metadata.csv");
    io::write_timing_json(result.timing, out_dir / "timing.json");
    if (timing_out) *timing_out = result.timing;
    if (result.all_roots_failed()) {
        std::cerr << "crawl failed: all " << result.total_roots << " roots failed\n";
        return 1;
    }
    if (result.failed_roots > 0) {
        std::cerr << "crawl finished with " << result.failed_roots << "/"
                  << result.total_roots << " failed roots\n";
        return 1;
    }
    return 0;
}

int cmd_crawl(const CrawlFlags& f) {
    auto cfg = resolve_crawl_config(f);
    auto params = resolve_sim_params(f);
    return run_crawl_once(cfg, params, f.out_dir, nullptr);
}

int cmd_bench(const CrawlFlags& f, const std::string& workers_list) {
    std::vector<int> worker_counts;
    std::stringstream ss(workers_list);
    std::string item;
    while (std::getline(ss, item, ','))
        worker_counts.push_back(static_cast<int>(io::parse_int(item, "--workers")));
    if (worker_counts.empty()) throw ConfigError("bench: empty worker list");

    auto base_cfg = resolve_crawl_config(f);
    auto params = resolve_sim_params(f);

    struct Row {
        int workers;
        TimingReport timing;
    };
    std::vector<Row> rows;
    double wall_first = 0;
    for (int n : worker_counts) {
        CrawlConfig cfg = base_cfg;
        cfg.workers = n;
        TimingReport timing;
        fs::path run_dir = fs::path(f.out_dir) / ("n" + std::to_string(n));
        run_crawl_once(cfg, params, run_dir, &timing);
        if (rows.empty()) wall_first = timing.wall_s;
        rows.push_back({n, timing});
        std::cerr << "bench workers=" << n << " wall_s=" << timing.wall_s << "\n";
    }

    auto out = io::open_out(fs::path(f.out_dir) / "bench.csv");
    out << "workers,wall_s,theoretical_s,overhead_ratio,speedup_vs_first\n";
    std::cout << "workers  wall_s    speedup\n";
    for (const auto& row : rows) {
        double speedup = row.timing.wall_s > 0 ? wall_first / row.timing.wall_s : 0;
        out << row.workers << ',' << io::format_double(row.timing.wall_s) << ','
            << io::format_double(row.timing.theoretical_s) << ','
            << io::format_double(row.timing.overhead_ratio) << ','
            << io::format_double(speedup) << '\n';
        std::cout << row.workers << "\t" << row.timing.wall_s << "\t" << speedup << "\n";
    }
    return 0;
}

std::vector<ChannelScores> score_all_service(const std::string& url,
                                             const std::vector<std::pair<VideoId, VideoMeta>>& metadata,
                                             CrawlFormat format) {
    ServiceScorer scorer(url);
    // Flatten every text to score, remembering where each lands.
    struct Slot {
        std::size_t video;
        TextChannel channel;
        bool is_comment;
    };
    std::vector<std::string> texts;
    std::vector<Slot> slots;
    for (std::size_t i = 0; i < metadata.size(); ++i) {
        const auto& m = metadata[i].second;
        if (format == CrawlFormat::Shorts) {
            texts.push_back(m.title + " " + m.description);
            slots.push_back({i, TextChannel::Title, false});
            continue;
        }
        texts.push_back(m.title);
        slots.push_back({i, TextChannel::Title, false});
        texts.push_back(m.description);
        slots.push_back({i, TextChannel::Description, false});
        if (m.transcript) {
            texts.push_back(*m.transcript);
            slots.push_back({i, TextChannel::Transcript, false});
        }
        for (const auto& c : m.comments) {
            texts.push_back(c);
            slots.push_back({i, TextChannel::Comments, true});
        }
    }

    std::vector<std::pair<EmotionScores, ToxicityScores>> all;
    all.reserve(texts.size());
    const std::size_t batch = 64;
    for (std::size_t start = 0; start < texts.size(); start += batch) {
        std::vector<std::string> chunk(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                       texts.begin() + static_cast<std::ptrdiff_t>(
                                                           std::min(start + batch, texts.size())));
        auto scored = scorer.score_batch(chunk);
        all.insert(all.end(), scored.begin(), scored.end());
    }

    std::vector<ChannelScores> out;
    std::map<std::pair<std::size_t, TextChannel>, std::vector<std::size_t>> comment_groups;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].is_comment) {
            comment_groups[{slots[i].video, slots[i].channel}].push_back(i);
            continue;
        }
        out.push_back({metadata[slots[i].video].first, slots[i].channel, all[i].first,
                       all[i].second});
    }
    for (const auto& [key, idxs] : comment_groups) {
        std::vector<EmotionScores> emotions;
        double tox = 0;
        for (auto i : idxs) {
            emotions.push_back(all[i].first);
            tox += all[i].second.toxicity;
        }
        out.push_back({metadata[key.first].first, key.second, mean_emotion(emotions),
                       {tox / static_cast<double>(idxs.size())}});
    }
    return out;
}

int cmd_score(const std::string& in_dir, const std::string& scorer,
              const std::string& lexicon_path, const std::string& flags_path,
              const std::string& endpoint, const std::string& config_path) {
    auto records = io::read_records_csv(fs::path(in_dir) / "records.csv");
    auto metadata = io::read_metadata_csv(fs::path(in_dir) / "metadata.csv");

    std::vector<ChannelScores> scores;
    if (scorer == "stub") {
        Lexicon lx = lexicon_path.empty() ? Lexicon::builtin()
                                          : Lexicon::load(lexicon_path, flags_path);
        for (const auto& [id, meta] : metadata) {
            auto per = score_video_stub(lx, meta, records.format);
            scores.insert(scores.end(), per.begin(), per.end());
        }
    } else {
        KeyValueConfig file_cfg;
        if (!config_path.empty()) file_cfg = KeyValueConfig::load(config_path);
        std::string url = resolve_scorer_url(endpoint, file_cfg);
        if (url.empty())
            throw ConfigError("service scorer needs --endpoint, SCORER_URL or scorer.url");
        scores = score_all_service(url, metadata, records.format);
    }
    io::write_scores_csv(scores, fs::path(in_dir) / "scores.csv");
    return 0;
}

int cmd_analyze(const std::string& in_dir, const std::string& report_dir, double tail_q) {
    auto records = io::read_records_csv(fs::path(in_dir) / "records.csv");
    auto metadata_rows = io::read_metadata_csv(fs::path(in_dir) / "metadata.csv");
    auto scores = io::read_scores_csv(fs::path(in_dir) / "scores.csv");
    MetadataMap metadata;
    for (auto& [id, meta] : metadata_rows) metadata.emplace(id, std::move(meta));
    auto rep = build_report(records.records, metadata, scores, records.format, tail_q);
    write_report(rep, report_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"recommendation-graph harvesting and bias-audit pipeline"};
    app.require_subcommand(1);

    CrawlFlags crawl_flags;
    auto* crawl = app.add_subcommand("crawl", "harvest a recommendation graph");
    add_crawl_flags(crawl, crawl_flags);

    CrawlFlags bench_flags;
    std::string bench_workers = "1,5,10,15,20,25,30,35,40";
    auto* bench = app.add_subcommand("bench", "repeat a crawl per worker count");
    add_crawl_flags(bench, bench_flags, /*with_workers=*/false);
    bench->add_option("--workers", bench_workers, "comma-separated worker counts");

    std::string score_in = "out", score_scorer = "stub";
    std::string score_lexicon, score_flags, score_endpoint, score_config;
    auto* score = app.add_subcommand("score", "emotion/toxicity scores per text channel");
    score->add_option("--in", score_in, "crawl output directory");
    score->add_option("--scorer", score_scorer, "stub|service")
        ->check(CLI::IsMember({"stub", "service"}));
    score->add_option("--lexicon", score_lexicon, "emotion lexicon TSV (stub)");
    score->add_option("--flags", score_flags, "toxicity flag list (stub)");
    score->add_option("--endpoint", score_endpoint, "scoring service URL");
    score->add_option("--config", score_config, "key=value config file");

    std::string analyze_in = "out", analyze_report = "out/report";
    double tail_q = 0.9;
    auto* analyze = app.add_subcommand("analyze", "depth-wise bias report");
    analyze->add_option("--in", analyze_in, "crawl+score output directory");
    analyze->add_option("--report", analyze_report, "report directory");
    analyze->add_option("--tail-q", tail_q, "tail quantile for toxic-video mean");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*crawl) return cmd_crawl(crawl_flags);
        if (*bench) return cmd_bench(bench_flags, bench_workers);
        if (*score)
            return cmd_score(score_in, score_scorer, score_lexicon, score_flags,
                             score_endpoint, score_config);
        if (*analyze) return cmd_analyze(analyze_in, analyze_report, tail_q);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
