#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "recgraph/core.hpp"
#include "recgraph/errors.hpp"
#include "recgraph/page_parser.hpp"
#include "recgraph/session.hpp"
#include "recgraph/sim_platform.hpp"

namespace recgraph {

enum class CrawlEventKind { WorkerStart, PageLoad, Advance, RootDone, RootFailed };

inline const char* to_string(CrawlEventKind k) {
    switch (k) {
        case CrawlEventKind::WorkerStart: return "worker_start";
        case CrawlEventKind::PageLoad: return "page_load";
        case CrawlEventKind::Advance: return "advance";
        case CrawlEventKind::RootDone: return "root_done";
        case CrawlEventKind::RootFailed: return "root_failed";
    }
    return "?";
}

struct CrawlEvent {
    int worker_id;
    CrawlEventKind kind;
    std::int64_t t_ms;  // milliseconds since crawl start
};

struct WorkerStats {
    int worker_id = 0;
    std::size_t roots_assigned = 0;
    std::size_t records_emitted = 0;
    int retries = 0;
    int failures = 0;
};

struct CrawlResult {
    std::vector<RecommendationRecord> records;
    TimingReport timing;
    std::vector<WorkerStats> per_worker;
    std::vector<CrawlEvent> event_log;
    // Unique-video metadata in first-occurrence order (roots first).
    std::vector<std::pair<VideoId, VideoMeta>> metadata;
    std::size_t failed_roots = 0;
    std::size_t total_roots = 0;

    bool all_roots_failed() const { return total_roots > 0 && failed_roots == total_roots; }
};

/// Contiguous near-even split: sizes differ by at most one and concatenation
/// in order reproduces the input.
inline std::vector<std::vector<VideoId>> partition_roots(const std::vector<VideoId>& roots,
                                                         int n) {
    if (n < 1) throw ConfigError("partition_roots: n must be >= 1");
    std::vector<std::vector<VideoId>> out(static_cast<std::size_t>(n));
    const std::size_t base = roots.size() / static_cast<std::size_t>(n);
    const std::size_t rem = roots.size() % static_cast<std::size_t>(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t take = base + (i < rem ? 1 : 0);
        out[i].assign(roots.begin() + static_cast<std::ptrdiff_t>(pos),
                      roots.begin() + static_cast<std::ptrdiff_t>(pos + take));
        pos += take;
    }
    return out;
}

/// Start delays that spread workers' advance timings across the dwell window.
inline std::vector<double> stagger_offsets(int n, double dwell_s, StaggerMode mode) {
    if (n < 1) throw ConfigError("stagger_offsets: n must be >= 1");
    if (dwell_s < 0) throw ConfigError("stagger_offsets: dwell must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (mode == StaggerMode::EvenOffset)
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i * dwell_s / n;
    return out;
}

using BackendFactory = std::function<std::unique_ptr<Backend>(int session_id)>;

namespace orchestrator_detail {

using Clock = std::chrono::steady_clock;

struct WorkerOutput {
    std::vector<RecommendationRecord> records;
    std::vector<CrawlEvent> events;
    WorkerStats stats;
    std::size_t failed_roots = 0;
};

class EventRecorder {
  public:
    EventRecorder(std::vector<CrawlEvent>& sink, int worker, Clock::time_point epoch)
        : sink_(sink), worker_(worker), epoch_(epoch) {}

    void log(CrawlEventKind kind) {
        auto t = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                                       epoch_);
        sink_.push_back({worker_, kind, t.count()});
    }

  private:
    std::vector<CrawlEvent>& sink_;
    int worker_;
    Clock::time_point epoch_;
};

inline std::int64_t epoch_ms_now() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

inline void progress_line(int worker, const VideoId& root, std::size_t done,
                          std::size_t total) {
    static std::mutex mu;
    std::lock_guard lk(mu);
    std::cerr << "worker=" << worker << " root=" << root.str() << " done=" << done << "/"
              << total << "\n";
}

/// Open with refresh-on-timeout retries; retries are charged to the stats.
inline void open_with_retry(Session& session, const VideoId& id, CrawlFormat format,
                            int max_retries, WorkerStats& stats, EventRecorder& events) {
    for (int attempt = 1;; ++attempt) {
        try {
            session.open_video(id, format);
            events.log(CrawlEventKind::PageLoad);
            return;
        } catch (const LoadTimeout&) {
            if (attempt > max_retries) throw;
            stats.retries += 1;
        }
    }
}

inline void shorts_worker(int worker_id, const std::vector<VideoId>& mine,
                          const CrawlConfig& cfg, const BackendFactory& factory,
                          double offset_s, Clock::time_point epoch, WorkerOutput& out) {
    out.stats.worker_id = worker_id;
    out.stats.roots_assigned = mine.size();
    EventRecorder events(out.events, worker_id, epoch);
    events.log(CrawlEventKind::WorkerStart);
    if (offset_s > 0)
        std::this_thread::sleep_for(std::chrono::duration<double>(offset_s));

    for (std::size_t r = 0; r < mine.size(); ++r) {
        const VideoId& root = mine[r];
        try {
            // A fresh session (clean cache and history) per root.
            int session_id = worker_id * 100000 + static_cast<int>(r);
            Session session(factory(session_id), cfg.tuning, cfg.max_retries);
            open_with_retry(session, root, CrawlFormat::Shorts, cfg.max_retries,
                            out.stats, events);
            VideoId parent = root;
            for (int d = 1; d <= cfg.depth; ++d) {
                VideoId next = session.advance_short(cfg.dwell_s);
                events.log(CrawlEventKind::Advance);
                bool is_ad = session.metadata(next).kind == VideoKind::Ad;
                out.records.push_back({root, parent, next, d, 1, worker_id, cfg.dwell_s,
                                       is_ad, epoch_ms_now()});
                parent = next;
            }
            events.log(CrawlEventKind::RootDone);
        } catch (const LoadTimeout&) {
            out.failed_roots += 1;
            out.stats.failures += 1;
            events.log(CrawlEventKind::RootFailed);
        } catch (const AdvanceStuck&) {
            out.failed_roots += 1;
            out.stats.failures += 1;
            events.log(CrawlEventKind::RootFailed);
        } catch (const NotFoundError&) {
            out.failed_roots += 1;
            out.stats.failures += 1;
            events.log(CrawlEventKind::RootFailed);
        }
        if (cfg.progress) progress_line(worker_id, root, r + 1, mine.size());
    }
    out.stats.records_emitted = out.records.size();
}

/// One frontier expansion: open, parse, filter; refresh until the required
/// length or the retry budget runs out, then emit what was obtained.
inline std::vector<VideoId> fetch_children(Session& session, const VideoId& parent,
                                           const CrawlConfig& cfg, WorkerStats& stats,
                                           EventRecorder& events) {
    std::vector<VideoId> best;
    for (int attempt = 1;; ++attempt) {
        try {
            session.open_video(parent, CrawlFormat::LongForm);
        } catch (const LoadTimeout&) {
            if (attempt > cfg.max_retries) {
                stats.failures += 1;
                return best;
            }
            stats.retries += 1;
            continue;
        }
        events.log(CrawlEventKind::PageLoad);
        auto ids = filter_recommendations(collect_thumbnail_anchors(session.document()),
                                          cfg.breadth);
        if (ids.size() > best.size()) best = std::move(ids);
        if (static_cast<int>(best.size()) >= cfg.breadth) return best;
        if (attempt > cfg.max_retries) {
            stats.failures += 1;  // permanent deficit
            return best;
        }
        stats.retries += 1;
    }
}

inline void longform_worker(int worker_id, const std::vector<VideoId>& mine,
                            const CrawlConfig& cfg, const BackendFactory& factory,
                            double offset_s, Clock::time_point epoch, WorkerOutput& out) {
    out.stats.worker_id = worker_id;
    out.stats.roots_assigned = mine.size();
    EventRecorder events(out.events, worker_id, epoch);
    events.log(CrawlEventKind::WorkerStart);
    if (offset_s > 0)
        std::this_thread::sleep_for(std::chrono::duration<double>(offset_s));

    // One session reused across the worker's whole subtree.
    Session session(factory(worker_id), cfg.tuning, cfg.max_retries);
    for (std::size_t r = 0; r < mine.size(); ++r) {
        const VideoId& root = mine[r];
        std::size_t emitted_before = out.records.size();
        std::vector<VideoId> frontier{root};
        for (int d = 1; d <= cfg.depth; ++d) {
            std::vector<VideoId> next_frontier;
            next_frontier.reserve(frontier.size() * static_cast<std::size_t>(cfg.breadth));
            for (const VideoId& parent : frontier) {
                auto children = fetch_children(session, parent, cfg, out.stats, events);
                for (std::size_t i = 0; i < children.size(); ++i)
                    out.records.push_back({root, parent, children[i], d,
                                           static_cast<int>(i) + 1, worker_id, 0.0,
                                           false, epoch_ms_now()});
                next_frontier.insert(next_frontier.end(), children.begin(),
                                     children.end());
            }
            frontier = std::move(next_frontier);
        }
        if (out.records.size() == emitted_before) {
            out.failed_roots += 1;
            events.log(CrawlEventKind::RootFailed);
        } else {
            events.log(CrawlEventKind::RootDone);
        }
        if (cfg.progress) progress_line(worker_id, root, r + 1, mine.size());
    }
    out.stats.records_emitted = out.records.size();
}

inline CrawlResult run_crawl(const CrawlConfig& cfg, const BackendFactory& factory,
                             double nominal_load_s) {
    cfg.validate();
    auto parts = partition_roots(cfg.roots, cfg.workers);
    auto offsets = stagger_offsets(cfg.workers, cfg.dwell_s, cfg.stagger);
    std::vector<WorkerOutput> outputs(static_cast<std::size_t>(cfg.workers));

    const auto epoch = Clock::now();
    {
        std::vector<std::jthread> threads;
        threads.reserve(static_cast<std::size_t>(cfg.workers));
        for (int w = 0; w < cfg.workers; ++w) {
            auto& mine = parts[static_cast<std::size_t>(w)];
            auto& out = outputs[static_cast<std::size_t>(w)];
            double off = offsets[static_cast<std::size_t>(w)];
            if (cfg.format == CrawlFormat::Shorts)
                threads.emplace_back([&, w, off] {
                    shorts_worker(w, mine, cfg, factory, off, epoch, out);
                });
            else
                threads.emplace_back([&, w, off] {
                    longform_worker(w, mine, cfg, factory, off, epoch, out);
                });
        }
    }
    const double wall_s =
        std::chrono::duration<double>(Clock::now() - epoch).count();

    CrawlResult result;
    result.total_roots = cfg.roots.size();
    for (auto& out : outputs) {
        result.records.insert(result.records.end(), out.records.begin(),
                              out.records.end());
        result.event_log.insert(result.event_log.end(), out.events.begin(),
                                out.events.end());
        result.per_worker.push_back(out.stats);
        result.failed_roots += out.failed_roots;
    }
    std::stable_sort(result.event_log.begin(), result.event_log.end(),
                     [](const CrawlEvent& a, const CrawlEvent& b) { return a.t_ms < b.t_ms; });

    if (cfg.backend == BackendKind::Sim) {
        // Logical timestamps: byte-reproducible outputs for golden tests.
        for (std::size_t i = 0; i < result.records.size(); ++i)
            result.records[i].fetched_at_ms = static_cast<std::int64_t>(i);
    }

    // Metadata once per unique ID, after the workers are done.
    {
        auto backend = factory(-1);
        std::unordered_set<VideoId> seen;
        auto add = [&](const VideoId& id) {
            if (seen.insert(id).second)
                result.metadata.emplace_back(id, backend->fetch_metadata(id));
        };
        for (const auto& root : cfg.roots)
            if (std::any_of(result.records.begin(), result.records.end(),
                            [&](const auto& rec) { return rec.root_id == root; }))
                add(root);
        for (const auto& rec : result.records) add(rec.video_id);
    }

    result.timing.workers = cfg.workers;
    result.timing.wall_s = wall_s;
    result.timing.theoretical_s = theoretical_duration(cfg, nominal_load_s);
    result.timing.overhead_ratio =
        result.timing.theoretical_s > 0 ? wall_s / result.timing.theoretical_s - 1.0 : 0.0;
    CrawlConfig serial = cfg;
    serial.workers = 1;
    double serial_theoretical = theoretical_duration(serial, nominal_load_s);
    result.timing.speedup_vs_single =
        serial_theoretical > 0 && wall_s > 0 ? serial_theoretical / wall_s : 1.0;
    return result;
}

}  // namespace orchestrator_detail

inline CrawlResult run_shorts_crawl(const CrawlConfig& cfg, const BackendFactory& factory,
                                    double nominal_load_s = 0.0) {
    if (cfg.format != CrawlFormat::Shorts)
        throw ConfigError("run_shorts_crawl: config format is not Shorts");
    return orchestrator_detail::run_crawl(cfg, factory, nominal_load_s);
}

inline CrawlResult run_longform_crawl(const CrawlConfig& cfg, const BackendFactory& factory,
                                      double nominal_load_s) {
    if (cfg.format != CrawlFormat::LongForm)
        throw ConfigError("run_longform_crawl: config format is not LongForm");
    return orchestrator_detail::run_crawl(cfg, factory, nominal_load_s);
}

inline BackendFactory sim_backend_factory(sim::Platform& platform) {
    return [&platform](int session_id) {
        return std::make_unique<SimBackend>(platform, session_id);
    };
}

inline CrawlResult run_shorts_crawl(const CrawlConfig& cfg, sim::Platform& platform) {
    for (const auto& root : cfg.roots) platform.register_root(root);
    return run_shorts_crawl(cfg, sim_backend_factory(platform));
}

inline CrawlResult run_longform_crawl(const CrawlConfig& cfg, sim::Platform& platform) {
    for (const auto& root : cfg.roots) platform.register_root(root);
    double nominal = cfg.page_load_s > 0 ? cfg.page_load_s
                                         : platform.params().latency_base_ms / 1000.0;
    return run_longform_crawl(cfg, sim_backend_factory(platform), nominal);
}

}  // namespace recgraph
