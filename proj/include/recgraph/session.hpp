#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "recgraph/core.hpp"
#include "recgraph/errors.hpp"
#include "recgraph/sim_platform.hpp"

namespace recgraph {

/// The adapter slot: what a browsing backend must provide. A live-browser
/// adapter would implement this; only the sim adapter ships.
class Backend {
  public:
    virtual ~Backend() = default;
    virtual void open(const std::string& url) = 0;
    virtual void send_advance_key() = 0;
    virtual std::string current_url() const = 0;
    virtual bool title_present() const = 0;
    virtual sim::Document fetch_document() = 0;
    virtual void report_dwell(double dwell_s) = 0;
    virtual VideoMeta fetch_metadata(const VideoId& id) = 0;
};

class SimBackend : public Backend {
  public:
    SimBackend(sim::Platform& platform, int session_id)
        : platform_(platform), session_id_(session_id) {}

    void open(const std::string& url) override {
        auto id = extract_video_id(url);
        if (!id) throw NotFoundError("sim backend: cannot open url " + url);
        if (!platform_.known(*id))
            throw NotFoundError("sim backend: unknown video " + id->str());
        auto ticket = platform_.begin_load();
        sleep_ms(ticket.latency_ms);
        url_ = url;
        loaded_ = !platform_.roll_render_failure();
    }

    void send_advance_key() override {
        if (platform_.roll_advance_failure()) return;  // dropped key-event
        if (navigating_) return;  // duplicate key-events during navigation are no-ops
        navigating_ = true;
        auto cur = extract_video_id(url_);
        if (!cur) throw DriverDesync("sim backend: current url lost");
        VideoId next = platform_.next_short(chain_state_, *cur, last_dwell_s_);
        url_ = shorts_url(next);
        loaded_ = true;
        navigating_ = false;
    }

    std::string current_url() const override { return url_; }
    bool title_present() const override { return loaded_; }

    sim::Document fetch_document() override {
        auto id = extract_video_id(url_);
        if (!id) throw DriverDesync("sim backend: current url lost");
        return platform_.render_watch_page(*id);
    }

    void report_dwell(double dwell_s) override { last_dwell_s_ = dwell_s; }

    VideoMeta fetch_metadata(const VideoId& id) override { return platform_.meta(id); }

    int session_id() const { return session_id_; }

  private:
    static void sleep_ms(double ms) {
        if (ms > 0)
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
    }

    sim::Platform& platform_;
    int session_id_;
    std::string url_;
    bool loaded_ = false;
    bool navigating_ = false;
    double last_dwell_s_ = 0.0;
    sim::ShortSessionState chain_state_;
};

/// One browsing session, owned by exactly one worker. Fresh at construction
/// (clear history, the sim analogue of a new browser profile).
class Session {
  public:
    Session(std::unique_ptr<Backend> backend, SessionTuning tuning, int max_retries = 3)
        : backend_(std::move(backend)), tuning_(tuning), max_retries_(max_retries) {}

    /// Three-step load protocol: element-wait budget, poll for the title
    /// element, then a fixed grace pause.
    void open_video(const VideoId& id, CrawlFormat format) {
        backend_->open(video_url(id, format));
        auto deadline = Clock::now() + to_duration(tuning_.implicit_wait_s);
        while (!backend_->title_present()) {
            if (Clock::now() >= deadline)
                throw LoadTimeout("page load budget exhausted for " + id.str());
            sleep_s(tuning_.poll_interval_s);
        }
        sleep_s(tuning_.grace_s);
        history_.push_back(id);
    }

    /// Waits out the dwell, issues one advance key-event, then polls the URL
    /// until the video ID changes. Re-sends the key-event when the URL stays
    /// unchanged past the re-send budget.
    VideoId advance_short(double dwell_s) {
        sleep_s(dwell_s);
        backend_->report_dwell(dwell_s);
        const VideoId before = current_video_id();
        backend_->send_advance_key();
        auto sent_at = Clock::now();
        int resends = 0;
        while (true) {
            VideoId now_id = current_video_id();
            if (now_id != before) {
                history_.push_back(now_id);
                return now_id;
            }
            if (Clock::now() - sent_at > to_duration(tuning_.resend_budget_s)) {
                if (++resends > max_retries_)
                    throw AdvanceStuck("url unchanged after " +
                                       std::to_string(resends) + " key-events at " +
                                       before.str());
                backend_->send_advance_key();
                sent_at = Clock::now();
            }
            sleep_s(tuning_.poll_interval_s);
        }
    }

    VideoId current_video_id() const {
        auto id = extract_video_id(backend_->current_url());
        if (!id)
            throw DriverDesync("session url matches neither template: " +
                               backend_->current_url());
        return *id;
    }

    sim::Document document() { return backend_->fetch_document(); }
    VideoMeta metadata(const VideoId& id) { return backend_->fetch_metadata(id); }
    const std::vector<VideoId>& history() const { return history_; }
    Backend& backend() { return *backend_; }

  private:
    using Clock = std::chrono::steady_clock;

    static std::chrono::duration<double> to_duration(double s) {
        return std::chrono::duration<double>(s);
    }
    static void sleep_s(double s) {
        if (s > 0) std::this_thread::sleep_for(to_duration(s));
    }

    std::unique_ptr<Backend> backend_;
    SessionTuning tuning_;
    int max_retries_;
    std::vector<VideoId> history_;
};

}  // namespace recgraph
