#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recgraph/errors.hpp"

namespace recgraph {

enum class VideoKind { Regular, Short, Ad, Playlist, LiveStream };

inline const char* to_string(VideoKind k) {
    switch (k) {
        case VideoKind::Regular: return "regular";
        case VideoKind::Short: return "short";
        case VideoKind::Ad: return "ad";
        case VideoKind::Playlist: return "playlist";
        case VideoKind::LiveStream: return "livestream";
    }
    return "?";
}

inline std::optional<VideoKind> video_kind_from(std::string_view s) {
    if (s == "regular") return VideoKind::Regular;
    if (s == "short") return VideoKind::Short;
    if (s == "ad") return VideoKind::Ad;
    if (s == "playlist") return VideoKind::Playlist;
    if (s == "livestream") return VideoKind::LiveStream;
    return std::nullopt;
}

/// URL-safe video identifier, 5-32 chars of [A-Za-z0-9_-].
class VideoId {
  public:
    static bool valid(std::string_view token) {
        if (token.size() < 5 || token.size() > 32) return false;
        for (char c : token) {
            bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_';
            if (!ok) return false;
        }
        return true;
    }

    static std::optional<VideoId> parse(std::string_view token) {
        if (!valid(token)) return std::nullopt;
        return VideoId(std::string(token));
    }

    const std::string& str() const { return value_; }

    friend auto operator<=>(const VideoId&, const VideoId&) = default;

  private:
    explicit VideoId(std::string v) : value_(std::move(v)) {}
    std::string value_;
};

struct VideoMeta {
    VideoId id;
    VideoKind kind = VideoKind::Regular;
    std::string title;
    std::string description;
    std::optional<std::string> transcript;
    std::vector<std::string> comments;
    std::uint64_t views = 0;
    std::uint64_t likes = 0;
    std::uint64_t comment_count = 0;
    bool comments_disabled = false;
    double duration_s = 1.0;
};

enum class CrawlFormat { Shorts, LongForm };
enum class StaggerMode { Synchronized, EvenOffset };
enum class BackendKind { Sim, LiveAdapter };

/// Session-level timing knobs. Defaults match interactive use; tests
/// shrink them so crawls finish in seconds.
struct SessionTuning {
    double implicit_wait_s = 10.0;  // load budget before LoadTimeout
    double grace_s = 1.0;           // fixed pause after the title element appears
    double poll_interval_s = 0.1;   // URL / title poll rate
    double resend_budget_s = 2.0;   // URL unchanged this long -> re-send key
};

struct CrawlConfig {
    CrawlFormat format = CrawlFormat::Shorts;
    std::vector<VideoId> roots;
    int depth = 1;            // D
    int breadth = 5;          // B, LongForm only
    double dwell_s = 0.0;     // W, Shorts watch time
    int workers = 1;          // N
    StaggerMode stagger = StaggerMode::Synchronized;
    int max_retries = 3;
    BackendKind backend = BackendKind::Sim;
    // Nominal per-page load time L for the LongForm timing arithmetic.
    // Negative means "derive from the backend's latency config".
    double page_load_s = -1.0;
    SessionTuning tuning;
    bool progress = false;  // one stderr line per completed root

    void validate() const {
        if (roots.empty()) throw ConfigError("crawl config: no roots");
        if (depth < 1) throw ConfigError("crawl config: depth must be >= 1");
        if (workers < 1) throw ConfigError("crawl config: workers must be >= 1");
        if (max_retries < 1) throw ConfigError("crawl config: max_retries must be >= 1");
        if (dwell_s < 0) throw ConfigError("crawl config: dwell must be >= 0");
        if (format == CrawlFormat::Shorts) {
            if (breadth != 1)
                throw ConfigError("crawl config: shorts is a chain, breadth must be 1");
        } else {
            // Beyond ~10-15 initially loaded items the page would need scrolling.
            if (breadth < 1 || breadth > 10)
                throw ConfigError("crawl config: long-form breadth must be in [1,10]");
        }
    }
};

/// One harvested edge of the recommendation graph.
struct RecommendationRecord {
    VideoId root_id;
    VideoId parent_id;
    VideoId video_id;
    int depth = 1;     // >= 1; depth 1 => parent == root
    int position = 1;  // rank within the parent's list; always 1 for Shorts
    int worker_id = 0;
    double dwell_s = 0.0;
    bool is_ad = false;
    std::int64_t fetched_at_ms = 0;  // logical sequence number in sim mode

    friend bool operator==(const RecommendationRecord&, const RecommendationRecord&) = default;
};

struct TimingReport {
    double wall_s = 0.0;
    double theoretical_s = 0.0;
    double overhead_ratio = 0.0;  // wall / theoretical - 1 when theoretical > 0
    int workers = 1;
    double speedup_vs_single = 1.0;  // serial theoretical time / measured wall
};

/// Minimum crawl duration implied by the config alone.
/// Shorts: ceil(R/N) * D * W. LongForm: ceil(R/N) * sum_{d=0}^{D-1} B^d * L.
inline double theoretical_duration(const CrawlConfig& cfg, double nominal_load_s) {
    const double per_worker_roots =
        std::ceil(static_cast<double>(cfg.roots.size()) / cfg.workers);
    if (cfg.format == CrawlFormat::Shorts)
        return per_worker_roots * cfg.depth * cfg.dwell_s;
    double pages_per_root = 0.0;
    double level = 1.0;
    for (int d = 0; d < cfg.depth; ++d) {
        pages_per_root += level;
        level *= cfg.breadth;
    }
    return per_worker_roots * pages_per_root * nominal_load_s;
}

inline double theoretical_duration(const CrawlConfig& cfg) {
    return theoretical_duration(cfg, cfg.page_load_s > 0 ? cfg.page_load_s : 0.0);
}

/// Pulls the ID token out of a watch or shorts URL (absolute or relative).
/// Query parameters after the ID are stripped. Returns nullopt when neither
/// template matches or the token is not a valid VideoId.
inline std::optional<VideoId> extract_video_id(std::string_view url) {
    for (std::string_view prefix : {std::string_view("/watch?v="), std::string_view("/shorts/")}) {
        auto pos = url.find(prefix);
        if (pos == std::string_view::npos) continue;
        auto rest = url.substr(pos + prefix.size());
        auto end = rest.find_first_of("&?#/");
        if (end != std::string_view::npos) rest = rest.substr(0, end);
        if (auto id = VideoId::parse(rest)) return id;
    }
    return std::nullopt;
}

inline std::string watch_url(const VideoId& id) {
    return "https://www.youtube.com/watch?v=" + id.str();
}

inline std::string shorts_url(const VideoId& id) {
    return "https://www.youtube.com/shorts/" + id.str();
}

inline std::string video_url(const VideoId& id, CrawlFormat fmt) {
    return fmt == CrawlFormat::Shorts ? shorts_url(id) : watch_url(id);
}

}  // namespace recgraph

template <>
struct std::hash<recgraph::VideoId> {
    std::size_t operator()(const recgraph::VideoId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
