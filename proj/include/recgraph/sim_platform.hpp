#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "recgraph/core.hpp"
#include "recgraph/errors.hpp"
#include "recgraph/lexicon_data.hpp"

namespace recgraph::sim {

struct SimParams {
    std::uint64_t seed = 1;
    std::size_t catalog_size = 1'000'000;  // soft bound, generation is lazy
    int breadth_served = 14;               // entries rendered in the column

    // Engagement model: counters at graph distance d from a root scale as
    // base * g^d with multiplicative log-normal noise (sigma in log10 units).
    double engagement_base = 1000.0;
    double engagement_drift = 1.5;  // g
    double log10_noise_sigma = 0.5;

    // Text model: per-class phrase weights at depth d are
    // max(0, emotion_base[c] + d * emotion_drift[c]).
    std::array<double, lexicon::kEmotionClassCount> emotion_base = {
        0.15, 0.05, 0.05, 0.15, 0.50, 0.05, 0.05};
    std::array<double, lexicon::kEmotionClassCount> emotion_drift{};

    // Toxicity model: a video is "toxic" with probability toxicity_tail_rate;
    // toxic videos carry a flagged-token density that grows with depth.
    double toxicity_tail_rate = 0.0;
    double toxic_density_base = 0.1;
    double toxic_density_slope = 0.0;  // per depth
    double comment_flag_density = 0.0;  // applied to every video's comments

    int ad_period = 5;
    double ad_dwell_threshold_s = 60.0;

    double latency_base_ms = 50.0;
    double latency_jitter_ms = 0.0;
    int capacity = 25;                 // concurrently loading pages before penalty
    double latency_penalty_ms = 0.5;   // per in-flight load beyond capacity
    double fail_rate = 0.02;           // transient render failure probability
    double advance_fail_rate = 0.0;    // key-event dropped (exercises re-send)

    double noise_ad_rate = 0.0;
    double noise_playlist_rate = 0.0;
    double noise_live_rate = 0.0;

    int comments_per_video = 3;
    double comments_disabled_rate = 0.1;

    void validate() const {
        if (catalog_size == 0) throw ConfigError("sim: catalog_size must be positive");
        if (breadth_served < 1) throw ConfigError("sim: breadth_served must be >= 1");
        if (engagement_drift <= 0) throw ConfigError("sim: engagement_drift must be > 0");
        if (ad_period < 2) throw ConfigError("sim: ad_period must be >= 2");
        if (capacity < 1) throw ConfigError("sim: capacity must be >= 1");
        for (double r : {toxicity_tail_rate, comment_flag_density, fail_rate,
                         advance_fail_rate, noise_ad_rate, noise_playlist_rate,
                         noise_live_rate, comments_disabled_rate})
            if (r < 0.0 || r > 1.0) throw ConfigError("sim: rates must be in [0,1]");
        if (noise_ad_rate + noise_playlist_rate + noise_live_rate > 1.0)
            throw ConfigError("sim: noise rates sum above 1");
        if (latency_base_ms < 0 || latency_jitter_ms < 0 || latency_penalty_ms < 0)
            throw ConfigError("sim: latencies must be >= 0");
    }
};

/// Serialized markup of one watch page.
struct Document {
    std::string text;
};

/// Tracks one shorts session's ad bookkeeping.
struct ShortSessionState {
    int consecutive_high = 0;
    std::optional<VideoId> resume_from;  // chain position before an ad was served
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Cheap counter-based RNG: the k-th draw of stream `base` is pure function
/// of (base, k), so generation order never matters.
class HashRng {
  public:
    explicit HashRng(std::uint64_t base) : base_(base) {}

    std::uint64_t next_u64() { return splitmix64(base_ + counter_++); }

    double next_u01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_gauss() {
        // Box-Muller; clamp u away from 0.
        double u = std::max(next_u01(), 1e-12);
        double v = next_u01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586 * v);
    }

    std::size_t next_index(std::size_t n) { return next_u64() % n; }

  private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

inline constexpr char kIdAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

inline std::string encode_id(std::uint64_t h1, std::uint64_t h2) {
    std::string out(11, '?');
    for (int i = 0; i < 10; ++i) {
        out[i] = kIdAlphabet[h1 & 63];
        h1 >>= 6;
    }
    out[10] = kIdAlphabet[h2 & 63];
    return out;
}

}  // namespace detail

class Platform;

/// RAII handle for one in-flight page load; the latency sample is computed
/// at acquisition from the concurrent load count.
class LoadTicket {
  public:
    LoadTicket(LoadTicket&& other) noexcept
        : latency_ms(other.latency_ms), in_flight_(other.in_flight_) {
        other.in_flight_ = nullptr;
    }
    LoadTicket& operator=(LoadTicket&&) = delete;
    ~LoadTicket() {
        if (in_flight_) in_flight_->fetch_sub(1, std::memory_order_relaxed);
    }

    double latency_ms = 0.0;

  private:
    friend class Platform;
    LoadTicket(double lat, std::atomic<int>* in_flight)
        : latency_ms(lat), in_flight_(in_flight) {}
    std::atomic<int>* in_flight_;
};

/// Deterministic seeded video platform: lazily generated catalog, watch-page
/// markup with noise entities, shorts chains with periodic ad injection, and
/// a capacity-based latency model. Identical SimParams give bit-identical
/// behavior.
class Platform {
  public:
    explicit Platform(SimParams params) : p_(params) { p_.validate(); }

    const SimParams& params() const { return p_; }

    void register_root(const VideoId& id) {
        std::lock_guard lk(mu_);
        entries_.try_emplace(id.str(), Entry{0, VideoKind::Regular});
    }

    /// Mints `n` seeded root IDs (depth 0) for tests and self-contained runs.
    std::vector<VideoId> mint_roots(std::size_t n) {
        if (n > p_.catalog_size) throw ConfigError("sim: more roots than catalog_size");
        std::vector<VideoId> out;
        out.reserve(n);
        std::lock_guard lk(mu_);
        for (std::size_t i = 0; i < n; ++i) {
            VideoId id = mint_locked(detail::splitmix64(p_.seed ^ 0x0011223344556677ULL) + i,
                                     0, VideoKind::Regular);
            out.push_back(id);
        }
        return out;
    }

    bool known(const VideoId& id) const {
        std::lock_guard lk(mu_);
        return entries_.contains(id.str());
    }

    int depth_of(const VideoId& id) const {
        std::lock_guard lk(mu_);
        auto it = entries_.find(id.str());
        if (it == entries_.end()) throw NotFoundError("sim: unknown video " + id.str());
        return it->second.depth;
    }

    VideoKind kind_of(const VideoId& id) const {
        std::lock_guard lk(mu_);
        auto it = entries_.find(id.str());
        if (it == entries_.end()) throw NotFoundError("sim: unknown video " + id.str());
        return it->second.kind;
    }

    VideoMeta meta(const VideoId& id) const {
        Entry e;
        {
            std::lock_guard lk(mu_);
            auto it = entries_.find(id.str());
            if (it == entries_.end())
                throw NotFoundError("sim: unknown video " + id.str());
            e = it->second;
        }
        return generate_meta(id, e.depth, e.kind);
    }

    /// Renders the watch page for `id`: the recommendation column lists
    /// breadth_served entries in seeded rank order, interleaving ad/playlist/
    /// live noise per the configured rates. Rendering the same page twice
    /// yields the same markup.
    Document render_watch_page(const VideoId& id) {
        VideoMeta m = meta(id);
        auto column = column_for(id);
        std::string html;
        html.reserve(1024 + column.size() * 256);
        html += "<html><head><title>";
        html += m.title;
        html += " - SimTube</title></head>\n<body>\n<div id=\"primary\"><h1 class=\"title\">";
        html += m.title;
        html += "</h1></div>\n<div id=\"related\">\n";
        for (const auto& entry : column) {
            switch (entry.kind) {
                case VideoKind::Ad:
                    // Ads carry only a description-class anchor, no thumbnail ID.
                    html += "<div class=\"ad-slot\"><span class=\"badge\">Sponsored</span>\n"
                            "<a class=\"yt-simple-endpoint style-scope "
                            "ytd-compact-video-renderer\" rel=\"nofollow\" href=\"/watch?v=";
                    html += entry.token;
                    html += "\">";
                    html += entry.title;
                    html += "</a></div>\n";
                    break;
                case VideoKind::Playlist:
                    html += "<ytd-thumbnail class=\"style-scope ytd-compact-video-renderer\" "
                            "size=\"medium\" loaded=\"\">\n"
                            "<a id=\"thumbnail\" class=\"yt-simple-endpoint inline-block "
                            "style-scope ytd-thumbnail\" rel=\"nofollow\" href=\"/playlist?list=";
                    html += entry.token;
                    html += "\"></a>\n</ytd-thumbnail>\n";
                    break;
                default: {
                    html += "<ytd-thumbnail class=\"style-scope ytd-compact-video-renderer\" "
                            "size=\"medium\"";
                    if (entry.kind == VideoKind::LiveStream) html += " is-live-video=\"\"";
                    html += " loaded=\"\">\n"
                            "<a id=\"thumbnail\" class=\"yt-simple-endpoint inline-block "
                            "style-scope ytd-thumbnail\" aria-hidden=\"true\" tabindex=\"-1\" "
                            "rel=\"nofollow\" href=\"/watch?v=";
                    html += entry.token;
                    html += "\"></a>\n</ytd-thumbnail>\n"
                            "<a class=\"yt-simple-endpoint style-scope "
                            "ytd-compact-video-renderer\" rel=\"nofollow\" href=\"/watch?v=";
                    html += entry.token;
                    html += "\">";
                    html += entry.title;
                    html += "</a>\n";
                }
            }
        }
        html += "</div>\n</body></html>\n";
        return Document{std::move(html)};
    }

    /// Serves the next chain video for a shorts session. After ad_period
    /// consecutive advances at or above the dwell threshold an Ad is served
    /// and the counter resets; otherwise the seeded rank-1 recommendation.
    VideoId next_short(ShortSessionState& state, const VideoId& current,
                       double observed_dwell_s) {
        if (observed_dwell_s >= p_.ad_dwell_threshold_s)
            state.consecutive_high += 1;
        else
            state.consecutive_high = 0;

        VideoId base = state.resume_from ? *state.resume_from : current;
        state.resume_from.reset();

        int base_depth = depth_of(base);
        if (state.consecutive_high >= p_.ad_period) {
            state.consecutive_high = 0;
            state.resume_from = base;
            std::lock_guard lk(mu_);
            return mint_locked(stream_of(base, 0xAD00AD00AD00AD00ULL), base_depth + 1,
                               VideoKind::Ad);
        }
        return chain_child(base, base_depth);
    }

    /// One concurrent page-load slot. Latency grows linearly once in-flight
    /// loads exceed the capacity, which produces the speedup plateau.
    LoadTicket begin_load() {
        int in_flight = in_flight_.fetch_add(1, std::memory_order_relaxed) + 1;
        double lat = p_.latency_base_ms +
                     p_.latency_penalty_ms * std::max(0, in_flight - p_.capacity);
        if (p_.latency_jitter_ms > 0) {
            detail::HashRng rng(stream_of_counter(0x4a177e50ULL));
            lat += (rng.next_u01() - 0.5) * 2.0 * p_.latency_jitter_ms;
        }
        return LoadTicket(std::max(lat, 0.0), &in_flight_);
    }

    int in_flight() const { return in_flight_.load(std::memory_order_relaxed); }

    /// Rolls the transient render-failure injection.
    bool roll_render_failure() {
        if (p_.fail_rate <= 0) return false;
        detail::HashRng rng(stream_of_counter(0xFA17FA17ULL));
        return rng.next_u01() < p_.fail_rate;
    }

    bool roll_advance_failure() {
        if (p_.advance_fail_rate <= 0) return false;
        detail::HashRng rng(stream_of_counter(0xD20BD20BULL));
        return rng.next_u01() < p_.advance_fail_rate;
    }

  private:
    struct Entry {
        int depth = 0;
        VideoKind kind = VideoKind::Regular;
    };

    struct ColumnEntry {
        VideoKind kind;
        std::string token;  // video ID, or playlist token for Playlist entries
        std::string title;
    };

    std::uint64_t stream_of(const VideoId& id, std::uint64_t tag) const {
        return detail::splitmix64(p_.seed ^ detail::hash_str(id.str()) ^ tag);
    }

    std::uint64_t stream_of_counter(std::uint64_t tag) {
        return detail::splitmix64(p_.seed ^ tag ^
                                  roll_counter_.fetch_add(1, std::memory_order_relaxed));
    }

    // requires mu_ held
    VideoId mint_locked(std::uint64_t stream, int depth, VideoKind kind) {
        detail::HashRng rng(stream);
        for (;;) {
            std::string token = detail::encode_id(rng.next_u64(), rng.next_u64());
            auto [it, inserted] = entries_.try_emplace(token, Entry{depth, kind});
            if (inserted || (it->second.depth == depth && it->second.kind == kind))
                return *VideoId::parse(token);
            // 64-bit collision with a different entry; draw again.
        }
    }

    VideoId chain_child(const VideoId& parent, int parent_depth) {
        std::lock_guard lk(mu_);
        return mint_locked(stream_of(parent, 0xC4A17C4A17ULL), parent_depth + 1,
                           VideoKind::Short);
    }

    std::vector<ColumnEntry> column_for(const VideoId& parent) {
        {
            std::lock_guard lk(mu_);
            auto it = columns_.find(parent.str());
            if (it != columns_.end()) return it->second;
        }
        int parent_depth = depth_of(parent);
        detail::HashRng rng(stream_of(parent, 0xC07A3117ULL));
        std::vector<ColumnEntry> col;
        col.reserve(static_cast<std::size_t>(p_.breadth_served));
        std::lock_guard lk(mu_);
        int child_rank = 0;
        for (int slot = 0; slot < p_.breadth_served; ++slot) {
            double r = rng.next_u01();
            if (r < p_.noise_ad_rate) {
                VideoId ad = mint_locked(stream_of(parent, 0xAD5107ULL + slot),
                                         parent_depth + 1, VideoKind::Ad);
                col.push_back({VideoKind::Ad, ad.str(), ad_title(ad)});
            } else if (r < p_.noise_ad_rate + p_.noise_playlist_rate) {
                detail::HashRng prng(stream_of(parent, 0x9157ULL + slot));
                col.push_back({VideoKind::Playlist,
                               "PL" + detail::encode_id(prng.next_u64(), prng.next_u64()),
                               ""});
            } else if (r < p_.noise_ad_rate + p_.noise_playlist_rate + p_.noise_live_rate) {
                VideoId live = mint_locked(stream_of(parent, 0x11BEULL + slot),
                                           parent_depth + 1, VideoKind::LiveStream);
                col.push_back({VideoKind::LiveStream, live.str(),
                               title_of(live, parent_depth + 1)});
            } else {
                VideoId child =
                    mint_locked(detail::splitmix64(stream_of(parent, 0xC411DULL) +
                                                   static_cast<std::uint64_t>(child_rank)),
                                parent_depth + 1, VideoKind::Regular);
                ++child_rank;
                col.push_back({VideoKind::Regular, child.str(),
                               title_of(child, parent_depth + 1)});
            }
        }
        auto [it, _] = columns_.try_emplace(parent.str(), std::move(col));
        return it->second;
    }

    std::string title_of(const VideoId& id, int depth) const {
        detail::HashRng rng(stream_of(id, 0x7E47ULL));
        bool toxic = rng.next_u01() < p_.toxicity_tail_rate;
        return sample_text(rng, 6, depth, toxic ? toxic_density(depth) : 0.0);
    }

    std::string ad_title(const VideoId& id) const {
        detail::HashRng rng(stream_of(id, 0x7E47ULL));
        std::string out;
        for (int i = 0; i < 5; ++i) {
            if (i) out += ' ';
            out += lexicon::kAdWords[rng.next_index(lexicon::kAdWords.size())];
        }
        return out;
    }

    double toxic_density(int depth) const {
        return std::clamp(p_.toxic_density_base + p_.toxic_density_slope * depth, 0.0, 1.0);
    }

    std::string sample_text(detail::HashRng& rng, int words, int depth,
                            double flag_density) const {
        std::array<double, lexicon::kEmotionClassCount> w;
        double total = 0.0;
        for (std::size_t c = 0; c < w.size(); ++c) {
            w[c] = std::max(0.0, p_.emotion_base[c] + depth * p_.emotion_drift[c]);
            total += w[c];
        }
        std::string out;
        for (int i = 0; i < words; ++i) {
            if (i) out += ' ';
            if (flag_density > 0 && rng.next_u01() < flag_density) {
                out += lexicon::kToxicFlags[rng.next_index(lexicon::kToxicFlags.size())];
                continue;
            }
            std::size_t cls = lexicon::kNeutral;
            if (total > 0) {
                double r = rng.next_u01() * total;
                for (std::size_t c = 0; c < w.size(); ++c) {
                    if (r < w[c]) {
                        cls = c;
                        break;
                    }
                    r -= w[c];
                }
            }
            const auto& bank = *lexicon::kWordsByClass[cls];
            out += bank[rng.next_index(bank.size())];
        }
        return out;
    }

    VideoMeta generate_meta(const VideoId& id, int depth, VideoKind kind) const {
        VideoMeta m{.id = id, .kind = kind};
        detail::HashRng trng(stream_of(id, 0x7E47ULL));
        bool toxic = trng.next_u01() < p_.toxicity_tail_rate;
        double density = toxic ? toxic_density(depth) : 0.0;
        m.title = sample_text(trng, 6, depth, density);

        if (kind == VideoKind::Ad) {
            m.title = ad_title(id);
            m.description = ad_title(id) + " limited offer";
            m.duration_s = 20.0;
            return m;  // ads keep zero engagement counters
        }

        detail::HashRng rng(stream_of(id, 0x3E7AULL));
        double g = p_.engagement_drift;
        double noise = p_.log10_noise_sigma > 0
                           ? std::pow(10.0, rng.next_gauss() * p_.log10_noise_sigma)
                           : 1.0;
        m.views = static_cast<std::uint64_t>(
            std::llround(p_.engagement_base * std::pow(g, depth) * noise));
        double like_ratio = std::clamp(
            0.05 * (p_.log10_noise_sigma > 0
                        ? std::pow(10.0, rng.next_gauss() * p_.log10_noise_sigma * 0.5)
                        : 1.0),
            0.0, 1.0);
        m.likes = static_cast<std::uint64_t>(std::floor(m.views * like_ratio));
        double comment_ratio = std::clamp(
            0.2 * (p_.log10_noise_sigma > 0
                       ? std::pow(10.0, rng.next_gauss() * p_.log10_noise_sigma * 0.5)
                       : 1.0),
            0.0, 1.0);
        m.comment_count = static_cast<std::uint64_t>(std::floor(m.likes * comment_ratio));

        m.description = sample_text(rng, 24, depth, density);
        if (kind == VideoKind::Regular)
            m.transcript = sample_text(rng, 60, depth, density);
        m.duration_s = kind == VideoKind::Short ? 15.0 + rng.next_u01() * 45.0
                                                : 60.0 + rng.next_u01() * 1140.0;

        if (rng.next_u01() < p_.comments_disabled_rate) {
            m.comments_disabled = true;
            m.comment_count = 0;
        } else {
            for (int i = 0; i < p_.comments_per_video; ++i)
                m.comments.push_back(sample_text(rng, 10, depth, p_.comment_flag_density));
        }
        return m;
    }

    SimParams p_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, Entry> entries_;
    std::unordered_map<std::string, std::vector<ColumnEntry>> columns_;
    std::atomic<int> in_flight_{0};
    std::atomic<std::uint64_t> roll_counter_{0};
};

}  // namespace recgraph::sim
