#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "recgraph/errors.hpp"
#include "recgraph/io.hpp"
#include "recgraph/sim_platform.hpp"

namespace recgraph {

/// Flat key=value config file; '#' starts a comment. Keys are listed in the
/// README. Unknown keys are rejected so typos do not silently fall back to
/// defaults.
class KeyValueConfig {
  public:
    static KeyValueConfig load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path.string());
        KeyValueConfig cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            auto trim = [](std::string s) {
                auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string();
                auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            std::string t = trim(line);
            if (t.empty()) continue;
            auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected key=value");
            cfg.values_[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    std::string get_string(const std::string& key, std::string fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return io::parse_double(it->second, "config key " + key);
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        return io::parse_int(it->second, "config key " + key);
    }

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

/// Applies sim.* keys from a config file over defaults. Flags applied by the
/// CLI afterwards win (precedence: flags > env > file > defaults).
inline sim::SimParams sim_params_from(const KeyValueConfig& cfg,
                                      sim::SimParams base = {}) {
    static const char* known[] = {
        "sim.seed", "sim.catalog_size", "sim.breadth_served", "sim.engagement_base",
        "sim.engagement_drift", "sim.log10_noise_sigma", "sim.toxicity_tail_rate",
        "sim.toxic_density_base", "sim.toxic_density_slope", "sim.comment_flag_density",
        "sim.ad_period", "sim.ad_dwell_threshold_s", "sim.latency_base_ms",
        "sim.latency_jitter_ms", "sim.capacity", "sim.latency_penalty_ms",
        "sim.fail_rate", "sim.advance_fail_rate", "sim.noise_ad_rate",
        "sim.noise_playlist_rate", "sim.noise_live_rate", "sim.comments_per_video",
        "sim.comments_disabled_rate",
        "sim.emotion_base.anger", "sim.emotion_base.disgust", "sim.emotion_base.fear",
        "sim.emotion_base.joy", "sim.emotion_base.neutral", "sim.emotion_base.sadness",
        "sim.emotion_base.surprise",
        "sim.emotion_drift.anger", "sim.emotion_drift.disgust", "sim.emotion_drift.fear",
        "sim.emotion_drift.joy", "sim.emotion_drift.neutral", "sim.emotion_drift.sadness",
        "sim.emotion_drift.surprise",
        "scorer.url",
    };
    for (const auto& [key, value] : cfg.values()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) throw ConfigError("unknown config key: " + key);
    }
    sim::SimParams p = base;
    p.seed = static_cast<std::uint64_t>(cfg.get_int("sim.seed", static_cast<std::int64_t>(p.seed)));
    p.catalog_size = static_cast<std::size_t>(
        cfg.get_int("sim.catalog_size", static_cast<std::int64_t>(p.catalog_size)));
    p.breadth_served = static_cast<int>(cfg.get_int("sim.breadth_served", p.breadth_served));
    p.engagement_base = cfg.get_double("sim.engagement_base", p.engagement_base);
    p.engagement_drift = cfg.get_double("sim.engagement_drift", p.engagement_drift);
    p.log10_noise_sigma = cfg.get_double("sim.log10_noise_sigma", p.log10_noise_sigma);
    p.toxicity_tail_rate = cfg.get_double("sim.toxicity_tail_rate", p.toxicity_tail_rate);
    p.toxic_density_base = cfg.get_double("sim.toxic_density_base", p.toxic_density_base);
    p.toxic_density_slope = cfg.get_double("sim.toxic_density_slope", p.toxic_density_slope);
    p.comment_flag_density =
        cfg.get_double("sim.comment_flag_density", p.comment_flag_density);
    p.ad_period = static_cast<int>(cfg.get_int("sim.ad_period", p.ad_period));
    p.ad_dwell_threshold_s =
        cfg.get_double("sim.ad_dwell_threshold_s", p.ad_dwell_threshold_s);
    p.latency_base_ms = cfg.get_double("sim.latency_base_ms", p.latency_base_ms);
    p.latency_jitter_ms = cfg.get_double("sim.latency_jitter_ms", p.latency_jitter_ms);
    p.capacity = static_cast<int>(cfg.get_int("sim.capacity", p.capacity));
    p.latency_penalty_ms = cfg.get_double("sim.latency_penalty_ms", p.latency_penalty_ms);
    p.fail_rate = cfg.get_double("sim.fail_rate", p.fail_rate);
    p.advance_fail_rate = cfg.get_double("sim.advance_fail_rate", p.advance_fail_rate);
    p.noise_ad_rate = cfg.get_double("sim.noise_ad_rate", p.noise_ad_rate);
    p.noise_playlist_rate = cfg.get_double("sim.noise_playlist_rate", p.noise_playlist_rate);
    p.noise_live_rate = cfg.get_double("sim.noise_live_rate", p.noise_live_rate);
    p.comments_per_video =
        static_cast<int>(cfg.get_int("sim.comments_per_video", p.comments_per_video));
    p.comments_disabled_rate =
        cfg.get_double("sim.comments_disabled_rate", p.comments_disabled_rate);
    for (std::size_t c = 0; c < lexicon::kEmotionClassCount; ++c) {
        std::string name(lexicon::kEmotionClassNames[c]);
        p.emotion_base[c] = cfg.get_double("sim.emotion_base." + name, p.emotion_base[c]);
        p.emotion_drift[c] =
            cfg.get_double("sim.emotion_drift." + name, p.emotion_drift[c]);
    }
    return p;
}

/// Scorer endpoint resolution: explicit flag > SCORER_URL env > config file.
inline std::string resolve_scorer_url(const std::string& flag_value,
                                      const KeyValueConfig& cfg) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("SCORER_URL"); env && *env) return env;
    return cfg.get_string("scorer.url", "");
}

}  // namespace recgraph
