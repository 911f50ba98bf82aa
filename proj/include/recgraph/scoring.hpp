#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "recgraph/core.hpp"
#include "recgraph/errors.hpp"
#include "recgraph/lexicon_data.hpp"

namespace recgraph {

/// Distribution over the 7 emotion classes; components sum to 1.
struct EmotionScores {
    std::array<double, lexicon::kEmotionClassCount> v{};

    double anger() const { return v[lexicon::kAnger]; }
    double disgust() const { return v[lexicon::kDisgust]; }
    double fear() const { return v[lexicon::kFear]; }
    double joy() const { return v[lexicon::kJoy]; }
    double neutral() const { return v[lexicon::kNeutral]; }
    double sadness() const { return v[lexicon::kSadness]; }
    double surprise() const { return v[lexicon::kSurprise]; }

    double sum() const {
        double s = 0;
        for (double x : v) s += x;
        return s;
    }
};

struct ToxicityScores {
    double toxicity = 0.0;  // in [0,1]
};

enum class TextChannel { Title, Description, Transcript, Comments };

inline const char* to_string(TextChannel c) {
    switch (c) {
        case TextChannel::Title: return "title";
        case TextChannel::Description: return "description";
        case TextChannel::Transcript: return "transcript";
        case TextChannel::Comments: return "comments";
    }
    return "?";
}

inline std::optional<TextChannel> text_channel_from(std::string_view s) {
    if (s == "title") return TextChannel::Title;
    if (s == "description") return TextChannel::Description;
    if (s == "transcript") return TextChannel::Transcript;
    if (s == "comments") return TextChannel::Comments;
    return std::nullopt;
}

struct ChannelScores {
    VideoId video_id;
    TextChannel channel;
    EmotionScores emotion;
    ToxicityScores toxicity;
};

inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c == '_' || c == '\'') {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

/// Token -> per-class emotion weights, plus a toxicity flag list.
class Lexicon {
  public:
    using Weights = std::array<double, lexicon::kEmotionClassCount>;

    static Lexicon builtin() {
        Lexicon lx;
        for (std::size_t cls = 0; cls < lexicon::kEmotionClassCount; ++cls) {
            for (auto word : *lexicon::kWordsByClass[cls]) {
                Weights w{};
                w[cls] = 1.0;
                lx.emotion_[std::string(word)] = w;
            }
        }
        for (auto word : lexicon::kToxicFlags) lx.flags_.insert(std::string(word));
        return lx;
    }

    /// emotion_path: one "token<TAB>class<TAB>weight" line per entry.
    /// flags_path: one flagged token per line.
    static Lexicon load(const std::string& emotion_path, const std::string& flags_path) {
        Lexicon lx;
        std::ifstream ef(emotion_path);
        if (!ef) throw IoError("cannot open lexicon file: " + emotion_path);
        std::string line;
        int lineno = 0;
        while (std::getline(ef, line)) {
            ++lineno;
            if (line.empty() || line[0] == '#') continue;
            std::istringstream ss(line);
            std::string token, cls;
            double weight;
            if (!std::getline(ss, token, '\t') || !std::getline(ss, cls, '\t') ||
                !(ss >> weight))
                throw IoError(emotion_path + ":" + std::to_string(lineno) +
                              ": expected token<TAB>class<TAB>weight");
            auto it = std::find(lexicon::kEmotionClassNames.begin(),
                                lexicon::kEmotionClassNames.end(), cls);
            if (it == lexicon::kEmotionClassNames.end())
                throw IoError(emotion_path + ":" + std::to_string(lineno) +
                              ": unknown emotion class '" + cls + "'");
            auto idx = static_cast<std::size_t>(it - lexicon::kEmotionClassNames.begin());
            lx.emotion_[token][idx] += weight;
        }
        std::ifstream ff(flags_path);
        if (!ff) throw IoError("cannot open flag list: " + flags_path);
        while (std::getline(ff, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (!line.empty() && line[0] != '#') lx.flags_.insert(line);
        }
        return lx;
    }

    const Weights* emotion_weights(const std::string& token) const {
        auto it = emotion_.find(token);
        return it == emotion_.end() ? nullptr : &it->second;
    }

    bool flagged(const std::string& token) const { return flags_.contains(token); }

  private:
    std::unordered_map<std::string, Weights> emotion_;
    std::unordered_set<std::string> flags_;
};

/// Sums lexicon weights per class over the tokens, adds a neutral prior of
/// 1.0 and normalizes to a distribution. Empty or lexicon-free text scores
/// pure neutral.
inline EmotionScores score_emotion_stub(const Lexicon& lx, std::string_view text) {
    EmotionScores s;
    s.v[lexicon::kNeutral] = 1.0;  // prior
    for (const auto& tok : tokenize(text)) {
        if (const auto* w = lx.emotion_weights(tok))
            for (std::size_t i = 0; i < s.v.size(); ++i) s.v[i] += (*w)[i];
    }
    double total = s.sum();
    for (double& x : s.v) x /= total;
    return s;
}

inline constexpr double kToxicityGain = 5.0;

/// toxicity = clamp(flagged / max(tokens,1) * gain, 0, 1).
inline ToxicityScores score_toxicity_stub(const Lexicon& lx, std::string_view text,
                                          double gain = kToxicityGain) {
    auto tokens = tokenize(text);
    std::size_t flagged = 0;
    for (const auto& tok : tokens)
        if (lx.flagged(tok)) ++flagged;
    double ratio = static_cast<double>(flagged) /
                   static_cast<double>(std::max<std::size_t>(tokens.size(), 1));
    return {std::clamp(ratio * gain, 0.0, 1.0)};
}

inline EmotionScores mean_emotion(const std::vector<EmotionScores>& all) {
    EmotionScores m;
    if (all.empty()) {
        m.v[lexicon::kNeutral] = 1.0;
        return m;
    }
    for (const auto& e : all)
        for (std::size_t i = 0; i < m.v.size(); ++i) m.v[i] += e.v[i];
    for (double& x : m.v) x /= static_cast<double>(all.size());
    return m;
}

/// Scores one video's text channels with the stubs. Shorts score a single
/// combined title+description channel (stored under Title); long-form videos
/// score all channels present. The Comments channel is the per-comment mean.
inline std::vector<ChannelScores> score_video_stub(const Lexicon& lx, const VideoMeta& meta,
                                                   CrawlFormat format) {
    std::vector<ChannelScores> out;
    if (format == CrawlFormat::Shorts) {
        std::string combined = meta.title + " " + meta.description;
        out.push_back({meta.id, TextChannel::Title, score_emotion_stub(lx, combined),
                       score_toxicity_stub(lx, combined)});
        return out;
    }
    out.push_back({meta.id, TextChannel::Title, score_emotion_stub(lx, meta.title),
                   score_toxicity_stub(lx, meta.title)});
    out.push_back({meta.id, TextChannel::Description,
                   score_emotion_stub(lx, meta.description),
                   score_toxicity_stub(lx, meta.description)});
    if (meta.transcript)
        out.push_back({meta.id, TextChannel::Transcript,
                       score_emotion_stub(lx, *meta.transcript),
                       score_toxicity_stub(lx, *meta.transcript)});
    if (!meta.comments.empty()) {
        std::vector<EmotionScores> per_comment;
        double tox_sum = 0;
        for (const auto& c : meta.comments) {
            per_comment.push_back(score_emotion_stub(lx, c));
            tox_sum += score_toxicity_stub(lx, c).toxicity;
        }
        out.push_back({meta.id, TextChannel::Comments, mean_emotion(per_comment),
                       {tox_sum / static_cast<double>(meta.comments.size())}});
    }
    return out;
}

}  // namespace recgraph
