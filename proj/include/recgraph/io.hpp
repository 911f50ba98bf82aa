#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "recgraph/analysis.hpp"
#include "recgraph/core.hpp"
#include "recgraph/errors.hpp"
#include "recgraph/scoring.hpp"

namespace recgraph::io {

inline constexpr std::string_view kRecordsHeader =
    "crawl_type,root_id,parent_id,video_id,depth,position,worker_id,dwell_s,is_ad,"
    "fetched_at_ms";

namespace csv {

inline std::string escape(std::string_view field) {
    bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs_quotes) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

/// RFC-4180 reader: quoted fields may contain commas, quotes and newlines.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t i = 0;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
    };
    while (i < text.size()) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                in_quotes = false;
                ++i;
                continue;
            }
            field += c;
            ++i;
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                ++i;
                break;
            case ',':
                end_field();
                field_started = true;  // next field exists even if empty
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                end_row();
                ++i;
                break;
            default:
                field += c;
                field_started = true;
                ++i;
        }
    }
    if (in_quotes) throw IoError("csv: unterminated quoted field");
    if (field_started || !field.empty() || !row.empty()) end_row();
    return rows;
}

}  // namespace csv

inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw IoError("cannot format double");
    return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, const std::string& context) {
    double v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError(context + ": bad number '" + std::string(s) + "'");
    return v;
}

inline std::int64_t parse_int(std::string_view s, const std::string& context) {
    std::int64_t v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError(context + ": bad integer '" + std::string(s) + "'");
    return v;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::size_t write_records_csv(const std::vector<RecommendationRecord>& records,
                                     const std::filesystem::path& path,
                                     CrawlFormat format) {
    auto out = open_out(path);
    out << kRecordsHeader << '\n';
    const char* crawl_type = format == CrawlFormat::Shorts ? "shorts" : "long";
    for (const auto& r : records) {
        out << crawl_type << ',' << r.root_id.str() << ',' << r.parent_id.str() << ','
            << r.video_id.str() << ',' << r.depth << ',' << r.position << ','
            << r.worker_id << ',' << format_double(r.dwell_s) << ','
            << (r.is_ad ? "true" : "false") << ',' << r.fetched_at_ms << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
    return records.size();
}

struct RecordsFile {
    CrawlFormat format = CrawlFormat::Shorts;
    std::vector<RecommendationRecord> records;
};

inline RecordsFile read_records_csv(const std::filesystem::path& path) {
    auto rows = csv::parse(read_file(path));
    if (rows.empty()) throw IoError(path.string() + ": empty records file");
    // validate header
    std::string header;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
        if (i) header += ',';
        header += rows[0][i];
    }
    if (header != kRecordsHeader)
        throw IoError(path.string() + ": unexpected header '" + header + "'");

    RecordsFile out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string ctx = path.string() + ":" + std::to_string(i + 1);
        if (row.size() != 10) throw IoError(ctx + ": expected 10 fields");
        out.format = row[0] == "shorts" ? CrawlFormat::Shorts : CrawlFormat::LongForm;
        auto root = VideoId::parse(row[1]);
        auto parent = VideoId::parse(row[2]);
        auto video = VideoId::parse(row[3]);
        if (!root || !parent || !video) throw IoError(ctx + ": invalid video id");
        RecommendationRecord rec{*root,
                                 *parent,
                                 *video,
                                 static_cast<int>(parse_int(row[4], ctx)),
                                 static_cast<int>(parse_int(row[5], ctx)),
                                 static_cast<int>(parse_int(row[6], ctx)),
                                 parse_double(row[7], ctx),
                                 row[8] == "true",
                                 parse_int(row[9], ctx)};
        out.records.push_back(rec);
    }
    return out;
}

/// Accepts a one-column CSV (with or without a video_id header) or plain
/// text one-ID-per-line; full watch/shorts URLs are accepted too. Any
/// invalid row fails the whole read, listing all offending lines.
inline std::vector<VideoId> read_roots(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open roots file: " + path.string());
    std::vector<VideoId> out;
    std::vector<std::string> bad;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        auto stop = line.find_last_not_of(" \t\r");
        std::string token = line.substr(start, stop - start + 1);
        if (lineno == 1 && (token == "video_id" || token == "id")) continue;
        std::optional<VideoId> id = VideoId::parse(token);
        if (!id) id = extract_video_id(token);
        if (!id) {
            bad.push_back("line " + std::to_string(lineno) + ": '" + token + "'");
            continue;
        }
        out.push_back(*id);
    }
    if (!bad.empty()) {
        std::string msg = path.string() + ": invalid root rows:";
        for (const auto& b : bad) msg += "\n  " + b;
        throw IoError(msg);
    }
    return out;
}

inline constexpr std::string_view kMetadataHeader =
    "video_id,kind,title,description,has_transcript,transcript,comments,views,likes,"
    "comment_count,comments_disabled,duration_s";

inline void write_metadata_csv(const std::vector<std::pair<VideoId, VideoMeta>>& metadata,
                               const std::filesystem::path& path) {
    auto out = open_out(path);
    out << kMetadataHeader << '\n';
    for (const auto& [id, m] : metadata) {
        std::string comments;
        for (std::size_t i = 0; i < m.comments.size(); ++i) {
            if (i) comments += '\n';
            comments += m.comments[i];
        }
        out << id.str() << ',' << to_string(m.kind) << ',' << csv::escape(m.title) << ','
            << csv::escape(m.description) << ',' << (m.transcript ? "true" : "false")
            << ',' << csv::escape(m.transcript.value_or("")) << ','
            << csv::escape(comments) << ',' << m.views << ',' << m.likes << ','
            << m.comment_count << ',' << (m.comments_disabled ? "true" : "false") << ','
            << format_double(m.duration_s) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<std::pair<VideoId, VideoMeta>> read_metadata_csv(
    const std::filesystem::path& path) {
    auto rows = csv::parse(read_file(path));
    std::vector<std::pair<VideoId, VideoMeta>> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string ctx = path.string() + ":" + std::to_string(i + 1);
        if (row.size() != 12) throw IoError(ctx + ": expected 12 fields");
        auto id = VideoId::parse(row[0]);
        if (!id) throw IoError(ctx + ": invalid video id");
        auto kind = video_kind_from(row[1]);
        if (!kind) throw IoError(ctx + ": unknown kind '" + row[1] + "'");
        VideoMeta m{.id = *id, .kind = *kind};
        m.title = row[2];
        m.description = row[3];
        if (row[4] == "true") m.transcript = row[5];
        if (!row[6].empty()) {
            std::istringstream ss(row[6]);
            std::string c;
            while (std::getline(ss, c)) m.comments.push_back(c);
        }
        m.views = static_cast<std::uint64_t>(parse_int(row[7], ctx));
        m.likes = static_cast<std::uint64_t>(parse_int(row[8], ctx));
        m.comment_count = static_cast<std::uint64_t>(parse_int(row[9], ctx));
        m.comments_disabled = row[10] == "true";
        m.duration_s = parse_double(row[11], ctx);
        out.emplace_back(*id, std::move(m));
    }
    return out;
}

inline constexpr std::string_view kScoresHeader =
    "video_id,channel,anger,disgust,fear,joy,neutral,sadness,surprise,toxicity";

inline void write_scores_csv(const std::vector<ChannelScores>& scores,
                             const std::filesystem::path& path) {
    auto out = open_out(path);
    out << kScoresHeader << '\n';
    for (const auto& s : scores) {
        out << s.video_id.str() << ',' << to_string(s.channel);
        for (double v : s.emotion.v) out << ',' << format_double(v);
        out << ',' << format_double(s.toxicity.toxicity) << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<ChannelScores> read_scores_csv(const std::filesystem::path& path) {
    auto rows = csv::parse(read_file(path));
    std::vector<ChannelScores> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const std::string ctx = path.string() + ":" + std::to_string(i + 1);
        if (row.size() != 10) throw IoError(ctx + ": expected 10 fields");
        auto id = VideoId::parse(row[0]);
        if (!id) throw IoError(ctx + ": invalid video id");
        auto channel = text_channel_from(row[1]);
        if (!channel) throw IoError(ctx + ": unknown channel '" + row[1] + "'");
        ChannelScores s{*id, *channel, {}, {}};
        for (std::size_t c = 0; c < lexicon::kEmotionClassCount; ++c)
            s.emotion.v[c] = parse_double(row[2 + c], ctx);
        s.toxicity.toxicity = parse_double(row[9], ctx);
        out.push_back(std::move(s));
    }
    return out;
}

inline void write_timing_json(const TimingReport& t, const std::filesystem::path& path) {
    nlohmann::json doc{{"wall_s", t.wall_s},
                       {"theoretical_s", t.theoretical_s},
                       {"overhead_ratio", t.overhead_ratio},
                       {"workers", t.workers},
                       {"speedup_vs_single", t.speedup_vs_single}};
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

}  // namespace recgraph::io
