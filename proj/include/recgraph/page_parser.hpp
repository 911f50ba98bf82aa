#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "recgraph/core.hpp"
#include "recgraph/errors.hpp"
#include "recgraph/sim_platform.hpp"

namespace recgraph {

/// One anchor element as found in a watch-page document.
struct AnchorNode {
    std::string id;       // value of the id attribute, empty if absent
    std::string classes;  // value of the class attribute
    std::string href;
    bool parent_is_live = false;  // parent element carries is-live-video
    std::size_t byte_offset = 0;  // position of '<' in the document
};

namespace parser_detail {

struct Attr {
    std::string name;
    std::string value;
};

struct Tag {
    std::string name;
    std::vector<Attr> attrs;
    bool closing = false;
    bool self_closing = false;
    std::size_t end = 0;  // offset one past '>'
};

inline bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '-' || c == '_' || c == ':';
}

inline Tag parse_tag(std::string_view text, std::size_t lt) {
    Tag tag;
    std::size_t i = lt + 1;
    if (i < text.size() && text[i] == '/') {
        tag.closing = true;
        ++i;
    }
    std::size_t name_start = i;
    while (i < text.size() && is_name_char(text[i])) ++i;
    if (i == name_start) throw ParseError("malformed tag", lt);
    tag.name = std::string(text.substr(name_start, i - name_start));

    while (true) {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' ||
                                   text[i] == '\r'))
            ++i;
        if (i >= text.size()) throw ParseError("unterminated tag", lt);
        if (text[i] == '>') {
            tag.end = i + 1;
            return tag;
        }
        if (text[i] == '/' && i + 1 < text.size() && text[i + 1] == '>') {
            tag.self_closing = true;
            tag.end = i + 2;
            return tag;
        }
        std::size_t attr_start = i;
        while (i < text.size() && is_name_char(text[i])) ++i;
        if (i == attr_start) throw ParseError("malformed attribute", i);
        Attr attr;
        attr.name = std::string(text.substr(attr_start, i - attr_start));
        if (i < text.size() && text[i] == '=') {
            ++i;
            if (i >= text.size() || (text[i] != '"' && text[i] != '\''))
                throw ParseError("attribute value must be quoted", i);
            char quote = text[i];
            std::size_t val_start = ++i;
            while (i < text.size() && text[i] != quote) ++i;
            if (i >= text.size())
                throw ParseError("unterminated attribute value", val_start - 1);
            attr.value = std::string(text.substr(val_start, i - val_start));
            ++i;
        }
        tag.attrs.push_back(std::move(attr));
    }
}

}  // namespace parser_detail

/// Returns all anchors whose id attribute equals "thumbnail", in document
/// order. Ad description blocks carry no thumbnail ID and are never returned.
/// Throws ParseError naming a byte offset on malformed markup.
inline std::vector<AnchorNode> collect_thumbnail_anchors(const sim::Document& doc) {
    std::string_view text = doc.text;
    std::vector<AnchorNode> out;

    struct Open {
        std::string name;
        bool is_live;
    };
    std::vector<Open> stack;

    std::size_t i = 0;
    while (true) {
        std::size_t lt = text.find('<', i);
        if (lt == std::string_view::npos) break;
        if (text.compare(lt, 4, "<!--") == 0) {
            std::size_t end = text.find("-->", lt + 4);
            if (end == std::string_view::npos)
                throw ParseError("unterminated comment", lt);
            i = end + 3;
            continue;
        }
        auto tag = parser_detail::parse_tag(text, lt);
        if (tag.closing) {
            if (!stack.empty()) stack.pop_back();
            i = tag.end;
            continue;
        }
        if (tag.name == "a") {
            AnchorNode node;
            node.byte_offset = lt;
            node.parent_is_live = !stack.empty() && stack.back().is_live;
            for (const auto& a : tag.attrs) {
                if (a.name == "id") node.id = a.value;
                else if (a.name == "class") node.classes = a.value;
                else if (a.name == "href") node.href = a.value;
            }
            if (node.id == "thumbnail") out.push_back(std::move(node));
        }
        if (!tag.self_closing) {
            bool live = false;
            for (const auto& a : tag.attrs)
                if (a.name == "is-live-video") live = true;
            stack.push_back({tag.name, live});
        }
        i = tag.end;
    }
    return out;
}

inline constexpr std::string_view kPlatformOrigin = "https://www.youtube.com";

/// Keeps anchors matching the /watch?v= template whose parent is not a live
/// stream, extracts their IDs, and truncates to the first `breadth`. Short
/// pages return a short list; the caller's retry loop owns the length
/// contract.
inline std::vector<VideoId> filter_recommendations(const std::vector<AnchorNode>& anchors,
                                                   int breadth) {
    std::vector<VideoId> out;
    out.reserve(static_cast<std::size_t>(breadth));
    for (const auto& a : anchors) {
        if (a.parent_is_live) continue;
        std::string resolved = a.href;
        if (!resolved.empty() && resolved.front() == '/')
            resolved = std::string(kPlatformOrigin) + resolved;
        if (resolved.find("/watch?v=") == std::string::npos) continue;  // playlists
        auto id = extract_video_id(resolved);
        if (!id) continue;
        out.push_back(*id);
        if (static_cast<int>(out.size()) == breadth) break;
    }
    return out;
}

}  // namespace recgraph
