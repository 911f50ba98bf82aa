#pragma once

#include <array>
#include <cstddef>
#include <string_view>

// Shared word banks: the scoring stub builds its default lexicon from these
// tables and the sim platform samples its phrase bank from the same words, so
// drifts configured in the sim are visible to the stub scorer.

namespace recgraph::lexicon {

inline constexpr std::size_t kEmotionClassCount = 7;

inline constexpr std::array<std::string_view, kEmotionClassCount> kEmotionClassNames = {
    "anger", "disgust", "fear", "joy", "neutral", "sadness", "surprise"};

enum EmotionIndex : std::size_t {
    kAnger = 0,
    kDisgust,
    kFear,
    kJoy,
    kNeutral,
    kSadness,
    kSurprise,
};

inline constexpr std::array<std::string_view, 8> kAngerWords = {
    "furious", "outrage", "rage", "angry", "fuming",
    "livid", "hostile", "resent"};

inline constexpr std::array<std::string_view, 8> kDisgustWords = {
    "gross", "revolting", "nasty", "foul", "repulsive",
    "sickening", "vile", "yuck"};

inline constexpr std::array<std::string_view, 8> kFearWords = {
    "terrified", "dread", "panic", "scary", "afraid",
    "frightening", "alarming", "menacing"};

inline constexpr std::array<std::string_view, 8> kJoyWords = {
    "delight", "joyful", "cheerful", "happy", "wonderful",
    "uplifting", "celebrate", "bliss"};

inline constexpr std::array<std::string_view, 8> kNeutralWords = {
    "video", "update", "report", "overview", "channel",
    "episode", "weekly", "summary"};

inline constexpr std::array<std::string_view, 8> kSadnessWords = {
    "tragic", "mourning", "sorrow", "grief", "heartbreaking",
    "tearful", "gloomy", "despair"};

inline constexpr std::array<std::string_view, 8> kSurpriseWords = {
    "shocking", "unexpected", "astonishing", "unbelievable", "stunning",
    "twist", "sudden", "remarkable"};

inline constexpr std::array<const std::array<std::string_view, 8>*, kEmotionClassCount>
    kWordsByClass = {&kAngerWords, &kDisgustWords, &kFearWords,  &kJoyWords,
                     &kNeutralWords, &kSadnessWords, &kSurpriseWords};

// Tokens the toxicity stub flags. Deliberately mild.
inline constexpr std::array<std::string_view, 10> kToxicFlags = {
    "idiot", "stupid", "trash", "pathetic", "loser",
    "garbage", "moron", "awful", "worthless", "clown"};

// Filler used in sim ad copy; all weight-free for the stub, so ads score
// near-pure neutral (the prior dominates).
inline constexpr std::array<std::string_view, 6> kAdWords = {
    "sponsored", "offer", "discount", "subscribe", "premium", "deal"};

}  // namespace recgraph::lexicon
