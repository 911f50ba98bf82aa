#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <random>

#include "recgraph/scoring.hpp"
#include "recgraph/sim_platform.hpp"

using namespace recgraph;
namespace fs = std::filesystem;

static const Lexicon& lex() {
    static Lexicon lx = Lexicon::builtin();
    return lx;
}

TEST_CASE("tokenize") {
    CHECK(tokenize("Hello, World!") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("don't stop_now") == std::vector<std::string>{"don't", "stop_now"});
    CHECK(tokenize("A  B\tC\n") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("emotion stub hand-computable cases") {
    SECTION("empty text is pure neutral") {
        auto s = score_emotion_stub(lex(), "");
        CHECK(s.neutral() == 1.0);
        CHECK(s.joy() == 0.0);
        CHECK(s.anger() == 0.0);
    }
    SECTION("one joy word splits evenly with the prior") {
        auto s = score_emotion_stub(lex(), "joyful");
        CHECK(s.joy() == Catch::Approx(0.5));
        CHECK(s.neutral() == Catch::Approx(0.5));
    }
    SECTION("lexicon-free gibberish is pure neutral") {
        auto s = score_emotion_stub(lex(), "qwfp zxcv brrr");
        CHECK(s.neutral() == 1.0);
    }
    SECTION("case and punctuation are ignored") {
        auto a = score_emotion_stub(lex(), "JOYFUL!!!");
        auto b = score_emotion_stub(lex(), "joyful");
        CHECK(a.v == b.v);
    }
    SECTION("two joy words and one anger word") {
        auto s = score_emotion_stub(lex(), "joyful happy furious");
        // weights: joy 2, anger 1, prior 1 -> total 4
        CHECK(s.joy() == Catch::Approx(0.5));
        CHECK(s.anger() == Catch::Approx(0.25));
        CHECK(s.neutral() == Catch::Approx(0.25));
    }
}

TEST_CASE("emotion scores always sum to one") {
    std::mt19937_64 rng(99);
    std::vector<std::string> vocab;
    for (std::size_t c = 0; c < lexicon::kEmotionClassCount; ++c)
        for (auto w : *lexicon::kWordsByClass[c]) vocab.emplace_back(w);
    for (auto w : lexicon::kToxicFlags) vocab.emplace_back(w);
    vocab.emplace_back("unlexiconed");
    for (int i = 0; i < 2000; ++i) {
        std::string text;
        auto words = rng() % 12;
        for (std::uint64_t w = 0; w < words; ++w)
            text += vocab[rng() % vocab.size()] + " ";
        auto s = score_emotion_stub(lex(), text);
        CHECK(std::abs(s.sum() - 1.0) < 1e-6);
        for (double v : s.v) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("toxicity stub formula") {
    CHECK(score_toxicity_stub(lex(), "").toxicity == 0.0);
    CHECK(score_toxicity_stub(lex(), "idiot moron trash").toxicity == 1.0);  // clamped
    // 1 flagged of 10 tokens at gain 5 -> 0.5.
    CHECK(score_toxicity_stub(lex(), "idiot a b c d e f g h i").toxicity ==
          Catch::Approx(0.5));
    CHECK(score_toxicity_stub(lex(), "perfectly nice words").toxicity == 0.0);
}

TEST_CASE("toxicity stub monotonicity under appended flags") {
    std::string text = "one two three four five six seven eight nine ten";
    double prev = score_toxicity_stub(lex(), text).toxicity;
    for (int i = 0; i < 6; ++i) {
        text += " idiot";
        double cur = score_toxicity_stub(lex(), text).toxicity;
        CHECK(cur >= prev);
        prev = cur;
    }
    CHECK(prev == 1.0);  // saturated
}

TEST_CASE("stubs are pure") {
    for (int i = 0; i < 5; ++i) {
        CHECK(score_emotion_stub(lex(), "shocking update").v ==
              score_emotion_stub(lex(), "shocking update").v);
        CHECK(score_toxicity_stub(lex(), "trash video").toxicity ==
              score_toxicity_stub(lex(), "trash video").toxicity);
    }
}

TEST_CASE("comments channel is permutation invariant") {
    VideoMeta m{.id = *VideoId::parse("vidid_00001")};
    m.comments = {"joyful day", "furious rant idiot", "plain words here"};
    auto base = score_video_stub(lex(), m, CrawlFormat::LongForm);
    std::sort(m.comments.begin(), m.comments.end());
    do {
        auto per = score_video_stub(lex(), m, CrawlFormat::LongForm);
        REQUIRE(per.size() == base.size());
        for (std::size_t i = 0; i < per.size(); ++i) {
            if (per[i].channel != TextChannel::Comments) continue;
            for (std::size_t c = 0; c < lexicon::kEmotionClassCount; ++c)
                CHECK(per[i].emotion.v[c] ==
                      Catch::Approx(base.back().emotion.v[c]).margin(1e-12));
            CHECK(per[i].toxicity.toxicity ==
                  Catch::Approx(base.back().toxicity.toxicity).margin(1e-12));
        }
    } while (std::next_permutation(m.comments.begin(), m.comments.end()));
}

TEST_CASE("shorts score a single combined channel") {
    VideoMeta m{.id = *VideoId::parse("vidid_00002")};
    m.title = "joyful";
    m.description = "furious";
    m.transcript = "should be ignored for shorts";
    m.comments = {"also ignored"};
    auto per = score_video_stub(lex(), m, CrawlFormat::Shorts);
    REQUIRE(per.size() == 1);
    CHECK(per[0].channel == TextChannel::Title);
    // Combined text carries both words: joy 1, anger 1, prior 1.
    CHECK(per[0].emotion.joy() == Catch::Approx(1.0 / 3));
    CHECK(per[0].emotion.anger() == Catch::Approx(1.0 / 3));
}

TEST_CASE("long-form scores every channel present") {
    VideoMeta m{.id = *VideoId::parse("vidid_00003")};
    m.title = "t";
    m.description = "d";
    m.transcript = "tr";
    m.comments = {"c1", "c2"};
    auto per = score_video_stub(lex(), m, CrawlFormat::LongForm);
    REQUIRE(per.size() == 4);
    CHECK(per[0].channel == TextChannel::Title);
    CHECK(per[1].channel == TextChannel::Description);
    CHECK(per[2].channel == TextChannel::Transcript);
    CHECK(per[3].channel == TextChannel::Comments);

    m.transcript.reset();
    m.comments.clear();
    per = score_video_stub(lex(), m, CrawlFormat::LongForm);
    REQUIRE(per.size() == 2);
}

TEST_CASE("mean emotion of nothing is neutral") {
    auto m = mean_emotion({});
    CHECK(m.neutral() == 1.0);
    CHECK(m.sum() == Catch::Approx(1.0));
}

TEST_CASE("lexicon files round trip the builtin behavior") {
    fs::path root(RECGRAPH_SOURCE_DIR);
    auto loaded = Lexicon::load((root / "data" / "emotion_lexicon.tsv").string(),
                                (root / "data" / "toxicity_flags.txt").string());
    for (const char* text : {"joyful furious idiot", "shocking gross dread",
                             "video update weekly", "tragic twist", ""}) {
        CHECK(score_emotion_stub(loaded, text).v == score_emotion_stub(lex(), text).v);
        CHECK(score_toxicity_stub(loaded, text).toxicity ==
              score_toxicity_stub(lex(), text).toxicity);
    }
}

TEST_CASE("lexicon load rejects malformed files") {
    fs::path dir = fs::temp_directory_path() / "recgraph_lexicon_test";
    fs::create_directories(dir);
    auto flags = dir / "flags.txt";
    {
        std::ofstream out(flags);
        out << "idiot\n";
    }
    auto write_lexicon = [&](const std::string& body) {
        auto p = dir / "lex.tsv";
        std::ofstream out(p);
        out << body;
        return p.string();
    };
    CHECK_THROWS_AS(Lexicon::load(write_lexicon("word only one field\n"), flags.string()),
                    IoError);
    CHECK_THROWS_AS(Lexicon::load(write_lexicon("word\tnotaclass\t1.0\n"), flags.string()),
                    IoError);
    CHECK_NOTHROW(Lexicon::load(write_lexicon("# comment\nword\tjoy\t1.0\n"), flags.string()));
    CHECK_THROWS_AS(Lexicon::load((dir / "missing.tsv").string(), flags.string()), IoError);
}
