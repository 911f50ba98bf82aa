#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include "recgraph/config.hpp"
#include "recgraph/report.hpp"
#include "recgraph/sim_platform.hpp"

using namespace recgraph;
namespace fs = std::filesystem;

static fs::path temp_dir(const char* leaf) {
    auto dir = fs::temp_directory_path() / "recgraph_report_test" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

static void write_text(const fs::path& p, std::string_view text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

namespace {

struct SmallCrawl {
    std::vector<RecommendationRecord> records;
    MetadataMap metadata;
    std::vector<ChannelScores> scores;
};

SmallCrawl shorts_crawl(std::size_t roots, int depth, double dwell) {
    sim::SimParams p;
    p.fail_rate = 0;
    sim::Platform platform(p);
    SmallCrawl out;
    for (const auto& root : platform.mint_roots(roots)) {
        sim::ShortSessionState st;
        VideoId parent = root;
        for (int d = 1; d <= depth; ++d) {
            VideoId next = platform.next_short(st, parent, dwell);
            out.records.push_back({root, parent, next, d, 1, 0, dwell,
                                   platform.kind_of(next) == VideoKind::Ad, 0});
            parent = next;
        }
    }
    auto lex = Lexicon::builtin();
    for (const auto& rec : out.records) {
        if (out.metadata.contains(rec.video_id)) continue;
        auto meta = platform.meta(rec.video_id);
        out.metadata.emplace(rec.video_id, meta);
        for (auto& s : score_video_stub(lex, meta, CrawlFormat::Shorts))
            out.scores.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST_CASE("build_report assembles every section for a shorts crawl") {
    auto crawl = shorts_crawl(4, 20, /*dwell=*/60.0);
    auto rep = build_report(crawl.records, crawl.metadata, crawl.scores,
                            CrawlFormat::Shorts);

    // Engagement: 3 metrics for each non-empty depth bucket.
    CHECK_FALSE(rep.engagement.empty());
    CHECK(rep.engagement.size() % 3 == 0);

    // Shorts scoring yields a single combined channel.
    REQUIRE(rep.emotion.size() == 1);
    CHECK(rep.emotion[0].channel == TextChannel::Title);
    REQUIRE(rep.toxicity.size() == 1);
    CHECK(rep.toxicity[0].mean.size() == 20);

    CHECK_FALSE(rep.trends.empty());
    std::set<std::string> metrics;
    for (const auto& t : rep.trends) metrics.insert(t.metric);
    CHECK(metrics.contains("views"));
    CHECK(metrics.contains("joy"));
    CHECK(metrics.contains("toxicity_mean"));
    CHECK(metrics.contains("toxicity_tail_mean"));

    // With 60s dwell, every chain injects an ad each ad_period high-dwell steps.
    REQUIRE(rep.ad_periodicity.size() == 4);
    for (const auto& row : rep.ad_periodicity) {
        REQUIRE(row.period.has_value());
        CHECK(*row.period == sim::SimParams{}.ad_period);
    }
}

TEST_CASE("ad periodicity section is reserved for shorts runs") {
    auto crawl = shorts_crawl(2, 12, 60.0);
    auto rep = build_report(crawl.records, crawl.metadata, crawl.scores,
                            CrawlFormat::LongForm);
    CHECK(rep.ad_periodicity.empty());
}

TEST_CASE("write_report emits the full file set") {
    auto crawl = shorts_crawl(3, 15, 60.0);
    auto rep = build_report(crawl.records, crawl.metadata, crawl.scores,
                            CrawlFormat::Shorts);
    auto dir = temp_dir("full");
    write_report(rep, dir);

    for (const char* name : {"engagement.csv", "emotion.csv", "toxicity.csv",
                             "trends.csv", "ad_periodicity.csv", "plot_data.json"})
        CHECK(fs::exists(dir / name));

    auto engagement = io::csv::parse(io::read_file(dir / "engagement.csv"));
    REQUIRE(engagement.size() == rep.engagement.size() + 1);
    CHECK(engagement[0][0] == "metric");
    CHECK(engagement[0].size() == 10);

    auto trends = io::csv::parse(io::read_file(dir / "trends.csv"));
    REQUIRE(trends.size() == rep.trends.size() + 1);
    for (std::size_t i = 1; i < trends.size(); ++i) {
        CHECK((trends[i][4] == "increasing" || trends[i][4] == "decreasing" ||
               trends[i][4] == "flat"));
    }

    auto periodicity = io::csv::parse(io::read_file(dir / "ad_periodicity.csv"));
    REQUIRE(periodicity.size() == 4);  // header + 3 roots
    CHECK(periodicity[1][1] == std::to_string(sim::SimParams{}.ad_period));

    auto doc = nlohmann::json::parse(io::read_file(dir / "plot_data.json"));
    CHECK(doc["engagement"].is_array());
    CHECK(doc["emotion"].is_array());
    CHECK(doc["toxicity"].is_array());
    REQUIRE_FALSE(doc["engagement"].empty());
    // Depth 15 at 60 s dwell injects ads at depths 5, 10 and 15; engagement
    // skips ad records, so those depth buckets are absent.
    CHECK(doc["engagement"][0]["points"].size() == 12);
}

TEST_CASE("write_report omits ad_periodicity.csv for long-form reports") {
    auto crawl = shorts_crawl(2, 10, 60.0);
    auto rep = build_report(crawl.records, crawl.metadata, crawl.scores,
                            CrawlFormat::LongForm);
    auto dir = temp_dir("longform");
    write_report(rep, dir);
    CHECK_FALSE(fs::exists(dir / "ad_periodicity.csv"));
    CHECK(fs::exists(dir / "trends.csv"));
}

TEST_CASE("key=value config parsing") {
    auto dir = temp_dir("config");
    SECTION("values, comments and whitespace") {
        write_text(dir / "a.conf",
                   "# leading comment\n"
                   "sim.seed = 99   # trailing comment\n"
                   "sim.ad_period=7\n"
                   "\n"
                   "scorer.url = http://example.test:9\n");
        auto cfg = KeyValueConfig::load(dir / "a.conf");
        CHECK(cfg.get_int("sim.seed", 0) == 99);
        CHECK(cfg.get_int("sim.ad_period", 0) == 7);
        CHECK(cfg.get_string("scorer.url", "") == "http://example.test:9");
        CHECK(cfg.get_double("sim.fail_rate", 0.25) == 0.25);  // fallback

        auto p = sim_params_from(cfg);
        CHECK(p.seed == 99);
        CHECK(p.ad_period == 7);
        CHECK(p.fail_rate == sim::SimParams{}.fail_rate);
    }
    SECTION("unknown keys are rejected") {
        write_text(dir / "b.conf", "sim.add_period=7\n");
        CHECK_THROWS_AS(sim_params_from(KeyValueConfig::load(dir / "b.conf")),
                        ConfigError);
    }
    SECTION("lines without '=' are rejected") {
        write_text(dir / "c.conf", "just some words\n");
        CHECK_THROWS_AS(KeyValueConfig::load(dir / "c.conf"), ConfigError);
    }
    SECTION("non-numeric numeric values are rejected") {
        write_text(dir / "d.conf", "sim.seed=abc\n");
        auto cfg = KeyValueConfig::load(dir / "d.conf");
        CHECK_THROWS_AS(sim_params_from(cfg), IoError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(KeyValueConfig::load(dir / "missing.conf"), ConfigError);
    }
    SECTION("emotion base keys reach the sim parameters") {
        write_text(dir / "e.conf",
                   "sim.emotion_base.joy=0.4\nsim.emotion_drift.anger=-0.02\n");
        auto p = sim_params_from(KeyValueConfig::load(dir / "e.conf"));
        CHECK(p.emotion_base[lexicon::kJoy] == 0.4);
        CHECK(p.emotion_drift[lexicon::kAnger] == -0.02);
    }
}

TEST_CASE("scorer url resolution precedence: flag > env > file") {
    auto dir = temp_dir("scorer");
    write_text(dir / "s.conf", "scorer.url=http://from-file:1\n");
    auto cfg = KeyValueConfig::load(dir / "s.conf");

    ::unsetenv("SCORER_URL");
    CHECK(resolve_scorer_url("", cfg) == "http://from-file:1");

    ::setenv("SCORER_URL", "http://from-env:2", 1);
    CHECK(resolve_scorer_url("", cfg) == "http://from-env:2");
    CHECK(resolve_scorer_url("http://from-flag:3", cfg) == "http://from-flag:3");

    ::setenv("SCORER_URL", "", 1);  // empty env falls through to the file
    CHECK(resolve_scorer_url("", cfg) == "http://from-file:1");
    ::unsetenv("SCORER_URL");
    CHECK(resolve_scorer_url("", KeyValueConfig{}) == "");
}
