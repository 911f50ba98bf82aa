#pragma once

#include <chrono>
#include <cmath>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "recgraph/scoring.hpp"

namespace recgraph {

/// HTTP client for an external scoring service.
/// Request:  POST {texts: [...]}
/// Response: {emotions: [[7 floats]...], toxicity: [float...]}
struct ServiceScorerOptions {
    std::size_t max_batch = 64;
    int attempts = 3;
    int backoff_base_ms = 100;  // doubles per retry
    std::string path = "/score";
};

class ServiceScorer {
  public:
    using Options = ServiceScorerOptions;

    explicit ServiceScorer(std::string endpoint, Options opts = {})
        : endpoint_(std::move(endpoint)), opts_(opts) {}

    std::vector<std::pair<EmotionScores, ToxicityScores>> score_batch(
        const std::vector<std::string>& texts) {
        if (texts.size() > opts_.max_batch)
            throw ConfigError("scorer batch exceeds max of " +
                              std::to_string(opts_.max_batch));
        nlohmann::json req;
        req["texts"] = texts;
        const std::string body = req.dump();

        httplib::Client client(endpoint_);
        std::string last_error;
        for (int attempt = 0; attempt < opts_.attempts; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(
                    opts_.backoff_base_ms << (attempt - 1)));
            auto res = client.Post(opts_.path, body, "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "status " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw ProtocolError("scoring service returned status " +
                                    std::to_string(res->status));
            return parse_response(res->body, texts.size());
        }
        throw ServiceUnavailable("scoring service unreachable at " + endpoint_ +
                                 ": " + last_error);
    }

    /// Validates shape and ranges; rows whose emotion sum is off by <= 1e-3
    /// are re-normalized, anything worse is rejected.
    static std::vector<std::pair<EmotionScores, ToxicityScores>> parse_response(
        const std::string& body, std::size_t expected) {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw ProtocolError(std::string("scoring response is not JSON: ") + e.what());
        }
        if (!doc.contains("emotions") || !doc.contains("toxicity"))
            throw ProtocolError("scoring response missing emotions/toxicity");
        const auto& emotions = doc["emotions"];
        const auto& toxicity = doc["toxicity"];
        if (!emotions.is_array() || !toxicity.is_array() ||
            emotions.size() != expected || toxicity.size() != expected)
            throw ProtocolError("scoring response row count mismatch");

        std::vector<std::pair<EmotionScores, ToxicityScores>> out;
        out.reserve(expected);
        for (std::size_t i = 0; i < expected; ++i) {
            const auto& row = emotions[i];
            if (!row.is_array() || row.size() != lexicon::kEmotionClassCount)
                throw ProtocolError("emotion row " + std::to_string(i) +
                                    " does not have 7 entries");
            EmotionScores e;
            for (std::size_t c = 0; c < e.v.size(); ++c) {
                if (!row[c].is_number())
                    throw ProtocolError("emotion row " + std::to_string(i) +
                                        " has a non-numeric entry");
                e.v[c] = row[c].get<double>();
                if (e.v[c] < 0.0 || e.v[c] > 1.0)
                    throw ProtocolError("emotion row " + std::to_string(i) +
                                        " out of [0,1]");
            }
            double sum = e.sum();
            if (std::abs(sum - 1.0) > 1e-3)
                throw ProtocolError("emotion row " + std::to_string(i) +
                                    " sums to " + std::to_string(sum));
            for (double& x : e.v) x /= sum;

            if (!toxicity[i].is_number())
                throw ProtocolError("toxicity " + std::to_string(i) + " not numeric");
            double tox = toxicity[i].get<double>();
            if (tox < 0.0 || tox > 1.0)
                throw ProtocolError("toxicity " + std::to_string(i) + " out of [0,1]");
            out.emplace_back(e, ToxicityScores{tox});
        }
        return out;
    }

  private:
    std::string endpoint_;
    Options opts_;
};

}  // namespace recgraph
