#include <catch2/catch_amalgamated.hpp>

#include "newscite/rng.hpp"
#include "newscite/text.hpp"
#include "newscite/textrank.hpp"

using namespace newscite;

namespace {

// Independent oracle: dense transition matrix, plain power iteration.
std::vector<double> dense_textrank(const std::vector<std::vector<std::string>>& sentences, double d,
                                   int iterations) {
    const std::size_t n = sentences.size();
    std::vector<text::TokenSet> sets;
    for (const auto& s : sentences) sets.push_back(text::token_set(s));
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            w[i][j] = text::jaccard(sets[i], sets[j]);
            out[j] += 0.0;  // filled below
        }
    }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
            if (j != k) out[j] += w[j][k];
    std::vector<double> scores(n, 1.0), next(n, 0.0);
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i && w[i][j] > 0.0 && out[j] > 0.0) acc += w[i][j] / out[j] * scores[j];
            next[i] = (1.0 - d) + d * acc;
        }
        scores = next;
    }
    return scores;
}

std::vector<std::vector<std::string>> tokenized(const std::vector<std::string>& sentences) {
    std::vector<std::vector<std::string>> out;
    for (const auto& s : sentences) out.push_back(text::tokenize(s));
    return out;
}

}  // namespace

TEST_CASE("three identical sentences share one score") {
    auto sents = tokenized({"the cat sat", "the cat sat", "the cat sat"});
    auto result = textrank::textrank_centrality(sents);
    REQUIRE(result.scores.size() == 3);
    CHECK(result.converged);
    for (double s : result.scores) CHECK(s == Catch::Approx(result.scores[0]).margin(1e-6));
    CHECK(result.central_index == 0);  // tie -> earliest sentence
}

TEST_CASE("sentence with no overlap keeps the damping floor") {
    auto sents = tokenized({"alpha beta gamma", "alpha beta delta", "zzz qqq www"});
    auto result = textrank::textrank_centrality(sents);
    CHECK(result.scores[2] == Catch::Approx(0.15).margin(1e-12));
    CHECK(result.scores[0] > 0.15);
}

TEST_CASE("single-sentence article: the sentence is central at 1 - d") {
    auto result = textrank::textrank_centrality(tokenized({"only one sentence here"}));
    REQUIRE(result.scores.size() == 1);
    CHECK(result.scores[0] == Catch::Approx(0.15).margin(1e-12));
    CHECK(result.central_index == 0);
    CHECK(result.converged);
}

TEST_CASE("five-sentence fixture matches the dense power-iteration oracle") {
    auto sents = tokenized({
        "the council approved the new budget on monday",
        "the budget includes funding for schools and roads",
        "critics said the budget ignores public transport",
        "the mayor defended the spending plan in a speech",
        "weather on monday was cold with light rain",
    });
    auto result = textrank::textrank_centrality(sents);
    CHECK(result.converged);
    CHECK(result.iterations <= 200);
    auto oracle = dense_textrank(sents, 0.85, 600);
    REQUIRE(oracle.size() == result.scores.size());
    for (std::size_t i = 0; i < oracle.size(); ++i)
        CHECK(result.scores[i] == Catch::Approx(oracle[i]).margin(1e-6));

    // central sentence is the argmax of the oracle too
    std::size_t oracle_central =
        std::distance(oracle.begin(), std::max_element(oracle.begin(), oracle.end()));
    CHECK(result.central_index == oracle_central);
}

TEST_CASE("scores never fall below 1 - d and converge on random articles") {
    rng::Rng rng(4);
    const std::vector<std::string> vocab{"one", "two", "three", "four", "five", "six", "seven"};
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<std::vector<std::string>> sents;
        const std::size_t n = 1 + rng.next_index(12);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::string> s;
            const std::size_t len = 2 + rng.next_index(6);
            for (std::size_t k = 0; k < len; ++k) s.push_back(vocab[rng.next_index(vocab.size())]);
            sents.push_back(std::move(s));
        }
        auto result = textrank::textrank_centrality(sents);
        CHECK(result.converged);
        for (double s : result.scores) CHECK(s >= 0.15 - 1e-12);
    }
}

TEST_CASE("article overload segments and ranks") {
    corpus::NewsArticle a;
    a.id = "a1";
    a.paragraphs = {"The vote passed. The vote was close.", "Rain fell on the empty stadium."};
    corpus::segment_article(a);
    REQUIRE(a.sentences.size() == 3);
    auto result = textrank::textrank_centrality(a);
    CHECK(result.scores.size() == 3);
    CHECK(result.converged);
}
