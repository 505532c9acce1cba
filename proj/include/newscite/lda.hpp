#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "newscite/error.hpp"
#include "newscite/rng.hpp"
#include "newscite/text.hpp"

// Small LDA topic model trained with collapsed Gibbs sampling, deterministic
// under a fixed seed. Only the ranked top terms per topic are retained; the
// topic score of a token list is its best Jaccard overlap with any topic's
// top-m terms.

namespace newscite::lda {

struct TopicModel {
    static constexpr int kTopStored = 50;

    int num_topics = 0;
    double alpha = 0.0;
    double beta = 0.0;
    int iterations = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::string>> top_terms;  // per topic, by count desc then term
};

inline TopicModel train_lda(const std::vector<std::vector<std::string>>& docs, int num_topics,
                            int iterations, double alpha, double beta, std::uint64_t seed) {
    if (num_topics < 1) throw Error("LDA needs at least one topic");
    if (docs.size() < static_cast<std::size_t>(num_topics))
        throw Error("LDA needs at least as many documents as topics");

    std::unordered_map<std::string, int> vocab;
    std::vector<std::string> words;
    std::vector<std::vector<int>> corpus(docs.size());
    std::size_t total_tokens = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        for (const auto& tok : docs[d]) {
            auto it = vocab.find(tok);
            if (it == vocab.end()) {
                it = vocab.emplace(tok, static_cast<int>(words.size())).first;
                words.push_back(tok);
            }
            corpus[d].push_back(it->second);
            ++total_tokens;
        }
    }
    if (total_tokens == 0) throw Error("cannot train LDA on an empty corpus");

    const int K = num_topics;
    const int V = static_cast<int>(words.size());
    std::vector<std::vector<int>> doc_topic(docs.size(), std::vector<int>(K, 0));
    std::vector<std::vector<int>> topic_word(K, std::vector<int>(V, 0));
    std::vector<int> topic_total(K, 0);
    std::vector<std::vector<int>> assignment(docs.size());

    rng::Rng rng(seed);
    for (std::size_t d = 0; d < corpus.size(); ++d) {
        assignment[d].resize(corpus[d].size());
        for (std::size_t i = 0; i < corpus[d].size(); ++i) {
            int t = static_cast<int>(rng.next_index(K));
            assignment[d][i] = t;
            doc_topic[d][t] += 1;
            topic_word[t][corpus[d][i]] += 1;
            topic_total[t] += 1;
        }
    }

    std::vector<double> weights(K);
    for (int iter = 0; iter < iterations; ++iter) {
        for (std::size_t d = 0; d < corpus.size(); ++d) {
            for (std::size_t i = 0; i < corpus[d].size(); ++i) {
                const int w = corpus[d][i];
                const int old = assignment[d][i];
                doc_topic[d][old] -= 1;
                topic_word[old][w] -= 1;
                topic_total[old] -= 1;

                double cumulative = 0.0;
                for (int k = 0; k < K; ++k) {
                    cumulative += (doc_topic[d][k] + alpha) * (topic_word[k][w] + beta) /
                                  (topic_total[k] + V * beta);
                    weights[k] = cumulative;
                }
                const double r = rng.next_double() * cumulative;
                int chosen = K - 1;
                for (int k = 0; k < K; ++k) {
                    if (r < weights[k]) {
                        chosen = k;
                        break;
                    }
                }
                assignment[d][i] = chosen;
                doc_topic[d][chosen] += 1;
                topic_word[chosen][w] += 1;
                topic_total[chosen] += 1;
            }
        }
    }

    TopicModel model;
    model.num_topics = K;
    model.alpha = alpha;
    model.beta = beta;
    model.iterations = iterations;
    model.seed = seed;
    model.top_terms.resize(K);
    for (int k = 0; k < K; ++k) {
        std::vector<int> ids;
        for (int w = 0; w < V; ++w)
            if (topic_word[k][w] > 0) ids.push_back(w);
        std::sort(ids.begin(), ids.end(), [&](int a, int b) {
            if (topic_word[k][a] != topic_word[k][b]) return topic_word[k][a] > topic_word[k][b];
            return words[a] < words[b];
        });
        if (ids.size() > static_cast<std::size_t>(TopicModel::kTopStored)) ids.resize(TopicModel::kTopStored);
        for (int id : ids) model.top_terms[k].push_back(words[id]);
    }
    return model;
}

// Max over topics of Jaccard(statement tokens, top-m topic terms).
inline double topic_score(const TopicModel& model, const std::vector<std::string>& tokens, int m = 20) {
    if (m < 1) throw Error("topic_score needs m >= 1");
    const auto stmt = text::token_set(tokens);
    double best = 0.0;
    for (const auto& terms : model.top_terms) {
        text::TokenSet topic;
        for (std::size_t i = 0; i < terms.size() && i < static_cast<std::size_t>(m); ++i)
            topic.insert(terms[i]);
        best = std::max(best, text::jaccard(stmt, topic));
    }
    return best;
}

}  // namespace newscite::lda
