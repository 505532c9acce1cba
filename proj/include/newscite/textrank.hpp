#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/text.hpp"

// TextRank sentence centrality: PageRank over the sentence graph with
// Jaccard-weighted edges. Sentences with no lexical overlap to any other
// sentence keep the (1 - d) floor.

namespace newscite::textrank {

struct CentralityResult {
    std::vector<double> scores;
    std::size_t central_index = 0;  // argmax, earliest on ties
    int iterations = 0;
    bool converged = false;
};

inline CentralityResult textrank_centrality(const std::vector<std::vector<std::string>>& sentence_tokens,
                                            double d = 0.85, double tol = 1e-6, int max_iter = 200) {
    const std::size_t n = sentence_tokens.size();
    CentralityResult result;
    result.scores.assign(n, 1.0 - d);
    if (n == 0) return result;
    if (n == 1) {
        result.converged = true;
        return result;
    }

    std::vector<text::TokenSet> sets;
    sets.reserve(n);
    for (const auto& toks : sentence_tokens) sets.push_back(text::token_set(toks));

    // symmetric weights; only positive edges are kept
    std::vector<std::vector<std::pair<std::size_t, double>>> edges(n);
    std::vector<double> out_sum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = text::jaccard(sets[i], sets[j]);
            if (w > 0.0) {
                edges[i].emplace_back(j, w);
                edges[j].emplace_back(i, w);
                out_sum[i] += w;
                out_sum[j] += w;
            }
        }
    }

    std::vector<double> scores(n, 1.0), next(n);
    int iter = 0;
    bool converged = false;
    for (; iter < max_iter; ++iter) {
        double max_delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (const auto& [j, w] : edges[i]) acc += w / out_sum[j] * scores[j];
            next[i] = (1.0 - d) + d * acc;
            max_delta = std::max(max_delta, std::abs(next[i] - scores[i]));
        }
        scores.swap(next);
        if (max_delta < tol) {
            converged = true;
            ++iter;
            break;
        }
    }

    result.scores = std::move(scores);
    result.iterations = iter;
    result.converged = converged;
    result.central_index = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (result.scores[i] > result.scores[result.central_index]) result.central_index = i;
    return result;
}

inline CentralityResult textrank_centrality(const corpus::NewsArticle& article, double d = 0.85,
                                            double tol = 1e-6, int max_iter = 200) {
    std::vector<std::vector<std::string>> sentences;
    const std::string body = article.body();
    sentences.reserve(article.sentences.size());
    for (const auto& sp : article.sentences)
        sentences.push_back(text::tokenize(std::string_view(body).substr(sp.begin, sp.end - sp.begin)));
    return textrank_centrality(sentences, d, tol, max_iter);
}

}  // namespace newscite::textrank
