#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/jsonl.hpp"
#include "newscite/resources.hpp"
#include "newscite/text.hpp"

// Inverted index over the news collection with divergence-from-randomness
// (PL2) scoring and tf-idf query construction against a statement pool.

namespace newscite::retrieval {

using corpus::NewsArticle;
using corpus::Statement;

struct Posting {
    std::string doc;
    int tf = 0;
};

class InvertedIndex {
public:
    static InvertedIndex build(const std::vector<NewsArticle>& articles) {
        InvertedIndex index;
        for (const auto& a : articles) {
            if (index.doc_len_.count(a.id)) throw Error("duplicate article id '" + a.id + "'");
            auto tokens = text::tokenize(a.title + " " + a.body());
            std::map<std::string, int> tf;  // ordered: postings stay sorted by doc insertion order below
            for (const auto& t : tokens) tf[t] += 1;
            index.doc_len_[a.id] = static_cast<long>(tokens.size());
            index.total_len_ += static_cast<long>(tokens.size());
            for (const auto& [term, n] : tf) {
                index.postings_[term].push_back({a.id, n});
                index.term_total_[term] += n;
            }
        }
        for (auto& [term, plist] : index.postings_)
            std::sort(plist.begin(), plist.end(),
                      [](const Posting& x, const Posting& y) { return x.doc < y.doc; });
        return index;
    }

    std::size_t doc_count() const { return doc_len_.size(); }
    double avg_doc_length() const {
        return doc_len_.empty() ? 0.0 : static_cast<double>(total_len_) / static_cast<double>(doc_len_.size());
    }
    long doc_length(const std::string& doc) const {
        auto it = doc_len_.find(doc);
        return it == doc_len_.end() ? 0 : it->second;
    }
    long term_occurrences(const std::string& term) const {  // F(term) over the collection
        auto it = term_total_.find(term);
        return it == term_total_.end() ? 0 : it->second;
    }
    const std::vector<Posting>* postings(const std::string& term) const {
        auto it = postings_.find(term);
        return it == postings_.end() ? nullptr : &it->second;
    }
    int term_frequency(const std::string& term, const std::string& doc) const {
        auto* plist = postings(term);
        if (!plist) return 0;
        auto it = std::lower_bound(plist->begin(), plist->end(), doc,
                                   [](const Posting& p, const std::string& d) { return p.doc < d; });
        return it != plist->end() && it->doc == doc ? it->tf : 0;
    }
    std::vector<std::string> documents() const {
        std::vector<std::string> out;
        out.reserve(doc_len_.size());
        for (const auto& [id, len] : doc_len_) out.push_back(id);
        std::sort(out.begin(), out.end());
        return out;
    }

    // --- snapshot (versioned JSON) ---

    void save(const std::filesystem::path& path) const {
        nlohmann::json j;
        j["format"] = "newscite-index";
        j["version"] = 1;
        j["doc_lengths"] = nlohmann::json::object();
        for (const auto& [doc, len] : doc_len_) j["doc_lengths"][doc] = len;
        nlohmann::json posts = nlohmann::json::object();
        for (const auto& [term, plist] : postings_) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& p : plist) arr.push_back(nlohmann::json::array({p.doc, p.tf}));
            posts[term] = std::move(arr);
        }
        j["postings"] = std::move(posts);
        jsonl::write_json_file(path, j);
    }

    static InvertedIndex load(const std::filesystem::path& path) {
        nlohmann::json j = jsonl::read_json_file(path);
        if (j.value("format", "") != "newscite-index" || j.value("version", 0) != 1)
            throw Error(path.string() + ": not a newscite-index v1 snapshot");
        InvertedIndex index;
        for (const auto& [doc, len] : j.at("doc_lengths").items()) {
            index.doc_len_[doc] = len.get<long>();
            index.total_len_ += len.get<long>();
        }
        for (const auto& [term, arr] : j.at("postings").items()) {
            auto& plist = index.postings_[term];
            long total = 0;
            for (const auto& p : arr) {
                plist.push_back({p.at(0).get<std::string>(), p.at(1).get<int>()});
                total += p.at(1).get<int>();
            }
            index.term_total_[term] = total;
        }
        return index;
    }

private:
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<std::string, long> term_total_;
    std::unordered_map<std::string, long> doc_len_;
    long total_len_ = 0;
};

// ---------------------------------------------------------------------------
// Query construction (QCA1Base)

struct Query {
    std::vector<std::pair<std::string, double>> terms;  // weight-descending, weights > 0
    std::string statement_id;
};

// Statement terms weighted by tf-idf against the statement pool:
// weight(term) = tf(term, s) * ln(|pool| / df_pool(term)). Stopwords are
// removed before weighting; zero-weight terms (present in every pool
// statement) are excluded; the top-k by weight survive, ties broken by term.
inline Query construct_query_qca1(const Statement& s, const std::vector<Statement>& pool,
                                  const text::Resources& resources, std::size_t top_k_terms = 50) {
    if (pool.size() < 2) throw Error("query construction needs a pool of at least 2 statements");

    auto content_tokens = [&](const std::string& t) {
        std::vector<std::string> out;
        for (auto& tok : text::tokenize(t))
            if (!resources.is_stopword(tok)) out.push_back(std::move(tok));
        return out;
    };

    std::unordered_map<std::string, int> tf;
    for (const auto& tok : content_tokens(s.text)) tf[tok] += 1;
    if (tf.empty()) throw Error("statement '" + s.id + "' has no indexable terms");

    std::unordered_map<std::string, int> df;
    for (const auto& other : pool) {
        std::unordered_set<std::string> seen;
        for (const auto& tok : content_tokens(other.text)) seen.insert(tok);
        for (const auto& tok : seen)
            if (tf.count(tok)) df[tok] += 1;
    }

    std::vector<std::pair<std::string, double>> weighted;
    const double pool_size = static_cast<double>(pool.size());
    for (const auto& [term, count] : tf) {
        const int d = std::max(1, df.count(term) ? df.at(term) : 1);
        const double w = static_cast<double>(count) * std::log(pool_size / static_cast<double>(d));
        if (w > 0.0) weighted.emplace_back(term, w);
    }
    if (weighted.empty())
        throw Error("statement '" + s.id + "' has no discriminative terms against the pool");

    std::sort(weighted.begin(), weighted.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (weighted.size() > top_k_terms) weighted.resize(top_k_terms);

    Query q;
    q.terms = std::move(weighted);
    q.statement_id = s.id;
    return q;
}

// ---------------------------------------------------------------------------
// PL2 scoring

inline constexpr double kDefaultPl2C = 1.0;

// Per-term PL2 contribution for a document, clamped at zero. tf is the
// term's frequency in the document.
inline double pl2_term_score(int tf, long doc_len, double avg_doc_len, long term_total,
                             std::size_t doc_count, double c = kDefaultPl2C) {
    if (tf <= 0 || doc_len <= 0) return 0.0;
    const double tfn = tf * std::log2(1.0 + c * avg_doc_len / static_cast<double>(doc_len));
    if (tfn <= 0.0) return 0.0;
    const double lambda = static_cast<double>(term_total) / static_cast<double>(doc_count);
    const double score = (tfn * std::log2(tfn / lambda) + (lambda - tfn) * std::numbers::log2e +
                          0.5 * std::log2(2.0 * std::numbers::pi * tfn)) /
                         (tfn + 1.0);
    return std::max(score, 0.0);
}

inline double dfr_score(const InvertedIndex& index, const Query& query, const std::string& article_id,
                        double c = kDefaultPl2C) {
    if (index.doc_count() == 0) throw Error("cannot score against an empty index");
    const long dl = index.doc_length(article_id);
    const double avgdl = index.avg_doc_length();
    double total = 0.0;
    for (const auto& [term, weight] : query.terms) {
        const int tf = index.term_frequency(term, article_id);
        if (tf == 0) continue;
        total += weight * pl2_term_score(tf, dl, avgdl, index.term_occurrences(term), index.doc_count(), c);
    }
    return total;
}

struct SearchResult {
    std::string doc;
    double score = 0.0;
    int rank = 0;  // 1-based
};

// Scores every document (accumulated over query-term postings; documents
// matching no term score 0), sorts by score descending with ties by id.
inline std::vector<SearchResult> search(const InvertedIndex& index, const Query& query,
                                        std::size_t k = 100, double c = kDefaultPl2C) {
    if (k < 1) throw Error("search needs k >= 1");
    if (index.doc_count() == 0) throw Error("cannot search an empty index");

    std::unordered_map<std::string, double> scores;
    const double avgdl = index.avg_doc_length();
    for (const auto& [term, weight] : query.terms) {
        const auto* plist = index.postings(term);
        if (!plist) continue;
        const long total = index.term_occurrences(term);
        for (const auto& p : *plist) {
            scores[p.doc] += weight *
                             pl2_term_score(p.tf, index.doc_length(p.doc), avgdl, total, index.doc_count(), c);
        }
    }

    std::vector<SearchResult> results;
    results.reserve(index.doc_count());
    for (const auto& doc : index.documents()) {
        auto it = scores.find(doc);
        results.push_back({doc, it == scores.end() ? 0.0 : it->second, 0});
    }
    std::sort(results.begin(), results.end(), [](const SearchResult& a, const SearchResult& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc < b.doc;
    });
    if (results.size() > k) results.resize(k);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = static_cast<int>(i) + 1;
    return results;
}

// ---------------------------------------------------------------------------
// Hit-rate evaluation

struct EvalPair {
    const Statement* statement = nullptr;
    std::vector<std::string> ground_truth;  // article ids
};

// Fraction of statements with any ground-truth article in the top-k, for
// each requested k. Monotone non-decreasing in k by construction.
inline std::vector<std::pair<std::size_t, double>> hit_rate_at_k(
    const InvertedIndex& index, const std::vector<EvalPair>& pairs,
    const std::vector<Statement>& pool, const text::Resources& resources,
    const std::vector<std::size_t>& ks, std::size_t top_k_terms = 50, double c = kDefaultPl2C) {
    std::vector<std::size_t> sorted_ks = ks;
    std::sort(sorted_ks.begin(), sorted_ks.end());
    const std::size_t max_k = sorted_ks.empty() ? 0 : sorted_ks.back();

    std::vector<std::size_t> first_hit;  // rank of first ground-truth hit, or npos
    for (const auto& pair : pairs) {
        std::size_t hit = std::string::npos;
        try {
            Query q = construct_query_qca1(*pair.statement, pool, resources, top_k_terms);
            auto results = search(index, q, std::max<std::size_t>(max_k, 1), c);
            std::unordered_set<std::string> truth(pair.ground_truth.begin(), pair.ground_truth.end());
            for (const auto& r : results) {
                if (truth.count(r.doc)) {
                    hit = static_cast<std::size_t>(r.rank);
                    break;
                }
            }
        } catch (const Error&) {
            // unretrievable statement contributes zero at every k
        }
        first_hit.push_back(hit);
    }

    std::vector<std::pair<std::size_t, double>> curve;
    for (std::size_t k : sorted_ks) {
        std::size_t hits = 0;
        for (auto h : first_hit) hits += (h != std::string::npos && h <= k) ? 1 : 0;
        curve.emplace_back(k, pairs.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(pairs.size()));
    }
    return curve;
}

}  // namespace newscite::retrieval
