#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "newscite/retrieval.hpp"
#include "newscite/rng.hpp"

using namespace newscite;
using corpus::NewsArticle;
using corpus::Statement;

namespace {

const text::Resources& resources() {
    static const text::Resources r = text::Resources::load(std::string(NEWSCITE_SOURCE_DIR) + "/resources");
    return r;
}

NewsArticle article(const std::string& id, const std::string& body, const std::string& title = "") {
    NewsArticle a;
    a.id = id;
    a.title = title;
    a.paragraphs = corpus::split_paragraphs(body);
    if (a.paragraphs.empty()) a.paragraphs = {body};
    corpus::segment_article(a);
    for (const auto& p : a.paragraphs) a.char_length += p.size();
    return a;
}

Statement statement(const std::string& id, const std::string& text) {
    Statement s;
    s.id = id;
    s.entity_id = "e";
    s.section = "S";
    s.text = text;
    s.snapshot_year = 2015;
    return s;
}

// Independent oracle: scores every document from raw text with its own term
// counting and the PL2 formula written out directly.
std::vector<retrieval::SearchResult> brute_force_search(const std::vector<NewsArticle>& articles,
                                                        const retrieval::Query& query, double c = 1.0) {
    const double N = static_cast<double>(articles.size());
    std::vector<std::vector<std::string>> docs;
    double total_len = 0.0;
    for (const auto& a : articles) {
        docs.push_back(text::tokenize(a.title + " " + a.body()));
        total_len += static_cast<double>(docs.back().size());
    }
    const double avgdl = total_len / N;
    auto count = [](const std::vector<std::string>& tokens, const std::string& term) {
        long n = 0;
        for (const auto& t : tokens) n += t == term;
        return n;
    };
    std::vector<retrieval::SearchResult> results;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        double score = 0.0;
        for (const auto& [term, weight] : query.terms) {
            const long tf = count(docs[i], term);
            if (tf == 0) continue;
            long F = 0;
            for (const auto& d : docs) F += count(d, term);
            const double tfn =
                static_cast<double>(tf) * std::log2(1.0 + c * avgdl / static_cast<double>(docs[i].size()));
            const double lambda = static_cast<double>(F) / N;
            double term_score = (tfn * std::log2(tfn / lambda) + (lambda - tfn) * std::numbers::log2e +
                                 0.5 * std::log2(2.0 * std::numbers::pi * tfn)) /
                                (tfn + 1.0);
            score += weight * std::max(term_score, 0.0);
        }
        results.push_back({articles[i].id, score, 0});
    }
    std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc < b.doc;
    });
    for (std::size_t i = 0; i < results.size(); ++i) results[i].rank = static_cast<int>(i) + 1;
    return results;
}

}  // namespace

TEST_CASE("index invariants on a tiny corpus") {
    auto index = retrieval::InvertedIndex::build({article("d1", "a a b")});
    CHECK(index.term_occurrences("a") == 2);
    CHECK(index.term_occurrences("b") == 1);
    CHECK(index.doc_length("d1") == 3);
    CHECK(index.doc_count() == 1);
    CHECK(index.term_frequency("a", "d1") == 2);
}

TEST_CASE("empty index is valid but cannot be searched") {
    auto index = retrieval::InvertedIndex::build({});
    CHECK(index.doc_count() == 0);
    retrieval::Query q;
    q.terms = {{"x", 1.0}};
    CHECK_THROWS(retrieval::search(index, q));
}

TEST_CASE("duplicate article ids are rejected") {
    CHECK_THROWS(retrieval::InvertedIndex::build({article("d1", "a"), article("d1", "b")}));
}

TEST_CASE("postings match brute-force term counting on a random corpus") {
    rng::Rng rng(31);
    const std::vector<std::string> vocab{"red", "green", "blue", "cyan", "teal", "plum", "gold"};
    std::vector<NewsArticle> articles;
    for (int d = 0; d < 100; ++d) {
        std::string body;
        const std::size_t len = 5 + rng.next_index(40);
        for (std::size_t i = 0; i < len; ++i) body += vocab[rng.next_index(vocab.size())] + " ";
        articles.push_back(article("d" + std::to_string(d), body));
    }
    auto index = retrieval::InvertedIndex::build(articles);
    for (const auto& a : articles) {
        auto tokens = text::tokenize(a.body());
        std::map<std::string, int> counts;
        for (const auto& t : tokens) counts[t] += 1;
        for (const auto& [term, n] : counts) CHECK(index.term_frequency(term, a.id) == n);
        CHECK(index.doc_length(a.id) == static_cast<long>(tokens.size()));
    }
    // F(term) = sum of tf over postings
    for (const auto& term : vocab) {
        long total = 0;
        const auto* plist = index.postings(term);
        REQUIRE(plist != nullptr);
        std::string prev;
        for (const auto& p : *plist) {
            total += p.tf;
            CHECK(prev < p.doc);  // sorted by article id
            prev = p.doc;
        }
        CHECK(total == index.term_occurrences(term));
    }
}

TEST_CASE("QCA1Base weighting") {
    std::vector<Statement> pool;
    // term "shared" appears in every pool statement -> idf 0 -> excluded
    for (int i = 0; i < 10; ++i)
        pool.push_back(statement("p" + std::to_string(i),
                                 i == 0 ? "shared unique unique" : "shared filler" + std::to_string(i)));
    auto q = retrieval::construct_query_qca1(pool[0], pool, resources());
    REQUIRE(q.terms.size() == 1);
    CHECK(q.terms[0].first == "unique");
    CHECK(q.terms[0].second == Catch::Approx(2.0 * std::log(10.0)));

    // weights sorted descending and positive
    for (std::size_t i = 1; i < q.terms.size(); ++i) CHECK(q.terms[i - 1].second >= q.terms[i].second);
    for (const auto& [t, w] : q.terms) CHECK(w > 0.0);
}

TEST_CASE("QCA1Base caps the query at top_k_terms") {
    std::vector<Statement> pool;
    std::string text;
    for (int i = 0; i < 60; ++i) text += "term" + std::to_string(i) + " ";
    pool.push_back(statement("s", text));
    pool.push_back(statement("other", "completely different words"));
    auto q = retrieval::construct_query_qca1(pool[0], pool, resources(), 50);
    CHECK(q.terms.size() == 50);
}

TEST_CASE("QCA1Base rejects statements with no indexable terms") {
    std::vector<Statement> pool{statement("s", "the of and"), statement("t", "words here")};
    CHECK_THROWS(retrieval::construct_query_qca1(pool[0], pool, resources()));
    CHECK_THROWS(retrieval::construct_query_qca1(pool[0], {pool[0]}, resources()));
}

TEST_CASE("PL2 single-term score matches the formula evaluated by hand") {
    auto index = retrieval::InvertedIndex::build({article("d1", "a a b")});
    retrieval::Query q;
    q.terms = {{"a", 1.5}};
    // tf=2, dl=3, avgdl=3 -> tfn = 2*log2(2) = 2; lambda = 2/1 = 2
    // score = 1.5 * [2*log2(1) + 0*log2(e) + 0.5*log2(4*pi)] / 3
    const double expected = 1.5 * (0.5 * std::log2(4.0 * std::numbers::pi)) / 3.0;
    CHECK(retrieval::dfr_score(index, q, "d1") == Catch::Approx(expected).margin(1e-12));

    // query term absent from the document contributes nothing
    retrieval::Query q2;
    q2.terms = {{"zz", 3.0}};
    CHECK(retrieval::dfr_score(index, q2, "d1") == 0.0);
}

TEST_CASE("search equals brute-force scoring on random corpora") {
    rng::Rng rng(77);
    const std::vector<std::string> vocab{"apple", "pear",  "plum",  "grape", "melon", "fig",
                                         "date",  "peach", "mango", "berry", "lime",  "kiwi"};
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<NewsArticle> articles;
        const std::size_t n_docs = 50 + rng.next_index(150);
        for (std::size_t d = 0; d < n_docs; ++d) {
            std::string body;
            const std::size_t len = 3 + rng.next_index(30);
            for (std::size_t i = 0; i < len; ++i) body += vocab[rng.next_index(vocab.size())] + " ";
            articles.push_back(article("d" + std::to_string(1000 + d), body));
        }
        auto index = retrieval::InvertedIndex::build(articles);
        retrieval::Query q;
        q.statement_id = "probe";
        for (int t = 0; t < 4; ++t)
            q.terms.emplace_back(vocab[rng.next_index(vocab.size())], 0.5 + rng.next_double());

        auto fast = retrieval::search(index, q, n_docs);
        auto slow = brute_force_search(articles, q);
        REQUIRE(fast.size() == slow.size());
        for (std::size_t i = 0; i < fast.size(); ++i) {
            CHECK(fast[i].score == Catch::Approx(slow[i].score).margin(1e-9));
            if (fast[i].doc != slow[i].doc) {
                // permitted only for exact ties
                CHECK(fast[i].score == Catch::Approx(slow[i].score).margin(1e-12));
            }
            CHECK(fast[i].rank == static_cast<int>(i) + 1);
        }
    }
}

TEST_CASE("planted duplicate ranks first among unrelated documents") {
    rng::Rng rng(9);
    const std::vector<std::string> noise{"lorem", "ipsum", "dolor", "sit", "amet", "dignis",
                                         "ornare", "augue", "vitae", "felis"};
    std::vector<NewsArticle> articles;
    for (int d = 0; d < 1000; ++d) {
        std::string body;
        for (int i = 0; i < 25; ++i) body += noise[rng.next_index(noise.size())] + " ";
        articles.push_back(article("noise" + std::to_string(d), body));
    }
    const std::string stmt_text = "Parliament approved the controversial budget reform yesterday";
    articles.push_back(article("planted", stmt_text));

    auto index = retrieval::InvertedIndex::build(articles);
    std::vector<Statement> pool{statement("s", stmt_text), statement("bg", "lorem ipsum dolor")};
    auto q = retrieval::construct_query_qca1(pool[0], pool, resources());
    auto results = retrieval::search(index, q, 10);
    REQUIRE_FALSE(results.empty());
    CHECK(results[0].doc == "planted");
    CHECK(results[0].rank == 1);
}

TEST_CASE("hit-rate curve is monotone and finds planted ground truth") {
    rng::Rng rng(13);
    const std::vector<std::string> noise{"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};
    std::vector<NewsArticle> articles;
    std::vector<Statement> pool;
    std::vector<retrieval::EvalPair> pairs;
    for (int i = 0; i < 20; ++i) {
        std::string topic = "event" + std::to_string(i);
        std::string stext = "The " + topic + " unfolded with outcome " + std::to_string(i * 7);
        pool.push_back(statement("s" + std::to_string(i), stext));
        articles.push_back(article("gt" + std::to_string(i), stext + " according to reporters"));
    }
    for (int d = 0; d < 100; ++d) {
        std::string body;
        for (int w = 0; w < 20; ++w) body += noise[rng.next_index(noise.size())] + " ";
        articles.push_back(article("bg" + std::to_string(d), body));
    }
    auto index = retrieval::InvertedIndex::build(articles);
    for (int i = 0; i < 20; ++i)
        pairs.push_back({&pool[static_cast<std::size_t>(i)], {"gt" + std::to_string(i)}});

    auto curve = retrieval::hit_rate_at_k(index, pairs, pool, resources(), {1, 5, 10, 50});
    REQUIRE(curve.size() == 4);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i - 1].second <= curve[i].second);
    CHECK(curve[0].second == 1.0);  // planted paraphrases rank first

    // ground truth missing from the index contributes zero at every k
    std::vector<retrieval::EvalPair> missing{{&pool[0], {"not-indexed"}}};
    auto zero_curve = retrieval::hit_rate_at_k(index, missing, pool, resources(), {1, 1000});
    for (const auto& [k, rate] : zero_curve) CHECK(rate == 0.0);
}

TEST_CASE("index snapshot round-trips") {
    auto index = retrieval::InvertedIndex::build(
        {article("d1", "a a b"), article("d2", "b c"), article("d3", "c c c a")});
    auto path = std::filesystem::temp_directory_path() / "index_snapshot.json";
    index.save(path);
    auto loaded = retrieval::InvertedIndex::load(path);
    CHECK(loaded.doc_count() == index.doc_count());
    CHECK(loaded.avg_doc_length() == index.avg_doc_length());
    for (const auto& term : {"a", "b", "c"}) {
        CHECK(loaded.term_occurrences(term) == index.term_occurrences(term));
        for (const auto& doc : {"d1", "d2", "d3"})
            CHECK(loaded.term_frequency(term, doc) == index.term_frequency(term, doc));
    }
}
