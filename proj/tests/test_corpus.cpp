#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "newscite/corpus.hpp"

using namespace newscite;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("load_statements: empty file yields empty list") {
    auto path = write_temp("stmt_empty.jsonl", "");
    CHECK(corpus::load_statements(path).empty());
}

TEST_CASE("load_statements: domain derived from URL host") {
    auto path = write_temp("stmt_domain.jsonl",
                           R"({"id":"s1","entity_id":"e1","section":"Career","text":"He won.",)"
                           R"("snapshot_year":2015,"citations":[)"
                           R"({"url":"http://www.bbc.co.uk/x","category":"news"},)"
                           R"({"url":"https://news.example.com/a","domain":"news.example.com","category":"web"}]})"
                           "\n");
    auto statements = corpus::load_statements(path);
    REQUIRE(statements.size() == 1);
    REQUIRE(statements[0].citations.size() == 2);
    CHECK(statements[0].citations[0].domain == "bbc.co.uk");  // www. stripped
    CHECK(statements[0].citations[1].domain == "news.example.com");  // explicit domain kept
}

TEST_CASE("load_statements: truncated line reported with its number") {
    std::string lines;
    for (int i = 1; i <= 10; ++i) {
        if (i == 7) {
            lines += R"({"id":"s7","text":"broke)";
        } else {
            lines += R"({"id":"s)" + std::to_string(i) + R"(","entity_id":"e","section":"S",)" +
                     R"("text":"ok","snapshot_year":2015})";
        }
        lines += "\n";
    }
    auto path = write_temp("stmt_broken.jsonl", lines);
    CHECK_THROWS_WITH(corpus::load_statements(path), Catch::Matchers::ContainsSubstring("line 7"));
}

TEST_CASE("load_statements: duplicate id names the id") {
    auto path = write_temp("stmt_dup.jsonl",
                           R"({"id":"sX","entity_id":"e","section":"S","text":"a","snapshot_year":2015})"
                           "\n"
                           R"({"id":"sX","entity_id":"e","section":"S","text":"b","snapshot_year":2015})"
                           "\n");
    CHECK_THROWS_WITH(corpus::load_statements(path), Catch::Matchers::ContainsSubstring("sX"));
}

TEST_CASE("load_articles: blank-line body split and char_length") {
    auto path = write_temp("art_body.jsonl", R"({"id":"a1","url":"http://x.test/a","body":"A.\n\nB."})"
                                                 "\n");
    auto articles = corpus::load_articles(path);
    REQUIRE(articles.size() == 1);
    CHECK(articles[0].paragraphs == std::vector<std::string>{"A.", "B."});
    CHECK(articles[0].char_length == 4);
}

TEST_CASE("load_articles: explicit sentence spans preserved verbatim") {
    auto path = write_temp("art_spans.jsonl",
                           R"({"id":"a1","url":"u","paragraphs":["One. Two."],)"
                           R"("sentences":[{"begin":0,"end":9}]})"
                           "\n");
    auto articles = corpus::load_articles(path);
    REQUIRE(articles[0].sentences.size() == 1);
    CHECK(articles[0].sentences[0].begin == 0);
    CHECK(articles[0].sentences[0].end == 9);
}

TEST_CASE("load_articles: record with neither body nor paragraphs names the id") {
    auto path = write_temp("art_missing.jsonl",
                           R"({"id":"a1","url":"u","body":"Fine text here."})"
                           "\n"
                           R"({"id":"a2","url":"u2","body":""})"
                           "\n"
                           R"({"id":"a3","url":"u3","body":"Also fine."})"
                           "\n");
    CHECK_THROWS_WITH(corpus::load_articles(path), Catch::Matchers::ContainsSubstring("a2"));
}

TEST_CASE("segment_sentences: basic boundaries") {
    auto spans = corpus::segment_sentences("It rained. He left.");
    REQUIRE(spans.size() == 2);
    CHECK(spans[0].begin == 0);
    CHECK(spans[0].end == 10);
    CHECK(spans[1].begin == 11);
    CHECK(spans[1].end == 19);
}

TEST_CASE("segment_sentences: abbreviation guard") {
    auto spans = corpus::segment_sentences("Mr. Smith left.");
    CHECK(spans.size() == 1);
}

TEST_CASE("segment_sentences: covers non-whitespace text and is idempotent") {
    std::string text;
    for (int i = 0; i < 500; ++i) text += "Sentence number " + std::to_string(i) + " is here. ";
    auto first = corpus::segment_sentences(text);
    CHECK(first.size() == 500);
    auto second = corpus::segment_sentences(text);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].begin == second[i].begin);
        CHECK(first[i].end == second[i].end);
    }
    // spans trim whitespace and are in order
    for (const auto& sp : first) {
        CHECK(sp.begin < sp.end);
        CHECK(text[sp.begin] != ' ');
        CHECK(text[sp.end - 1] != ' ');
    }
}

TEST_CASE("round-trip: load -> serialize -> load is structurally equal") {
    auto path = write_temp("stmt_rt.jsonl",
                           R"({"id":"s1","entity_id":"e1","section":"Career","text":"He said it.",)"
                           R"("anchors":["e2","e3"],"snapshot_year":2014,"citations":[)"
                           R"({"url":"http://news.site/a","category":"news"}]})"
                           "\n");
    auto first = corpus::load_statements(path);
    auto rt_path = std::filesystem::temp_directory_path() / "stmt_rt2.jsonl";
    corpus::save_statements(rt_path, first);
    auto second = corpus::load_statements(rt_path);
    REQUIRE(first.size() == second.size());
    CHECK(first[0].id == second[0].id);
    CHECK(first[0].text == second[0].text);
    CHECK(first[0].anchors == second[0].anchors);
    CHECK(first[0].citations[0].url == second[0].citations[0].url);
    CHECK(first[0].citations[0].domain == second[0].citations[0].domain);
    CHECK(first[0].citations[0].category.name == second[0].citations[0].category.name);
    CHECK(first[0].snapshot_year == second[0].snapshot_year);
}

TEST_CASE("citation categories map into the closed enumeration") {
    CHECK(corpus::parse_category("news").kind == corpus::CategoryKind::news);
    CHECK(corpus::parse_category("books").name == "book");
    CHECK(corpus::parse_category("press release").kind == corpus::CategoryKind::press_release);
    auto other = corpus::parse_category("somethingelse");
    CHECK(other.kind == corpus::CategoryKind::other);
    CHECK(other.name == "somethingelse");
}

TEST_CASE("annotation loader validates dependency indices and root count") {
    auto good = write_temp("ann_good.jsonl",
                           R"({"unit_id":"s1","tokens":[["He","PRP"],["left","VBD"]],)"
                           R"("dependencies":[[1,0,"nsubj"],[-1,1,"root"]]})"
                           "\n");
    auto layers = corpus::load_annotations(good);
    REQUIRE(layers.size() == 1);
    CHECK(layers[0].tokens.size() == 2);

    auto two_roots = write_temp("ann_bad.jsonl",
                                R"({"unit_id":"s1","tokens":[["a","DT"],["b","NN"]],)"
                                R"("dependencies":[[-1,0,"root"],[-1,1,"root"]]})"
                                "\n");
    CHECK_THROWS(corpus::load_annotations(two_roots));
}
