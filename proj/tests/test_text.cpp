#include <catch2/catch_amalgamated.hpp>

#include "newscite/resources.hpp"
#include "newscite/text.hpp"

using namespace newscite;

namespace {

const text::Resources& resources() {
    static const text::Resources r = text::Resources::load(std::string(NEWSCITE_SOURCE_DIR) + "/resources");
    return r;
}

}  // namespace

TEST_CASE("tokenize basics") {
    CHECK(text::tokenize("He said, \"go\".") == std::vector<std::string>{"he", "said", "go"});
    CHECK(text::tokenize("").empty());
    CHECK(text::tokenize("Born 1985; died 2010.") ==
          std::vector<std::string>{"born", "1985", "died", "2010"});
}

TEST_CASE("tokenize is deterministic on long input") {
    std::string doc;
    for (int i = 0; i < 1000; ++i) doc += "word" + std::to_string(i % 37) + " ";
    CHECK(text::tokenize(doc) == text::tokenize(doc));
}

TEST_CASE("jaccard") {
    text::TokenSet a{"x", "y", "z"};
    text::TokenSet b{"y", "z", "w"};
    CHECK(text::jaccard(a, a) == 1.0);
    CHECK(text::jaccard(a, text::TokenSet{}) == 0.0);
    CHECK(text::jaccard(text::TokenSet{}, text::TokenSet{}) == 0.0);
    CHECK(text::jaccard(a, b) == 0.5);
    CHECK(text::jaccard(a, b) == text::jaccard(b, a));
}

TEST_CASE("ngram_overlap at n=1 equals unigram-set jaccard") {
    std::vector<std::string> a{"the", "cat", "sat", "cat"};
    std::vector<std::string> b{"cat", "ran"};
    CHECK(text::ngram_overlap(a, b, 1) ==
          text::jaccard(text::token_set(a), text::token_set(b)));
    CHECK(text::ngram_overlap(a, a, 2) == 1.0);
    CHECK(text::ngram_overlap(a, b, 3) == 0.0);
}

TEST_CASE("nnp phrase overlap") {
    corpus::AnnotationLayer a;
    a.tokens = {{"Barack", "NNP"}, {"Obama", "NNP"}, {"spoke", "VBD"}, {"in", "IN"}, {"Berlin", "NNP"}};
    corpus::AnnotationLayer b;
    b.tokens = {{"Barack", "NNP"}, {"Obama", "NNP"}, {"visited", "VBD"}, {"Paris", "NNP"}};
    // phrases: {barack obama, berlin} vs {barack obama, paris} -> 1/3
    CHECK(text::nnp_phrase_overlap(&a, &b) == Catch::Approx(1.0 / 3.0));
    CHECK_THROWS(text::nnp_phrase_overlap(&a, nullptr));
}

TEST_CASE("extract_years: the four rules") {
    CHECK(text::extract_years("12 March 2014") == std::vector<int>{2014});
    CHECK(text::extract_years("03-04-99") == std::vector<int>{1999});
    CHECK(text::extract_years("born 1985, died 2010") == std::vector<int>{1985, 2010});
    CHECK(text::extract_years("on 03.04.2015 it rained") == std::vector<int>{2015});
    CHECK(text::extract_years("version 2.0 of 0.3.1") == std::vector<int>{});
    CHECK(text::extract_years("meeting on 5 Jan. 2004, again in 2006") ==
          std::vector<int>{2004, 2006});
    // two-digit pivot: > 30 -> 19xx, else 20xx
    CHECK(text::extract_years("12 31 04") == std::vector<int>{2004});
    CHECK(text::extract_years("12 31 77") == std::vector<int>{1977});
}

TEST_CASE("extract_years is idempotent and order-stable") {
    const std::string s = "From 12 March 2014 to 03-04-99, and 2001 again in 2001.";
    auto once = text::extract_years(s);
    CHECK(once == text::extract_years(s));
    CHECK(once == std::vector<int>{2014, 1999, 2001, 2001});
}

TEST_CASE("discourse flags from the connective lexicon") {
    auto flags = text::discourse_flags(text::tokenize("he left because it rained"), resources());
    CHECK(flags.contingency);
    CHECK_FALSE(flags.temporal);
    CHECK_FALSE(flags.comparison);
    CHECK_FALSE(flags.expansion);

    auto none = text::discourse_flags(text::tokenize("plain words only"), resources());
    CHECK_FALSE(none.any());

    auto two = text::discourse_flags(text::tokenize("however, he then left"), resources());
    CHECK(two.comparison);
    CHECK(two.temporal);

    // multiword connective must appear as a consecutive run
    auto multi = text::discourse_flags(text::tokenize("as soon as she arrived"), resources());
    CHECK(multi.temporal);
}

TEST_CASE("attribution verb lookup de-inflects") {
    const auto& r = resources();
    CHECK(r.is_attribution_verb("announced"));
    CHECK(r.is_attribution_verb("says"));
    CHECK(r.is_attribution_verb("said"));
    CHECK(r.is_attribution_verb("claiming"));
    CHECK_FALSE(r.is_attribution_verb("walked"));
}

TEST_CASE("resource lists are complete") {
    CHECK(resources().attribution_verbs.size() == 92);
    CHECK(resources().stopwords.count("the") == 1);
    CHECK_FALSE(resources().connectives.empty());
}
