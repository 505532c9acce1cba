#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/resources.hpp"
#include "newscite/text.hpp"

// Ground-truth correction heuristics and collection filters. The two
// category heuristics only ever move citations toward `news`; one pass of
// each is a fixed point of that pass.

namespace newscite::curation {

using corpus::CategoryKind;
using corpus::NewsArticle;
using corpus::Statement;

// (from, to) -> number of distinct statements with at least one citation
// changed from -> to.
struct ChangeTable {
    std::map<std::string, std::map<std::string, int>> counts;

    void record(const std::string& from, const std::string& to, int n = 1) {
        counts[from][to] += n;
    }
    int total() const {
        int t = 0;
        for (const auto& [from, row] : counts)
            for (const auto& [to, n] : row) t += n;
        return t;
    }
    int changed_from(const std::string& c) const {
        auto it = counts.find(c);
        if (it == counts.end()) return 0;
        int t = 0;
        for (const auto& [to, n] : it->second) t += n;
        return t;
    }
    int changed_to(const std::string& c) const {
        int t = 0;
        for (const auto& [from, row] : counts) {
            auto it = row.find(c);
            if (it != row.end()) t += it->second;
        }
        return t;
    }
    nlohmann::json to_json() const {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [from, row] : counts) {
            for (const auto& [to, n] : row) j[from][to] = n;
        }
        return j;
    }
};

struct MajorityVoteResult {
    std::map<std::string, std::string> reassigned_domains;  // domain -> "news"
    ChangeTable changes;
};

// Domains cited under >= 2 distinct categories flip entirely to news when
// strictly more of their citations are news than any other single category.
inline MajorityVoteResult majority_vote_domains(std::vector<Statement>& statements) {
    std::unordered_map<std::string, std::map<std::string, int>> per_domain;
    for (const auto& s : statements)
        for (const auto& c : s.citations)
            if (!c.domain.empty()) per_domain[c.domain][c.category.name] += 1;

    MajorityVoteResult result;
    std::unordered_set<std::string> flip;
    for (const auto& [domain, cats] : per_domain) {
        if (cats.size() < 2) continue;
        auto it = cats.find("news");
        if (it == cats.end()) continue;
        int news = it->second;
        bool strict = true;
        for (const auto& [cat, n] : cats) {
            if (cat != "news" && n >= news) {
                strict = false;
                break;
            }
        }
        if (strict) {
            flip.insert(domain);
            result.reassigned_domains[domain] = "news";
        }
    }

    for (auto& s : statements) {
        std::unordered_set<std::string> changed_from;  // per-statement: count each (from,to) once
        for (auto& c : s.citations) {
            if (!flip.count(c.domain)) continue;
            if (c.category.is(CategoryKind::news)) continue;
            changed_from.insert(c.category.name);
            c.category = corpus::news_category();
        }
        for (const auto& from : changed_from) result.changes.record(from, "news");
    }
    return result;
}

struct UrlPatternResult {
    int changed_citations = 0;
    ChangeTable changes;
};

inline bool url_matches_news_pattern(const std::string& url) {
    if (url.find("/news/") != std::string::npos) return true;
    if (url.rfind("http://news.", 0) == 0) return true;
    if (url.rfind("https://news.", 0) == 0) return true;
    return false;
}

// Recategorize web citations whose URL carries a news pattern. Applies to
// web citations only; everything else is untouched.
inline UrlPatternResult apply_url_patterns(std::vector<Statement>& statements) {
    UrlPatternResult result;
    for (auto& s : statements) {
        bool changed = false;
        for (auto& c : s.citations) {
            if (!c.category.is(CategoryKind::web)) continue;
            if (!url_matches_news_pattern(c.url)) continue;
            c.category = corpus::news_category();
            ++result.changed_citations;
            changed = true;
        }
        if (changed) result.changes.record("web", "news");
    }
    return result;
}

struct DropReport {
    int kept = 0;
    int dropped_short = 0;
    int dropped_language = 0;

    nlohmann::json to_json() const {
        return {{"kept", kept}, {"dropped_short", dropped_short}, {"dropped_language", dropped_language}};
    }
};

namespace detail {

inline bool looks_english(const NewsArticle& a, const std::unordered_set<std::string>& stopwords) {
    auto tokens = text::tokenize(a.title + " " + a.body());
    if (tokens.empty()) return false;
    std::size_t hits = 0;
    for (const auto& t : tokens) hits += stopwords.count(t);
    return static_cast<double>(hits) / static_cast<double>(tokens.size()) >= 0.03;
}

}  // namespace detail

// Keeps articles with char_length >= min_chars that are English. English
// means: language tag "en"/"en-*" when present, otherwise a stopword-ratio
// heuristic (>= 3% of tokens are English stopwords). With no stopword list
// available, untagged articles are kept.
inline std::vector<NewsArticle> filter_articles(const std::vector<NewsArticle>& articles, int min_chars,
                                                const std::unordered_set<std::string>& stopwords,
                                                DropReport* report = nullptr) {
    DropReport local;
    DropReport& rep = report ? *report : local;
    std::vector<NewsArticle> kept;
    for (const auto& a : articles) {
        if (a.char_length < static_cast<std::size_t>(min_chars)) {
            ++rep.dropped_short;
            continue;
        }
        bool english = true;
        if (a.language.has_value()) {
            english = (*a.language == "en" || a.language->rfind("en-", 0) == 0);
        } else if (!stopwords.empty()) {
            english = detail::looks_english(a, stopwords);
        }
        if (!english) {
            ++rep.dropped_language;
            continue;
        }
        kept.push_back(a);
        ++rep.kept;
    }
    return kept;
}

// Labels each statement: is_news iff it has at least one news citation after
// curation; label = plurality citation category, news winning ties, other
// ties resolved lexicographically. Zero citations -> label "uncited",
// excluded from SC training.
inline int mark_news_statements(std::vector<Statement>& statements) {
    int uncited = 0;
    for (auto& s : statements) {
        if (s.citations.empty()) {
            s.is_news = false;
            s.label = "uncited";
            ++uncited;
            continue;
        }
        std::map<std::string, int> counts;
        for (const auto& c : s.citations) counts[c.category.name] += 1;
        s.is_news = counts.count("news") > 0;
        int best = 0;
        for (const auto& [cat, n] : counts) best = std::max(best, n);
        if (counts.count("news") && counts.at("news") == best) {
            s.label = "news";
        } else {
            for (const auto& [cat, n] : counts) {  // std::map iterates lexicographically
                if (n == best) {
                    s.label = cat;
                    break;
                }
            }
        }
    }
    return uncited;
}

}  // namespace newscite::curation
