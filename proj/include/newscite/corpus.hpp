#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "newscite/error.hpp"
#include "newscite/jsonl.hpp"
#include "newscite/unicode.hpp"

// Canonical data model: statements, citations, entities, news articles and
// standoff linguistic annotations, plus the JSONL loaders for each. Field
// schemas are documented in docs/formats.md.

namespace newscite::corpus {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Citation categories

enum class CategoryKind {
    web,
    news,
    book,
    journal,
    map,
    comic,
    court,
    press_release,
    other,
};

struct CitationCategory {
    CategoryKind kind = CategoryKind::other;
    std::string name;  // canonical token, or the raw name for `other`

    bool operator==(const CitationCategory& rhs) const { return name == rhs.name; }
    bool is(CategoryKind k) const { return kind == k; }
};

inline CitationCategory parse_category(const std::string& raw) {
    std::string s = unicode::lower(raw);
    // "books" and "book" are the same category in the wild.
    if (s == "web") return {CategoryKind::web, "web"};
    if (s == "news") return {CategoryKind::news, "news"};
    if (s == "book" || s == "books") return {CategoryKind::book, "book"};
    if (s == "journal") return {CategoryKind::journal, "journal"};
    if (s == "map") return {CategoryKind::map, "map"};
    if (s == "comic") return {CategoryKind::comic, "comic"};
    if (s == "court") return {CategoryKind::court, "court"};
    if (s == "press release" || s == "press_release") return {CategoryKind::press_release, "press_release"};
    return {CategoryKind::other, s};
}

inline CitationCategory news_category() { return {CategoryKind::news, "news"}; }

// ---------------------------------------------------------------------------
// Core records

// Registrable-ish domain: URL host with a leading "www." stripped. No public
// suffix list; this matches the coarse per-outlet grouping the corpus uses.
inline std::string domain_from_url(const std::string& url) {
    std::size_t start = 0;
    auto scheme = url.find("://");
    if (scheme != std::string::npos) start = scheme + 3;
    auto end = url.find_first_of("/?#", start);
    std::string host = url.substr(start, end == std::string::npos ? std::string::npos : end - start);
    auto at = host.rfind('@');
    if (at != std::string::npos) host = host.substr(at + 1);
    auto colon = host.find(':');
    if (colon != std::string::npos) host = host.substr(0, colon);
    host = unicode::lower(host);
    if (host.rfind("www.", 0) == 0) host = host.substr(4);
    return host;
}

struct Citation {
    std::string url;
    std::string domain;  // derived from url when absent in the input
    CitationCategory category;
    bool resolvable = true;
};

struct Statement {
    std::string id;
    std::string entity_id;
    std::string section;
    std::string text;
    std::vector<std::string> anchors;  // linked entity ids, distinct
    std::vector<Citation> citations;
    int snapshot_year = 0;

    // Set by curation::mark_news_statements.
    bool is_news = false;
    std::string label;  // plurality citation category; "uncited" when empty

    bool trainable() const { return !label.empty() && label != "uncited"; }
};

struct Entity {
    std::string id;
    std::string title;
    std::vector<std::string> type_ids;
    std::vector<std::string> section_names;
    std::vector<std::string> aliases;
};

struct SentenceSpan {
    std::size_t begin = 0;  // byte offsets into the article body
    std::size_t end = 0;
};

struct NewsArticle {
    std::string id;
    std::string url;
    std::string domain;
    std::string title;
    std::vector<std::string> paragraphs;
    std::vector<SentenceSpan> sentences;
    std::optional<std::string> publish_date;
    std::optional<std::string> language;
    std::size_t char_length = 0;  // code points over concatenated paragraphs

    // Paragraphs joined by blank lines; sentence spans index into this.
    std::string body() const {
        std::string out;
        for (std::size_t i = 0; i < paragraphs.size(); ++i) {
            if (i) out += "\n\n";
            out += paragraphs[i];
        }
        return out;
    }

    std::string sentence_text(std::size_t i) const {
        const auto& sp = sentences.at(i);
        return body().substr(sp.begin, sp.end - sp.begin);
    }
};

struct AnnotationLayer {
    struct Token {
        std::string surface;
        std::string pos;
    };
    struct Dependency {
        int head = -1;  // -1 marks the root
        int dependent = 0;
        std::string relation;
    };

    std::string unit_id;  // statement id or "<article_id>:s<j>" sentence id
    std::vector<Token> tokens;
    std::vector<Dependency> dependencies;
    std::string provenance;
};

// ---------------------------------------------------------------------------
// Sentence segmentation

// Default abbreviation guard: a period ending one of these does not close a
// sentence. Callers may supply their own list.
inline const std::set<std::string>& default_abbreviations() {
    static const std::set<std::string> abbrevs = {
        "Mr.", "Mrs.", "Ms.", "Dr.", "Prof.", "St.", "Jr.", "Sr.", "Rev.", "Gen.",
        "Sen.", "Rep.", "Gov.", "Capt.", "Col.", "Sgt.", "Lt.", "vs.", "etc.", "e.g.",
        "i.e.", "cf.", "al.", "Inc.", "Ltd.", "Co.", "Corp.", "U.S.", "U.K.", "No.",
        "Jan.", "Feb.", "Mar.", "Apr.", "Jun.", "Jul.", "Aug.", "Sep.", "Sept.",
        "Oct.", "Nov.", "Dec.",
    };
    return abbrevs;
}

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Word ending at text[pos] inclusive, scanning back over letters and dots.
inline std::string word_ending_at(const std::string& text, std::size_t pos) {
    std::size_t start = pos;
    while (start > 0) {
        char c = text[start - 1];
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '.') {
            --start;
        } else {
            break;
        }
    }
    return text.substr(start, pos - start + 1);
}

}  // namespace detail

// Rule-based fallback segmentation: a boundary is [.?!]+ followed by
// whitespace and a capital letter, unless the period closes a guarded
// abbreviation. Spans cover all non-whitespace text; deterministic.
inline std::vector<SentenceSpan> segment_sentences(
    const std::string& text, const std::set<std::string>& abbreviations = default_abbreviations()) {
    std::vector<SentenceSpan> spans;
    auto flush = [&](std::size_t from, std::size_t to) {
        while (from < to && detail::is_space(text[from])) ++from;
        while (to > from && detail::is_space(text[to - 1])) --to;
        if (from < to) spans.push_back({from, to});
    };

    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c != '.' && c != '?' && c != '!') continue;
        std::size_t punct_end = i;
        while (punct_end + 1 < text.size() &&
               (text[punct_end + 1] == '.' || text[punct_end + 1] == '?' || text[punct_end + 1] == '!')) {
            ++punct_end;
        }
        if (c == '.' && punct_end == i) {
            std::string word = detail::word_ending_at(text, i);
            if (abbreviations.count(word)) continue;
        }
        std::size_t j = punct_end + 1;
        if (j >= text.size()) continue;  // final span flushed below
        if (!detail::is_space(text[j])) { i = punct_end; continue; }
        while (j < text.size() && detail::is_space(text[j])) ++j;
        if (j < text.size() && text[j] >= 'A' && text[j] <= 'Z') {
            flush(start, punct_end + 1);
            start = j;
            i = j - 1;
        } else {
            i = punct_end;
        }
    }
    flush(start, text.size());
    if (spans.empty() && !text.empty()) {
        // all-whitespace input yields nothing; otherwise keep one span
        std::size_t from = text.find_first_not_of(" \t\r\n\f\v");
        if (from != std::string::npos) {
            std::size_t to = text.find_last_not_of(" \t\r\n\f\v") + 1;
            spans.push_back({from, to});
        }
    }
    return spans;
}

// ---------------------------------------------------------------------------
// Loaders / serializers

namespace detail {

inline std::vector<std::string> string_list(const json& j, const char* key) {
    std::vector<std::string> out;
    if (auto it = j.find(key); it != j.end()) {
        for (const auto& v : *it) out.push_back(v.get<std::string>());
    }
    return out;
}

inline Citation parse_citation(const json& j) {
    Citation c;
    c.url = j.value("url", "");
    c.domain = j.value("domain", "");
    if (c.domain.empty()) c.domain = domain_from_url(c.url);
    c.category = parse_category(j.value("category", "other"));
    c.resolvable = j.value("resolvable", true);
    return c;
}

inline json citation_to_json(const Citation& c) {
    return json{{"url", c.url}, {"domain", c.domain}, {"category", c.category.name},
                {"resolvable", c.resolvable}};
}

}  // namespace detail

inline std::vector<Statement> load_statements(const std::filesystem::path& path) {
    std::vector<Statement> out;
    std::unordered_set<std::string> seen;
    jsonl::for_each(path, [&](std::size_t line_no, const json& j) {
        try {
            Statement s;
            s.id = j.at("id").get<std::string>();
            s.entity_id = j.value("entity_id", "");
            s.section = j.value("section", "");
            s.text = j.at("text").get<std::string>();
            s.anchors = detail::string_list(j, "anchors");
            s.snapshot_year = j.value("snapshot_year", 2015);
            if (auto it = j.find("citations"); it != j.end()) {
                for (const auto& cj : *it) s.citations.push_back(detail::parse_citation(cj));
            }
            s.is_news = j.value("is_news", false);
            s.label = j.value("label", "");

            if (s.text.empty()) throw Error("empty text");
            if (s.snapshot_year < 1990 || s.snapshot_year > 2100)
                throw Error("snapshot_year out of range [1990, 2100]");
            // keep anchors distinct, preserving order
            std::unordered_set<std::string> anchor_seen;
            std::vector<std::string> anchors;
            for (auto& a : s.anchors)
                if (anchor_seen.insert(a).second) anchors.push_back(a);
            s.anchors = std::move(anchors);

            if (!seen.insert(s.id).second) throw Error("duplicate statement id '" + s.id + "'");
            out.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw Error(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    });
    return out;
}

inline json statement_to_json(const Statement& s) {
    json cits = json::array();
    for (const auto& c : s.citations) cits.push_back(detail::citation_to_json(c));
    json j{{"id", s.id},         {"entity_id", s.entity_id}, {"section", s.section},
           {"text", s.text},     {"anchors", s.anchors},     {"citations", cits},
           {"snapshot_year", s.snapshot_year}};
    if (!s.label.empty()) {
        j["is_news"] = s.is_news;
        j["label"] = s.label;
    }
    return j;
}

inline void save_statements(const std::filesystem::path& path, const std::vector<Statement>& statements) {
    jsonl::Writer w(path);
    for (const auto& s : statements) w.write(statement_to_json(s));
}

inline std::vector<std::string> split_paragraphs(const std::string& body) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t brk = body.find("\n\n", pos);
        std::string para = body.substr(pos, brk == std::string::npos ? std::string::npos : brk - pos);
        // trim stray newlines/space around the paragraph
        std::size_t a = para.find_first_not_of(" \t\r\n");
        if (a != std::string::npos) {
            std::size_t b = para.find_last_not_of(" \t\r\n") + 1;
            out.push_back(para.substr(a, b - a));
        }
        if (brk == std::string::npos) break;
        pos = brk + 2;
    }
    return out;
}

// Fallback segmentation over the article body; used when the input record
// carries no sentence spans.
inline void segment_article(NewsArticle& a) {
    a.sentences.clear();
    std::size_t offset = 0;
    for (std::size_t p = 0; p < a.paragraphs.size(); ++p) {
        for (const auto& sp : segment_sentences(a.paragraphs[p])) {
            a.sentences.push_back({offset + sp.begin, offset + sp.end});
        }
        offset += a.paragraphs[p].size() + 2;  // "\n\n" joiner
    }
}

inline std::vector<NewsArticle> load_articles(const std::filesystem::path& path) {
    std::vector<NewsArticle> out;
    std::unordered_set<std::string> seen;
    jsonl::for_each(path, [&](std::size_t line_no, const json& j) {
        try {
            NewsArticle a;
            a.id = j.at("id").get<std::string>();
            a.url = j.value("url", "");
            a.domain = j.value("domain", "");
            if (a.domain.empty()) a.domain = domain_from_url(a.url);
            a.title = j.value("title", "");
            a.paragraphs = detail::string_list(j, "paragraphs");
            if (a.paragraphs.empty()) {
                std::string body = j.value("body", "");
                if (body.empty())
                    throw Error("article '" + a.id + "' has neither paragraphs nor body");
                a.paragraphs = split_paragraphs(body);
                if (a.paragraphs.empty())
                    throw Error("article '" + a.id + "' has neither paragraphs nor body");
            }
            if (auto it = j.find("publish_date"); it != j.end() && !it->is_null())
                a.publish_date = it->get<std::string>();
            if (auto it = j.find("language"); it != j.end() && !it->is_null())
                a.language = it->get<std::string>();

            a.char_length = 0;
            for (const auto& p : a.paragraphs) a.char_length += unicode::length(p);

            if (auto it = j.find("sentences"); it != j.end() && it->is_array() && !it->empty()) {
                for (const auto& sj : *it)
                    a.sentences.push_back({sj.at("begin").get<std::size_t>(), sj.at("end").get<std::size_t>()});
            } else {
                segment_article(a);
            }
            if (!seen.insert(a.id).second) throw Error("duplicate article id '" + a.id + "'");
            out.push_back(std::move(a));
        } catch (const json::exception& e) {
            throw Error(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    });
    return out;
}

inline json article_to_json(const NewsArticle& a) {
    json sents = json::array();
    for (const auto& sp : a.sentences) sents.push_back(json{{"begin", sp.begin}, {"end", sp.end}});
    json j{{"id", a.id},   {"url", a.url},           {"domain", a.domain},
           {"title", a.title}, {"paragraphs", a.paragraphs}, {"sentences", sents}};
    if (a.publish_date) j["publish_date"] = *a.publish_date;
    if (a.language) j["language"] = *a.language;
    return j;
}

inline void save_articles(const std::filesystem::path& path, const std::vector<NewsArticle>& articles) {
    jsonl::Writer w(path);
    for (const auto& a : articles) w.write(article_to_json(a));
}

inline std::vector<Entity> load_entities(const std::filesystem::path& path) {
    std::vector<Entity> out;
    std::unordered_set<std::string> seen;
    jsonl::for_each(path, [&](std::size_t line_no, const json& j) {
        try {
            Entity e;
            e.id = j.at("id").get<std::string>();
            e.title = j.value("title", e.id);
            e.type_ids = detail::string_list(j, "type_ids");
            e.section_names = detail::string_list(j, "section_names");
            e.aliases = detail::string_list(j, "aliases");
            if (e.type_ids.empty()) e.type_ids.push_back("owl:Thing");
            if (!seen.insert(e.id).second) throw Error("duplicate entity id '" + e.id + "'");
            out.push_back(std::move(e));
        } catch (const json::exception& e) {
            throw Error(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    });
    return out;
}

inline std::vector<AnnotationLayer> load_annotations(const std::filesystem::path& path) {
    std::vector<AnnotationLayer> out;
    jsonl::for_each(path, [&](std::size_t line_no, const json& j) {
        try {
            AnnotationLayer layer;
            layer.unit_id = j.at("unit_id").get<std::string>();
            layer.provenance = j.value("provenance", "");
            for (const auto& tj : j.at("tokens"))
                layer.tokens.push_back({tj.at(0).get<std::string>(), tj.at(1).get<std::string>()});
            if (auto it = j.find("dependencies"); it != j.end()) {
                for (const auto& dj : *it) {
                    layer.dependencies.push_back({dj.at(0).get<int>(), dj.at(1).get<int>(),
                                                  dj.at(2).get<std::string>()});
                }
            }
            const int n = static_cast<int>(layer.tokens.size());
            int roots = 0;
            for (const auto& d : layer.dependencies) {
                if (d.head == -1) ++roots;
                if (d.head < -1 || d.head >= n || d.dependent < 0 || d.dependent >= n)
                    throw Error("dependency index out of token range in '" + layer.unit_id + "'");
            }
            if (!layer.dependencies.empty() && roots != 1)
                throw Error("annotation '" + layer.unit_id + "' must have exactly one root");
            out.push_back(std::move(layer));
        } catch (const json::exception& e) {
            throw Error(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
        }
    });
    return out;
}

}  // namespace newscite::corpus
