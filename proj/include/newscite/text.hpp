#pragma once

#include <algorithm>
#include <regex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/resources.hpp"
#include "newscite/unicode.hpp"

// Shared text machinery: tokenizer, overlap and similarity measures,
// temporal-expression extraction and discourse-connective matching.

namespace newscite::text {

// Lowercased word tokens: maximal runs of word code points. Punctuation is
// dropped; digit runs survive as tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t i = 0; i < text.size();) {
        auto [cp, len] = unicode::decode(text, i);
        if (unicode::is_word_char(cp)) {
            unicode::append(current, unicode::to_lower(cp));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
        i += len;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

using TokenSet = std::unordered_set<std::string>;

inline TokenSet token_set(const std::vector<std::string>& tokens) {
    return TokenSet(tokens.begin(), tokens.end());
}

inline TokenSet token_set(std::string_view raw_text) { return token_set(tokenize(raw_text)); }

// |a ∩ b| / |a ∪ b|; 0 when both sides are empty.
inline double jaccard(const TokenSet& a, const TokenSet& b) {
    if (a.empty() && b.empty()) return 0.0;
    const TokenSet& small = a.size() <= b.size() ? a : b;
    const TokenSet& large = a.size() <= b.size() ? b : a;
    std::size_t inter = 0;
    for (const auto& t : small) inter += large.count(t);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

namespace detail {

inline TokenSet ngram_set(const std::vector<std::string>& tokens, int n) {
    TokenSet out;
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return out;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string g = tokens[i];
        for (int k = 1; k < n; ++k) {
            g += '\x1f';
            g += tokens[i + k];
        }
        out.insert(std::move(g));
    }
    return out;
}

}  // namespace detail

// Jaccard over the n-gram sets of the two token sequences.
inline double ngram_overlap(const std::vector<std::string>& a, const std::vector<std::string>& b, int n) {
    return jaccard(detail::ngram_set(a, n), detail::ngram_set(b, n));
}

// Jaccard over maximal runs of NNP/NNPS-tagged tokens (lowercased, joined).
// Call sites must hold actual annotations; a null layer is an error.
inline double nnp_phrase_overlap(const corpus::AnnotationLayer* a, const corpus::AnnotationLayer* b) {
    if (a == nullptr || b == nullptr)
        throw Error("nnp_phrase_overlap requires annotation layers for both sides");
    auto phrases = [](const corpus::AnnotationLayer& layer) {
        TokenSet out;
        std::string current;
        for (const auto& tok : layer.tokens) {
            if (tok.pos == "NNP" || tok.pos == "NNPS") {
                if (!current.empty()) current += ' ';
                current += unicode::lower(tok.surface);
            } else if (!current.empty()) {
                out.insert(std::move(current));
                current.clear();
            }
        }
        if (!current.empty()) out.insert(std::move(current));
        return out;
    };
    return jaccard(phrases(*a), phrases(*b));
}

// ---------------------------------------------------------------------------
// Temporal expressions

namespace detail {

struct YearHit {
    std::size_t pos;
    int year;
};

inline int resolve_two_digit_year(int yy) { return yy > 30 ? 1900 + yy : 2000 + yy; }

inline void scan_rule(std::string& masked, const std::regex& re, int year_group, bool two_digit,
                      std::vector<YearHit>& hits) {
    auto begin = std::sregex_iterator(masked.begin(), masked.end(), re);
    std::vector<std::tuple<std::size_t, std::size_t, int>> found;  // pos, len, year
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        const std::smatch& m = *it;
        int year = std::stoi(m[year_group].str());
        if (two_digit) year = resolve_two_digit_year(year);
        found.emplace_back(static_cast<std::size_t>(m.position(0)), static_cast<std::size_t>(m.length(0)), year);
    }
    for (const auto& [pos, len, year] : found) {
        if (year >= 1900 && year <= 2100) hits.push_back({pos, year});
        masked.replace(pos, len, len, '\x01');  // consume even out-of-range matches
    }
}

}  // namespace detail

// Years from date expressions, applying the four rules in order on a masked
// copy so that a consumed match cannot yield a second year. Two-digit years
// pivot at 30 (>30 -> 19xx, else 20xx). Output ordered by text position.
inline std::vector<int> extract_years(const std::string& text) {
    static const std::string kMonth =
        "(?:jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|jun(?:e)?|jul(?:y)?|aug(?:ust)?|"
        "sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)";
    static const std::regex re_day_month_year("\\b(\\d{1,2})[ .\\-]+" + kMonth + "[ .\\-]+(\\d{4})\\b",
                                              std::regex::icase);
    static const std::regex re_dd_mm_yyyy("\\b(\\d{1,2})[ .\\-]+(\\d{1,2})[ .\\-]+(\\d{4})\\b");
    static const std::regex re_mm_dd_yy("\\b(\\d{1,2})[ .\\-]+(\\d{1,2})[ .\\-]+(\\d{2})(?!\\d)");
    static const std::regex re_yyyy("\\b(\\d{4})\\b");

    std::string masked = text;
    std::vector<detail::YearHit> hits;
    detail::scan_rule(masked, re_day_month_year, 2, false, hits);
    detail::scan_rule(masked, re_dd_mm_yyyy, 3, false, hits);
    detail::scan_rule(masked, re_mm_dd_yy, 3, true, hits);
    detail::scan_rule(masked, re_yyyy, 1, false, hits);

    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.pos < b.pos; });
    std::vector<int> years;
    years.reserve(hits.size());
    for (const auto& h : hits) years.push_back(h.year);
    return years;
}

// ---------------------------------------------------------------------------
// Discourse connectives

struct DiscourseFlags {
    bool temporal = false;
    bool contingency = false;
    bool comparison = false;
    bool expansion = false;

    bool any() const { return temporal || contingency || comparison || expansion; }
};

// Boolean presence per category; multiword connectives must occur as a
// consecutive token run.
inline DiscourseFlags discourse_flags(const std::vector<std::string>& tokens, const Resources& resources) {
    DiscourseFlags flags;
    auto set_flag = [&](DiscourseCategory c) {
        switch (c) {
            case DiscourseCategory::temporal: flags.temporal = true; break;
            case DiscourseCategory::contingency: flags.contingency = true; break;
            case DiscourseCategory::comparison: flags.comparison = true; break;
            case DiscourseCategory::expansion: flags.expansion = true; break;
        }
    };
    for (const auto& conn : resources.connectives) {
        const auto& needle = conn.tokens;
        if (needle.size() > tokens.size()) continue;
        for (std::size_t i = 0; i + needle.size() <= tokens.size(); ++i) {
            bool match = true;
            for (std::size_t k = 0; k < needle.size(); ++k) {
                if (tokens[i + k] != needle[k]) {
                    match = false;
                    break;
                }
            }
            if (match) {
                set_flag(conn.category);
                break;
            }
        }
    }
    return flags;
}

}  // namespace newscite::text
