#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/features.hpp"
#include "newscite/jsonl.hpp"
#include "newscite/kneser_ney.hpp"
#include "newscite/lda.hpp"
#include "newscite/taxonomy.hpp"
#include "newscite/text.hpp"

// Statement-categorization features: language style (POS density,
// attribution verbs, quotations, temporal proximity, discourse flags, LM and
// topic scores) and entity-structure news-priors.

namespace newscite::sc {

using corpus::AnnotationLayer;
using corpus::Statement;
using features::NamedFeatures;
using taxonomy::TypeContext;

// ---------------------------------------------------------------------------
// News-prior tables

// Section-filter reading of the ambiguous curation sentence: either both
// rules independently (drop sections under min support, and drop sections
// whose statements all share one category), or only their conjunction.
enum class SectionFilter { both_rules, combined_rule };

struct PriorCell {
    double p = 0.0;
    int support = 0;  // denominator count
};

struct PriorTables {
    double global_news_rate = 0.0;
    int global_support = 0;
    int min_support = 10;
    std::map<std::string, PriorCell> by_section;
    std::map<std::string, PriorCell> by_type;
    std::map<std::string, PriorCell> by_type_section;  // key: t '\x1f' section
    std::map<std::string, PriorCell> by_type_pair;     // key: t' '\x1f' t

    static std::string pair_key(const std::string& a, const std::string& b) { return a + '\x1f' + b; }

    // Lookups fall back along the chain cell -> type prior -> global rate.
    double section_prior(const std::string& section) const {
        auto it = by_section.find(section);
        return it == by_section.end() ? global_news_rate : it->second.p;
    }
    double type_prior(const std::string& t) const {
        auto it = by_type.find(t);
        return it == by_type.end() ? global_news_rate : it->second.p;
    }
    double type_section_prior(const std::string& t, const std::string& section) const {
        auto it = by_type_section.find(pair_key(t, section));
        return it == by_type_section.end() ? type_prior(t) : it->second.p;
    }
    double type_pair_prior(const std::string& t_prime, const std::string& t) const {
        auto it = by_type_pair.find(pair_key(t_prime, t));
        return it == by_type_pair.end() ? type_prior(t) : it->second.p;
    }

    nlohmann::json to_json() const;
    static PriorTables from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& path) const { jsonl::write_json_file(path, to_json()); }
    static PriorTables load(const std::filesystem::path& path) {
        return from_json(jsonl::read_json_file(path));
    }
};

namespace detail {

struct Counter {
    int news = 0;
    int total = 0;
};

inline void store(std::map<std::string, PriorCell>& table, const std::string& key, const Counter& c,
                  int min_support) {
    if (c.total < min_support) return;
    table[key] = PriorCell{static_cast<double>(c.news) / static_cast<double>(c.total), c.total};
}

}  // namespace detail

// Fits all four prior tables over the curated, labeled corpus. Statements
// without citations ("uncited") are skipped. Cells below min_support are
// omitted; lookups then fall back to the parent marginal.
inline PriorTables fit_priors(const std::vector<Statement>& statements, const TypeContext& types,
                              int min_support = 10, SectionFilter filter = SectionFilter::both_rules) {
    PriorTables tables;
    tables.min_support = min_support;

    std::map<std::string, detail::Counter> section_counts;
    std::map<std::string, detail::Counter> type_counts;
    std::map<std::string, detail::Counter> type_section_counts;
    std::map<std::string, detail::Counter> pair_counts;
    std::map<std::string, std::set<std::string>> section_categories;
    detail::Counter global;

    for (const auto& s : statements) {
        if (!s.trainable()) continue;
        const int is_news = s.is_news ? 1 : 0;
        global.total += 1;
        global.news += is_news;

        auto& sec = section_counts[s.section];
        sec.total += 1;
        sec.news += is_news;
        section_categories[s.section].insert(s.label);

        // T(s): types of anchored entities
        std::set<std::string> anchor_types;
        for (const auto& a : s.anchors) {
            if (!types.entity_types.count(a)) continue;
            const auto& ts = types.types_of(a);
            anchor_types.insert(ts.begin(), ts.end());
        }

        for (const auto& t : types.types_of(s.entity_id)) {
            auto& tc = type_counts[t];
            tc.total += 1;
            tc.news += is_news;

            auto& tsc = type_section_counts[PriorTables::pair_key(t, s.section)];
            tsc.total += 1;
            tsc.news += is_news;

            for (const auto& tp : anchor_types) {
                auto& pc = pair_counts[PriorTables::pair_key(tp, t)];
                pc.total += 1;
                pc.news += is_news;
            }
        }
    }

    if (global.total > 0)
        tables.global_news_rate = static_cast<double>(global.news) / static_cast<double>(global.total);
    tables.global_support = global.total;

    auto section_dropped = [&](const std::string& section) {
        const auto& cats = section_categories[section];
        const bool single_category = cats.size() <= 1;
        const bool under_support = section_counts[section].total < min_support;
        if (filter == SectionFilter::both_rules) return under_support || single_category;
        return under_support && single_category;
    };

    for (const auto& [section, c] : section_counts) {
        if (section_dropped(section)) continue;
        detail::store(tables.by_section, section, c, min_support);
    }
    for (const auto& [t, c] : type_counts) detail::store(tables.by_type, t, c, min_support);
    for (const auto& [key, c] : type_section_counts) {
        const auto sep = key.find('\x1f');
        if (section_dropped(key.substr(sep + 1))) continue;
        detail::store(tables.by_type_section, key, c, min_support);
    }
    for (const auto& [key, c] : pair_counts) detail::store(tables.by_type_pair, key, c, min_support);
    return tables;
}

inline nlohmann::json PriorTables::to_json() const {
    auto dump_table = [](const std::map<std::string, PriorCell>& table) {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& [key, cell] : table) j[key] = nlohmann::json::array({cell.p, cell.support});
        return j;
    };
    return nlohmann::json{{"format", "newscite-priors"},
                          {"version", 1},
                          {"global_news_rate", global_news_rate},
                          {"global_support", global_support},
                          {"min_support", min_support},
                          {"by_section", dump_table(by_section)},
                          {"by_type", dump_table(by_type)},
                          {"by_type_section", dump_table(by_type_section)},
                          {"by_type_pair", dump_table(by_type_pair)}};
}

inline PriorTables PriorTables::from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "newscite-priors" || j.value("version", 0) != 1)
        throw Error("not a newscite-priors v1 file");
    PriorTables t;
    t.global_news_rate = j.at("global_news_rate").get<double>();
    t.global_support = j.at("global_support").get<int>();
    t.min_support = j.at("min_support").get<int>();
    auto load_table = [](const nlohmann::json& src, std::map<std::string, PriorCell>& dst) {
        for (const auto& [key, cell] : src.items())
            dst[key] = PriorCell{cell.at(0).get<double>(), cell.at(1).get<int>()};
    };
    load_table(j.at("by_section"), t.by_section);
    load_table(j.at("by_type"), t.by_type);
    load_table(j.at("by_type_section"), t.by_type_section);
    load_table(j.at("by_type_pair"), t.by_type_pair);
    return t;
}

// ---------------------------------------------------------------------------
// Language-style features

// Penn Treebank word tags tracked as density features; other tags only
// contribute to the normalizing total.
inline const std::vector<std::string>& pos_tagset() {
    static const std::vector<std::string> tags = {
        "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN",
        "NNS", "NNP", "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP",
        "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP",
        "WP$", "WRB"};
    return tags;
}

inline std::size_t count_quotation_marks(const std::string& text) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < text.size();) {
        auto [cp, len] = unicode::decode(text, i);
        switch (cp) {
            case U'"': case U'\'': case 0x201C: case 0x201D: case 0x2018: case 0x2019:
                ++count;
                break;
            default:
                break;
        }
        i += len;
    }
    return count;
}

// Temporal proximity: min |snapshot year - extracted year|, or -1 when the
// statement mentions no year.
inline double temporal_proximity(const Statement& s) {
    auto years = text::extract_years(s.text);
    if (years.empty()) return -1.0;
    int best = std::numeric_limits<int>::max();
    for (int y : years) best = std::min(best, std::abs(s.snapshot_year - y));
    return static_cast<double>(best);
}

// POS-dependent features require an annotation layer; without one they are
// emitted as the missing sentinel (with a warning when a sink is given).
inline NamedFeatures language_style_features(const Statement& s, const AnnotationLayer* ann,
                                             const lm::NGramLM* type_lm, const lda::TopicModel* type_topics,
                                             const text::Resources& resources,
                                             std::vector<std::string>* warnings = nullptr) {
    NamedFeatures out;
    const double miss = features::missing_value();

    if (ann == nullptr && warnings)
        warnings->push_back("statement '" + s.id + "': no annotation; POS features missing");

    // POS densities
    std::map<std::string, int> tag_counts;
    int total_tags = 0, verb_tokens = 0, attribution_hits = 0;
    if (ann != nullptr) {
        for (const auto& tok : ann->tokens) {
            tag_counts[tok.pos] += 1;
            ++total_tags;
            if (tok.pos.rfind("VB", 0) == 0) {
                ++verb_tokens;
                if (resources.is_attribution_verb(tok.surface)) ++attribution_hits;
            }
        }
    }
    for (const auto& tag : pos_tagset()) {
        double v = miss;
        if (ann != nullptr) {
            v = total_tags == 0 ? 0.0
                                : static_cast<double>(tag_counts.count(tag) ? tag_counts.at(tag) : 0) /
                                      static_cast<double>(total_tags);
        }
        features::append(out, "ls_pos_" + tag, v);
    }

    double attribution_ratio = miss;
    if (ann != nullptr)
        attribution_ratio =
            verb_tokens == 0 ? 0.0 : static_cast<double>(attribution_hits) / static_cast<double>(verb_tokens);
    features::append(out, "ls_attribution_verb_ratio", attribution_ratio);

    const std::size_t text_len = unicode::length(s.text);
    features::append(out, "ls_quotation_density",
                     text_len == 0 ? 0.0
                                   : static_cast<double>(count_quotation_marks(s.text)) /
                                         static_cast<double>(text_len));

    features::append(out, "ls_temporal_proximity", temporal_proximity(s));

    const auto tokens = text::tokenize(s.text);
    const auto flags = text::discourse_flags(tokens, resources);
    features::append(out, "ls_discourse_temporal", flags.temporal ? 1.0 : 0.0);
    features::append(out, "ls_discourse_contingency", flags.contingency ? 1.0 : 0.0);
    features::append(out, "ls_discourse_comparison", flags.comparison ? 1.0 : 0.0);
    features::append(out, "ls_discourse_expansion", flags.expansion ? 1.0 : 0.0);

    features::append(out, "ls_lm_score",
                     (type_lm != nullptr && !tokens.empty()) ? type_lm->score(tokens) : miss);
    features::append(out, "ls_topic_score",
                     type_topics != nullptr ? lda::topic_score(*type_topics, tokens) : miss);
    return out;
}

// ---------------------------------------------------------------------------
// Entity-structure features

namespace detail {

inline void append_aggregates(NamedFeatures& out, const std::string& stem,
                              const std::vector<double>& values, double fallback) {
    if (values.empty()) {
        features::append(out, stem + "_min", fallback);
        features::append(out, stem + "_max", fallback);
        features::append(out, stem + "_avg", fallback);
        return;
    }
    double mn = values[0], mx = values[0], sum = 0.0;
    for (double v : values) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        sum += v;
    }
    features::append(out, stem + "_min", mn);
    features::append(out, stem + "_max", mx);
    features::append(out, stem + "_avg", sum / static_cast<double>(values.size()));
}

}  // namespace detail

inline NamedFeatures entity_structure_features(const Statement& s, const TypeContext& types,
                                               const PriorTables& priors) {
    NamedFeatures out;
    features::append(out, "es_section_prior", priors.section_prior(s.section));

    const auto& entity_types = types.types_of(s.entity_id);

    std::vector<double> type_priors, type_section_priors, pair_priors;
    for (const auto& t : entity_types) {
        type_priors.push_back(priors.type_prior(t));
        type_section_priors.push_back(priors.type_section_prior(t, s.section));
    }
    std::set<std::string> anchor_types;
    for (const auto& a : s.anchors) {
        if (!types.entity_types.count(a)) continue;
        const auto& ts = types.types_of(a);
        anchor_types.insert(ts.begin(), ts.end());
    }
    for (const auto& t : entity_types)
        for (const auto& tp : anchor_types) pair_priors.push_back(priors.type_pair_prior(tp, t));

    detail::append_aggregates(out, "es_type_prior", type_priors, priors.global_news_rate);
    detail::append_aggregates(out, "es_type_section_prior", type_section_priors, priors.global_news_rate);
    detail::append_aggregates(out, "es_type_pair_prior", pair_priors, priors.global_news_rate);
    return out;
}

}  // namespace newscite::sc
