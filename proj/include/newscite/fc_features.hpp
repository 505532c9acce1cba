#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/features.hpp"
#include "newscite/jsonl.hpp"
#include "newscite/kneser_ney.hpp"
#include "newscite/lda.hpp"
#include "newscite/taxonomy.hpp"
#include "newscite/text.hpp"
#include "newscite/textrank.hpp"
#include "newscite/tree_kernel.hpp"

// Citation-discovery features for a (statement, candidate article) pair:
// entailment similarity per sentence with five aggregations, centrality
// (TextRank central sentence, relative entity frequency) and news-domain
// authority, plus the IR baseline score and rank.

namespace newscite::fc {

using corpus::AnnotationLayer;
using corpus::Entity;
using corpus::NewsArticle;
using corpus::Statement;
using features::NamedFeatures;
using taxonomy::TypeContext;

// ---------------------------------------------------------------------------
// News-domain authority

struct AuthorityTables {
    std::map<std::string, double> type_domain;     // key: t '\x1f' domain
    std::map<std::string, double> section_domain;  // key: section '\x1f' domain
    std::map<std::string, int> type_support;       // news-citation totals per t
    std::map<std::string, int> section_support;

    static std::string key(const std::string& a, const std::string& b) { return a + '\x1f' + b; }

    double type_domain_authority(const std::string& t, const std::string& domain) const {
        auto it = type_domain.find(key(t, domain));
        return it == type_domain.end() ? 0.0 : it->second;
    }
    double section_domain_authority(const std::string& section, const std::string& domain) const {
        auto it = section_domain.find(key(section, domain));
        return it == section_domain.end() ? 0.0 : it->second;
    }

    nlohmann::json to_json() const {
        auto dump = [](const auto& m) {
            nlohmann::json j = nlohmann::json::object();
            for (const auto& [k, v] : m) j[k] = v;
            return j;
        };
        return nlohmann::json{{"format", "newscite-authority"},
                              {"version", 1},
                              {"type_domain", dump(type_domain)},
                              {"section_domain", dump(section_domain)},
                              {"type_support", dump(type_support)},
                              {"section_support", dump(section_support)}};
    }
    static AuthorityTables from_json(const nlohmann::json& j) {
        if (j.value("format", "") != "newscite-authority" || j.value("version", 0) != 1)
            throw Error("not a newscite-authority v1 file");
        AuthorityTables t;
        for (const auto& [k, v] : j.at("type_domain").items()) t.type_domain[k] = v.get<double>();
        for (const auto& [k, v] : j.at("section_domain").items()) t.section_domain[k] = v.get<double>();
        for (const auto& [k, v] : j.at("type_support").items()) t.type_support[k] = v.get<int>();
        for (const auto& [k, v] : j.at("section_support").items()) t.section_support[k] = v.get<int>();
        return t;
    }
    void save(const std::filesystem::path& path) const { jsonl::write_json_file(path, to_json()); }
    static AuthorityTables load(const std::filesystem::path& path) {
        return from_json(jsonl::read_json_file(path));
    }
};

// p(D | t): news citations to domain D from statements of entities of type
// t, over all news citations from those statements; p(D | section) likewise
// over sections. Rows sum to one for every supported key.
inline AuthorityTables fit_authority(const std::vector<Statement>& statements, const TypeContext& types) {
    AuthorityTables tables;
    std::map<std::string, int> joint_type, joint_section;
    for (const auto& s : statements) {
        for (const auto& c : s.citations) {
            if (!c.category.is(corpus::CategoryKind::news) || c.domain.empty()) continue;
            for (const auto& t : types.types_of(s.entity_id)) {
                joint_type[AuthorityTables::key(t, c.domain)] += 1;
                tables.type_support[t] += 1;
            }
            joint_section[AuthorityTables::key(s.section, c.domain)] += 1;
            tables.section_support[s.section] += 1;
        }
    }
    for (const auto& [k, n] : joint_type) {
        const std::string t = k.substr(0, k.find('\x1f'));
        tables.type_domain[k] = static_cast<double>(n) / static_cast<double>(tables.type_support.at(t));
    }
    for (const auto& [k, n] : joint_section) {
        const std::string sec = k.substr(0, k.find('\x1f'));
        tables.section_domain[k] =
            static_cast<double>(n) / static_cast<double>(tables.section_support.at(sec));
    }
    return tables;
}

// ---------------------------------------------------------------------------
// Entity mentions and relative entity frequency (position-decayed)

namespace detail {

inline bool boundary_ok(const std::string& text, std::size_t pos, std::size_t len) {
    auto alnum = [](char ch) {
        return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z');
    };
    if (pos > 0 && alnum(text[pos - 1])) return false;
    if (pos + len < text.size() && alnum(text[pos + len])) return false;
    return true;
}

}  // namespace detail

// Non-overlapping case-insensitive whole-word occurrences of the entity's
// title or aliases. Longer patterns are matched (and consumed) first so an
// alias inside the title is not double counted.
inline int count_mentions(const std::string& raw_text, const Entity& e) {
    std::string haystack = unicode::lower(raw_text);
    std::vector<std::string> patterns;
    patterns.push_back(unicode::lower(e.title));
    for (const auto& a : e.aliases) patterns.push_back(unicode::lower(a));
    std::sort(patterns.begin(), patterns.end(),
              [](const std::string& a, const std::string& b) { return a.size() > b.size(); });
    patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());

    int count = 0;
    for (const auto& pat : patterns) {
        if (pat.empty()) continue;
        std::size_t pos = 0;
        while ((pos = haystack.find(pat, pos)) != std::string::npos) {
            if (detail::boundary_ok(haystack, pos, pat.size())) {
                ++count;
                haystack.replace(pos, pat.size(), pat.size(), '\x01');
                pos += pat.size();
            } else {
                ++pos;
            }
        }
    }
    return count;
}

struct ParagraphMentionTable {
    std::vector<std::map<std::string, int>> tf;  // per paragraph: entity id -> mentions (nonzero)
    std::vector<long> totals;                    // per paragraph: mentions over all entities
};

inline ParagraphMentionTable count_paragraph_mentions(const NewsArticle& n,
                                                      const std::vector<Entity>& catalog) {
    ParagraphMentionTable table;
    table.tf.resize(n.paragraphs.size());
    table.totals.assign(n.paragraphs.size(), 0);
    for (std::size_t j = 0; j < n.paragraphs.size(); ++j) {
        for (const auto& e : catalog) {
            const int c = count_mentions(n.paragraphs[j], e);
            if (c > 0) {
                table.tf[j][e.id] = c;
                table.totals[j] += c;
            }
        }
    }
    return table;
}

// phi(e, n) = (|rho(e,n)| / |rho(n)|) * sum_j (tf(e, rho_j) / sum_{e' != e}
// tf(e', rho_j))^(1/j), 1-based paragraph index j. A paragraph where e is
// the only mentioned entity uses denominator 1; paragraphs without e
// contribute nothing.
inline double relative_entity_frequency(const std::string& entity_id, const ParagraphMentionTable& table) {
    const std::size_t paragraphs = table.tf.size();
    if (paragraphs == 0) throw Error("relative entity frequency needs at least one paragraph");
    std::size_t containing = 0;
    double sum = 0.0;
    for (std::size_t j = 0; j < paragraphs; ++j) {
        auto it = table.tf[j].find(entity_id);
        if (it == table.tf[j].end() || it->second == 0) continue;
        ++containing;
        const long others = table.totals[j] - it->second;
        const double denom = others > 0 ? static_cast<double>(others) : 1.0;
        sum += std::pow(static_cast<double>(it->second) / denom, 1.0 / static_cast<double>(j + 1));
    }
    return (static_cast<double>(containing) / static_cast<double>(paragraphs)) * sum;
}

inline double relative_entity_frequency(const Entity& e, const NewsArticle& n,
                                        const std::vector<Entity>& catalog) {
    if (n.paragraphs.empty()) throw Error("article '" + n.id + "' has no paragraphs");
    return relative_entity_frequency(e.id, count_paragraph_mentions(n, catalog));
}

// ---------------------------------------------------------------------------
// Pair features

// Sentence annotation unit ids follow "<article_id>:s<j>" with 1-based j.
inline std::string sentence_unit_id(const std::string& article_id, std::size_t index) {
    return article_id + ":s" + std::to_string(index + 1);
}

// Everything derivable from the article alone, computed once and shared
// across all statements pairing with it.
struct ArticleView {
    const NewsArticle* article = nullptr;
    std::vector<std::vector<std::string>> sentence_tokens;
    std::vector<text::TokenSet> sentence_sets;
    std::vector<std::optional<kernel::DependencyTree>> sentence_trees;
    std::size_t central_sentence = 0;
    text::TokenSet title_set;
    std::vector<std::string> body_tokens;
    lm::NGramLM unigram_lm;
    ParagraphMentionTable mentions;
    int title_body_tokens = 0;

    static ArticleView build(const NewsArticle& article, const std::vector<Entity>& catalog,
                             const std::unordered_map<std::string, AnnotationLayer>* annotations) {
        ArticleView view;
        view.article = &article;
        const std::string body = article.body();
        for (std::size_t i = 0; i < article.sentences.size(); ++i) {
            const auto& sp = article.sentences[i];
            view.sentence_tokens.push_back(
                text::tokenize(std::string_view(body).substr(sp.begin, sp.end - sp.begin)));
            view.sentence_sets.push_back(text::token_set(view.sentence_tokens.back()));
            std::optional<kernel::DependencyTree> tree;
            if (annotations) {
                auto it = annotations->find(sentence_unit_id(article.id, i));
                if (it != annotations->end()) tree = kernel::DependencyTree::from_annotation(it->second);
            }
            view.sentence_trees.push_back(std::move(tree));
        }
        view.central_sentence = textrank::textrank_centrality(view.sentence_tokens).central_index;
        view.title_set = text::token_set(article.title);
        view.body_tokens = text::tokenize(body);
        std::vector<std::string> all_tokens = text::tokenize(article.title + " " + body);
        view.title_body_tokens = static_cast<int>(all_tokens.size());
        if (!all_tokens.empty()) view.unigram_lm = lm::NGramLM::train({all_tokens}, 1);
        view.mentions = count_paragraph_mentions(article, catalog);
        return view;
    }
};

struct PairContext {
    const text::Resources* resources = nullptr;
    const TypeContext* types = nullptr;
    std::string model_type = taxonomy::kRootType;  // t behind N_t and the authority lookup
    const lm::NGramLM* type_lm = nullptr;          // n-gram LM over N_t
    const lda::TopicModel* type_topics = nullptr;  // topics over N_t
    const AuthorityTables* authority = nullptr;
    const std::vector<Entity>* catalog = nullptr;  // entity catalog for mentions
    const std::unordered_map<std::string, AnnotationLayer>* annotations = nullptr;
};

namespace detail {

// min, max, avg, sum_j (1/j) F_j and sum_j F_j^(1/j); all aggregates are the
// missing sentinel when the family could not be computed.
inline void append_sentence_aggregates(NamedFeatures& out, const std::string& stem,
                                       const std::vector<double>& values, bool available) {
    const double miss = features::missing_value();
    if (!available || values.empty()) {
        for (const char* suffix : {"_min", "_max", "_avg", "_wavg", "_decay"})
            features::append(out, stem + suffix, values.empty() && available ? 0.0 : miss);
        return;
    }
    double mn = values[0], mx = values[0], sum = 0.0, weighted = 0.0, decayed = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        const double v = values[j];
        mn = std::min(mn, v);
        mx = std::max(mx, v);
        sum += v;
        weighted += v / static_cast<double>(j + 1);
        decayed += v > 0.0 ? std::pow(v, 1.0 / static_cast<double>(j + 1)) : 0.0;
    }
    features::append(out, stem + "_min", mn);
    features::append(out, stem + "_max", mx);
    features::append(out, stem + "_avg", sum / static_cast<double>(values.size()));
    features::append(out, stem + "_wavg", weighted);
    features::append(out, stem + "_decay", decayed);
}

}  // namespace detail

inline NamedFeatures pair_features(const Statement& s, const ArticleView& view, const PairContext& ctx,
                                   double retrieval_score, int retrieval_rank,
                                   const kernel::DependencyTree* statement_tree = nullptr) {
    if (ctx.resources == nullptr || ctx.types == nullptr)
        throw Error("pair_features needs resources and a type context");
    const double miss = features::missing_value();
    NamedFeatures out;

    features::append(out, "fc_retrieval_score", retrieval_score);
    features::append(out, "fc_retrieval_rank", static_cast<double>(retrieval_rank));

    const auto stmt_tokens = text::tokenize(s.text);
    const auto stmt_set = text::token_set(stmt_tokens);

    const AnnotationLayer* stmt_ann = nullptr;
    if (ctx.annotations) {
        auto it = ctx.annotations->find(s.id);
        if (it != ctx.annotations->end()) stmt_ann = &it->second;
    }
    std::optional<kernel::DependencyTree> local_tree;
    if (statement_tree == nullptr && stmt_ann != nullptr && !stmt_ann->dependencies.empty()) {
        local_tree = kernel::DependencyTree::from_annotation(*stmt_ann);
        statement_tree = &*local_tree;
    }

    const std::size_t n_sent = view.sentence_tokens.size();
    std::vector<double> f_jaccard(n_sent), f_ngram1(n_sent), f_ngram2(n_sent), f_ngram3(n_sent);
    std::vector<double> f_nnp, f_kernel;
    const bool nnp_available = stmt_ann != nullptr && ctx.annotations != nullptr;
    const bool kernel_available = statement_tree != nullptr && ctx.annotations != nullptr;

    for (std::size_t j = 0; j < n_sent; ++j) {
        f_jaccard[j] = text::jaccard(stmt_set, view.sentence_sets[j]);
        f_ngram1[j] = text::ngram_overlap(stmt_tokens, view.sentence_tokens[j], 1);
        f_ngram2[j] = text::ngram_overlap(stmt_tokens, view.sentence_tokens[j], 2);
        f_ngram3[j] = text::ngram_overlap(stmt_tokens, view.sentence_tokens[j], 3);
    }
    if (nnp_available) {
        f_nnp.resize(n_sent, 0.0);
        for (std::size_t j = 0; j < n_sent; ++j) {
            const AnnotationLayer* sent_ann = nullptr;
            auto it = ctx.annotations->find(sentence_unit_id(view.article->id, j));
            if (it != ctx.annotations->end()) sent_ann = &it->second;
            f_nnp[j] = sent_ann ? text::nnp_phrase_overlap(stmt_ann, sent_ann) : 0.0;
        }
    }
    if (kernel_available) {
        f_kernel.resize(n_sent, 0.0);
        for (std::size_t j = 0; j < n_sent; ++j) {
            f_kernel[j] = view.sentence_trees[j] ? kernel::tree_kernel(*statement_tree, *view.sentence_trees[j])
                                                 : 0.0;
        }
    }

    detail::append_sentence_aggregates(out, "ent_jaccard", f_jaccard, true);
    detail::append_sentence_aggregates(out, "ent_ngram1", f_ngram1, true);
    detail::append_sentence_aggregates(out, "ent_ngram2", f_ngram2, true);
    detail::append_sentence_aggregates(out, "ent_ngram3", f_ngram3, true);
    detail::append_sentence_aggregates(out, "ent_nnp", f_nnp, nnp_available);
    detail::append_sentence_aggregates(out, "ent_kernel", f_kernel, kernel_available);

    // against the central sentence
    const std::size_t c = view.central_sentence;
    const bool has_sentences = n_sent > 0;
    features::append(out, "cen_jaccard", has_sentences ? f_jaccard[c] : 0.0);
    features::append(out, "cen_ngram1", has_sentences ? f_ngram1[c] : 0.0);
    features::append(out, "cen_ngram2", has_sentences ? f_ngram2[c] : 0.0);
    features::append(out, "cen_ngram3", has_sentences ? f_ngram3[c] : 0.0);
    features::append(out, "cen_nnp", nnp_available ? (has_sentences ? f_nnp[c] : 0.0) : miss);
    features::append(out, "cen_kernel", kernel_available ? (has_sentences ? f_kernel[c] : 0.0) : miss);

    features::append(out, "fc_headline_jaccard", text::jaccard(stmt_set, view.title_set));

    features::append(out, "fc_article_lm",
                     (view.title_body_tokens > 0 && !stmt_tokens.empty())
                         ? view.unigram_lm.score(stmt_tokens)
                         : miss);
    features::append(out, "fc_type_lm",
                     (ctx.type_lm != nullptr && !stmt_tokens.empty()) ? ctx.type_lm->score(stmt_tokens)
                                                                      : miss);
    features::append(out, "fc_topic_score",
                     ctx.type_topics != nullptr ? lda::topic_score(*ctx.type_topics, stmt_tokens) : miss);

    // entity prominence
    double freq = 0.0, freq_norm = 0.0, relfreq = 0.0;
    std::vector<double> anchor_relfreq;
    if (ctx.types->entities.count(s.entity_id)) {
        const Entity& e = *ctx.types->entities.at(s.entity_id);
        freq = static_cast<double>(count_mentions(view.article->title + " " + view.article->body(), e));
        freq_norm = view.title_body_tokens > 0 ? freq / static_cast<double>(view.title_body_tokens) : 0.0;
        relfreq = relative_entity_frequency(e.id, view.mentions);
    }
    features::append(out, "fc_entity_freq", freq);
    features::append(out, "fc_entity_freq_norm", freq_norm);
    features::append(out, "fc_entity_relfreq", relfreq);
    for (const auto& a : s.anchors) {
        if (!ctx.types->entities.count(a)) continue;
        anchor_relfreq.push_back(relative_entity_frequency(a, view.mentions));
    }
    if (anchor_relfreq.empty()) {
        features::append(out, "fc_anchor_relfreq_min", 0.0);
        features::append(out, "fc_anchor_relfreq_max", 0.0);
        features::append(out, "fc_anchor_relfreq_avg", 0.0);
    } else {
        double mn = anchor_relfreq[0], mx = anchor_relfreq[0], sum = 0.0;
        for (double v : anchor_relfreq) {
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
        }
        features::append(out, "fc_anchor_relfreq_min", mn);
        features::append(out, "fc_anchor_relfreq_max", mx);
        features::append(out, "fc_anchor_relfreq_avg", sum / static_cast<double>(anchor_relfreq.size()));
    }

    // news-domain authority for the model's context type and the section
    const std::string& domain = view.article->domain;
    features::append(out, "fc_authority_type",
                     ctx.authority ? ctx.authority->type_domain_authority(ctx.model_type, domain) : 0.0);
    features::append(out, "fc_authority_section",
                     ctx.authority ? ctx.authority->section_domain_authority(s.section, domain) : 0.0);
    return out;
}

}  // namespace newscite::fc
