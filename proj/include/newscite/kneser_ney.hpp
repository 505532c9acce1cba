#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <unordered_map>
#include <vector>

#include "newscite/error.hpp"

// Interpolated Kneser-Ney n-gram language model (n <= 3, absolute discount).
// The highest order uses raw counts; lower orders use continuation counts
// (distinct left extensions). The unigram level interpolates with a uniform
// term over vocabulary+UNK, so every probability is strictly positive and
// sums to one over the open vocabulary for any context.

namespace newscite::lm {

class NGramLM {
public:
    static constexpr int kUnkId = 0;
    static constexpr int kBosId = 1;

    NGramLM() = default;

    static NGramLM train(const std::vector<std::vector<std::string>>& docs, int order = 3,
                         double discount = 0.75) {
        if (order < 1 || order > 3) throw Error("LM order must be in [1, 3]");
        if (!(discount > 0.0 && discount < 1.0)) throw Error("discount must be in (0, 1)");
        bool has_tokens = false;
        for (const auto& d : docs) has_tokens |= !d.empty();
        if (!has_tokens) throw Error("cannot train a language model on an empty corpus");

        NGramLM lm;
        lm.order_ = order;
        lm.discount_ = discount;

        // raw n-gram counts per level
        std::vector<Table> raw(order + 1);
        for (const auto& doc : docs) {
            if (doc.empty()) continue;
            std::vector<int> padded(order - 1, kBosId);
            padded.reserve(doc.size() + order - 1);
            for (const auto& tok : doc) padded.push_back(lm.intern(tok));
            for (int k = 1; k <= order; ++k) {
                for (std::size_t pos = order - 1; pos < padded.size(); ++pos) {
                    std::string ctx = encode(padded.data() + pos - (k - 1), k - 1);
                    bump(raw[k], ctx, padded[pos]);
                }
            }
        }

        // level tables: continuation counts below the top order
        lm.levels_.resize(order + 1);
        for (int k = 1; k < order; ++k) {
            Table cont;
            for (const auto& [ctx, cell] : raw[k + 1]) {
                // drop the leftmost context token
                std::string suffix = ctx.substr(sizeof(std::int32_t));
                for (const auto& [word, n] : cell.counts) bump(cont, suffix, word);
            }
            lm.levels_[k] = std::move(cont);
        }
        lm.levels_[order] = std::move(raw[order]);
        return lm;
    }

    int order() const { return order_; }
    double discount() const { return discount_; }

    // Real words only (no UNK / BOS sentinels).
    std::vector<std::string> vocabulary() const {
        std::vector<std::string> out;
        out.reserve(vocab_.size());
        for (const auto& [w, id] : vocab_) out.push_back(w);
        std::sort(out.begin(), out.end());
        return out;
    }

    // P(word | context); context is the up-to-(order-1) preceding tokens,
    // most recent last. Out-of-vocabulary tokens map to UNK.
    double prob(const std::vector<std::string>& context, const std::string& word) const {
        std::vector<int> ctx_ids;
        ctx_ids.reserve(context.size());
        for (const auto& t : context) ctx_ids.push_back(lookup(t));
        return prob_ids(ctx_ids, lookup(word));
    }

    double log_prob(const std::vector<std::string>& context, const std::string& word) const {
        return std::log(prob(context, word));
    }

    // Mean natural-log probability per token with BOS padding.
    double score(const std::vector<std::string>& tokens) const {
        if (tokens.empty()) throw Error("cannot score an empty token sequence");
        std::vector<int> padded(order_ - 1, kBosId);
        padded.reserve(tokens.size() + order_ - 1);
        for (const auto& t : tokens) padded.push_back(lookup(t));
        double sum = 0.0;
        for (std::size_t pos = order_ - 1; pos < padded.size(); ++pos) {
            std::vector<int> ctx(padded.begin() + pos - (order_ - 1), padded.begin() + pos);
            sum += std::log(prob_ids(ctx, padded[pos]));
        }
        return sum / static_cast<double>(tokens.size());
    }

private:
    struct Cell {
        std::unordered_map<int, int> counts;
        long total = 0;
    };
    using Table = std::unordered_map<std::string, Cell>;

    static std::string encode(const int* ids, int n) {
        std::string key;
        key.resize(static_cast<std::size_t>(n) * sizeof(std::int32_t));
        for (int i = 0; i < n; ++i) {
            std::int32_t v = ids[i];
            std::memcpy(key.data() + i * sizeof(std::int32_t), &v, sizeof(v));
        }
        return key;
    }

    static void bump(Table& table, const std::string& ctx, int word) {
        Cell& cell = table[ctx];
        cell.counts[word] += 1;
        cell.total += 1;
    }

    int intern(const std::string& token) {
        auto it = vocab_.find(token);
        if (it != vocab_.end()) return it->second;
        int id = next_id_++;
        vocab_.emplace(token, id);
        return id;
    }

    int lookup(const std::string& token) const {
        auto it = vocab_.find(token);
        return it == vocab_.end() ? kUnkId : it->second;
    }

    double prob_ids(const std::vector<int>& context, int word) const {
        if (levels_.empty()) throw Error("language model has not been trained");
        int k = std::min<int>(order_, static_cast<int>(context.size()) + 1);
        return prob_level(k, context, word);
    }

    double prob_level(int k, const std::vector<int>& context, int word) const {
        const double D = discount_;
        // open vocabulary: real words + UNK
        const double uniform = 1.0 / static_cast<double>(vocab_.size() + 1);
        if (k <= 1) {
            auto it = levels_[1].find(std::string());
            if (it == levels_[1].end() || it->second.total == 0) return uniform;
            const Cell& cell = it->second;
            const double T = static_cast<double>(cell.total);
            const double R = static_cast<double>(cell.counts.size());
            auto cit = cell.counts.find(word);
            const double c = cit == cell.counts.end() ? 0.0 : static_cast<double>(cit->second);
            return std::max(c - D, 0.0) / T + (D * R / T) * uniform;
        }
        std::vector<int> tail(context.end() - (k - 1), context.end());
        std::vector<int> shorter(tail.begin() + 1, tail.end());
        auto it = levels_[k].find(encode(tail.data(), k - 1));
        if (it == levels_[k].end() || it->second.total == 0) return prob_level(k - 1, shorter, word);
        const Cell& cell = it->second;
        const double T = static_cast<double>(cell.total);
        const double R = static_cast<double>(cell.counts.size());
        auto cit = cell.counts.find(word);
        const double c = cit == cell.counts.end() ? 0.0 : static_cast<double>(cit->second);
        return std::max(c - D, 0.0) / T + (D * R / T) * prob_level(k - 1, shorter, word);
    }

    int order_ = 1;
    double discount_ = 0.75;
    int next_id_ = 2;  // 0 = UNK, 1 = BOS
    std::unordered_map<std::string, int> vocab_;
    std::vector<Table> levels_;
};

}  // namespace newscite::lm
