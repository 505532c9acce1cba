#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "newscite/error.hpp"
#include "newscite/unicode.hpp"

// Plain-text lexical resources shipped under resources/: attribution verbs,
// discourse connectives and stopwords. One entry per line; '#' starts a
// comment line.

namespace newscite::text {

enum class DiscourseCategory { temporal, contingency, comparison, expansion };

inline DiscourseCategory parse_discourse_category(const std::string& s) {
    if (s == "temporal") return DiscourseCategory::temporal;
    if (s == "contingency") return DiscourseCategory::contingency;
    if (s == "comparison") return DiscourseCategory::comparison;
    if (s == "expansion") return DiscourseCategory::expansion;
    throw Error("unknown discourse category '" + s + "'");
}

struct Connective {
    std::vector<std::string> tokens;  // lowercase; multiword connectives keep their token order
    DiscourseCategory category;
};

struct Resources {
    std::unordered_set<std::string> attribution_verbs;
    std::vector<Connective> connectives;
    std::unordered_set<std::string> stopwords;

    static Resources load(const std::filesystem::path& dir) {
        Resources r;
        r.attribution_verbs = read_set(dir / "attribution_verbs.txt");
        r.stopwords = read_set(dir / "stopwords.txt");
        r.connectives = read_connectives(dir / "connectives.tsv");
        return r;
    }

    bool is_stopword(const std::string& token) const { return stopwords.count(token) > 0; }

    // Verb lookup with light de-inflection: exact match, then strip common
    // suffixes (-s, -ed, -d, -ing, with a restored final 'e').
    bool is_attribution_verb(const std::string& surface) const {
        std::string t = unicode::lower(surface);
        if (attribution_verbs.count(t)) return true;
        auto try_base = [&](const std::string& base) {
            return !base.empty() && attribution_verbs.count(base) > 0;
        };
        if (t.size() > 2 && t.ends_with("s") && try_base(t.substr(0, t.size() - 1))) return true;
        if (t.size() > 3 && t.ends_with("ed")) {
            if (try_base(t.substr(0, t.size() - 2))) return true;
            if (try_base(t.substr(0, t.size() - 1))) return true;               // announced -> announce
            if (try_base(t.substr(0, t.size() - 2) + "e")) return true;
        }
        if (t.size() > 4 && t.ends_with("ing")) {
            if (try_base(t.substr(0, t.size() - 3))) return true;
            if (try_base(t.substr(0, t.size() - 3) + "e")) return true;         // stating -> state
        }
        return false;
    }

private:
    static std::unordered_set<std::string> read_set(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("missing resource file: " + path.string());
        std::unordered_set<std::string> out;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            out.insert(unicode::lower(line));
        }
        return out;
    }

    static std::vector<Connective> read_connectives(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw Error("missing resource file: " + path.string());
        std::vector<Connective> out;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw Error(path.string() + ": line " + std::to_string(line_no) + ": expected <connective>\\t<category>");
            Connective c;
            std::istringstream words(unicode::lower(line.substr(0, tab)));
            std::string w;
            while (words >> w) c.tokens.push_back(w);
            if (c.tokens.empty())
                throw Error(path.string() + ": line " + std::to_string(line_no) + ": empty connective");
            c.category = parse_discourse_category(line.substr(tab + 1));
            out.push_back(std::move(c));
        }
        return out;
    }
};

}  // namespace newscite::text
