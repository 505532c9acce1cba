#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

// Named, ordered feature values shared by the SC and FC extractors. Missing
// values are carried as NaN and routed by the forest's missing-value rule.

namespace newscite::features {

using NamedFeatures = std::vector<std::pair<std::string, double>>;

inline constexpr double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }

inline bool is_missing(double v) { return std::isnan(v); }

inline void append(NamedFeatures& out, std::string name, double value) {
    out.emplace_back(std::move(name), value);
}

inline std::vector<std::string> names_of(const NamedFeatures& f) {
    std::vector<std::string> out;
    out.reserve(f.size());
    for (const auto& [name, value] : f) out.push_back(name);
    return out;
}

inline std::vector<double> values_of(const NamedFeatures& f) {
    std::vector<double> out;
    out.reserve(f.size());
    for (const auto& [name, value] : f) out.push_back(value);
    return out;
}

}  // namespace newscite::features
