#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>

#include <json.hpp>

#include "newscite/error.hpp"

namespace newscite::jsonl {

using json = nlohmann::json;

// Streams one JSON object per non-empty line. Parse failures are reported
// with their 1-based line number.
inline void for_each(const std::filesystem::path& path,
                     const std::function<void(std::size_t line_no, const json&)>& fn) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(path.string() + ": malformed JSON at line " + std::to_string(line_no) +
                        ": " + e.what());
        }
        fn(line_no, record);
    }
}

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw Error("cannot open " + path.string() + " for writing");
    }

    void write(const json& record) { out_ << record.dump() << '\n'; }

private:
    std::ofstream out_;
};

inline void write_json_file(const std::filesystem::path& path, const json& value) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << value.dump(2) << '\n';
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    json value;
    try {
        in >> value;
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
    return value;
}

}  // namespace newscite::jsonl
