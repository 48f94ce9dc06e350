#pragma once
// Line-delimited JSON record streams.

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "framesim/error.hpp"

namespace framesim::records {

using json = nlohmann::json;

// Calls fn(record, line_number) for every non-blank line. Lines must hold a
// single JSON object.
template <typename Fn>
void for_each(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(lineno, std::string("malformed record: ") + e.what());
        }
        if (!rec.is_object()) throw ParseError(lineno, "record is not a JSON object");
        fn(rec, lineno);
    }
    if (in.bad()) throw InputError("read failure");
}

// Compact one-line dump; doubles use the shortest round-trip representation.
inline void write(std::ostream& out, const json& rec) {
    out << rec.dump(-1, ' ', false, json::error_handler_t::strict) << '\n';
}

template <typename T>
T require(const json& rec, const char* key, std::size_t lineno) {
    auto it = rec.find(key);
    if (it == rec.end()) throw ParseError(lineno, std::string("missing field \"") + key + "\"");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ParseError(lineno, std::string("field \"") + key + "\" has the wrong type");
    }
}

}  // namespace framesim::records
