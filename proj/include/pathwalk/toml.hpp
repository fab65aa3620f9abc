#pragma once

#include <map>
#include <string>
#include <vector>

namespace pathwalk::toml {

// Minimal TOML subset sufficient for run configurations: top-level tables,
// scalar keys (string / integer / float / boolean) and flat arrays, with
// # comments. Dotted keys, nested tables and dates are not supported.
struct Value {
    enum class Kind { String, Integer, Float, Boolean, Array };
    Kind kind = Kind::String;
    std::string string_v;
    long long int_v = 0;
    double float_v = 0.0;
    bool bool_v = false;
    std::vector<Value> array_v;

    double as_number() const;  // integer or float
};

using Table = std::map<std::string, Value>;

struct Document {
    std::map<std::string, Table> tables;

    bool has(const std::string& table) const { return tables.count(table) > 0; }
};

// Throws invalid_argument with a line number on malformed input.
Document parse(const std::string& text);
Document parse_file(const std::string& path);

}  // namespace pathwalk::toml
