#include "pathwalk/toml.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pathwalk::toml {

double Value::as_number() const {
    if (kind == Kind::Integer) return static_cast<double>(int_v);
    if (kind == Kind::Float) return float_v;
    throw std::invalid_argument("config value is not numeric");
}

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::invalid_argument("config parse error at line " + std::to_string(line) + ": " +
                                what);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// strip a trailing comment, respecting quoted strings
std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

Value parse_scalar(const std::string& raw, int line) {
    const std::string s = trim(raw);
    if (s.empty()) fail(line, "missing value");
    Value v;
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"') fail(line, "unterminated string");
        v.kind = Value::Kind::String;
        v.string_v = s.substr(1, s.size() - 2);
        return v;
    }
    if (s == "true" || s == "false") {
        v.kind = Value::Kind::Boolean;
        v.bool_v = s == "true";
        return v;
    }
    const bool looks_float = s.find_first_of(".eE") != std::string::npos ||
                             s == "inf" || s == "-inf" || s == "nan";
    try {
        std::size_t used = 0;
        if (looks_float) {
            v.kind = Value::Kind::Float;
            v.float_v = std::stod(s, &used);
        } else {
            v.kind = Value::Kind::Integer;
            v.int_v = std::stoll(s, &used);
        }
        if (used != s.size()) fail(line, "trailing characters after value '" + s + "'");
    } catch (const std::invalid_argument&) {
        fail(line, "cannot parse value '" + s + "'");
    } catch (const std::out_of_range&) {
        fail(line, "value out of range '" + s + "'");
    }
    return v;
}

Value parse_value(const std::string& raw, int line) {
    const std::string s = trim(raw);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') fail(line, "unterminated array");
        Value v;
        v.kind = Value::Kind::Array;
        std::string inner = s.substr(1, s.size() - 2);
        std::string item;
        bool in_string = false;
        for (char c : inner) {
            if (c == '"') in_string = !in_string;
            if (c == ',' && !in_string) {
                if (!trim(item).empty()) v.array_v.push_back(parse_scalar(item, line));
                item.clear();
            } else {
                item += c;
            }
        }
        if (!trim(item).empty()) v.array_v.push_back(parse_scalar(item, line));
        return v;
    }
    return parse_scalar(s, line);
}

}  // namespace

Document parse(const std::string& text) {
    Document doc;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(strip_comment(line));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(lineno, "unterminated table header");
            current = trim(s.substr(1, s.size() - 2));
            if (current.empty()) fail(lineno, "empty table name");
            doc.tables[current];  // tables may be empty
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) fail(lineno, "empty key");
        if (current.empty()) fail(lineno, "key outside any table");
        if (doc.tables[current].count(key)) fail(lineno, "duplicate key '" + key + "'");
        doc.tables[current][key] = parse_value(s.substr(eq + 1), lineno);
    }
    return doc;
}

Document parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

}  // namespace pathwalk::toml
