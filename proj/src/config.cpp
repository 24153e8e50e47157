#include "bicm/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bicm {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// strips a # comment that is outside quotes
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (s[i] == '#' && !quoted) return s.substr(0, i);
    }
    return s;
}

bool looks_like_int(const std::string& v) {
    size_t i = (v[0] == '-' || v[0] == '+') ? 1 : 0;
    if (i >= v.size()) return false;
    for (; i < v.size(); ++i)
        if (!std::isdigit((unsigned char)v[i])) return false;
    return true;
}

Config::Value parse_scalar(const std::string& v, const std::string& where) {
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
    if (looks_like_int(v)) return int64_t(std::stoll(v));
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (...) {
    }
    throw std::runtime_error("config: cannot parse value '" + v + "' at " + where);
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.text_ = text;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string where = origin + ":" + std::to_string(lineno);
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw std::runtime_error("config: malformed section header at " + where);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config: expected key = value at " + where);
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) throw std::runtime_error("config: empty key or value at " + where);
        std::string full = section.empty() ? key : section + "." + key;
        if (val.front() == '[') {
            if (val.back() != ']') throw std::runtime_error("config: malformed array at " + where);
            std::string inner = val.substr(1, val.size() - 2);
            std::vector<std::string> items;
            std::string cur;
            bool quoted = false;
            for (char ch : inner) {
                if (ch == '"') quoted = !quoted;
                if (ch == ',' && !quoted) {
                    items.push_back(trim(cur));
                    cur.clear();
                } else {
                    cur += ch;
                }
            }
            if (!trim(cur).empty()) items.push_back(trim(cur));
            bool all_strings = !items.empty();
            for (const auto& it : items) all_strings &= it.size() >= 2 && it.front() == '"' && it.back() == '"';
            if (all_strings) {
                std::vector<std::string> sv;
                for (const auto& it : items) sv.push_back(it.substr(1, it.size() - 2));
                cfg.values_[full] = sv;
            } else {
                std::vector<double> dv;
                for (const auto& it : items) {
                    Value v = parse_scalar(it, where);
                    if (std::holds_alternative<double>(v))
                        dv.push_back(std::get<double>(v));
                    else if (std::holds_alternative<int64_t>(v))
                        dv.push_back(double(std::get<int64_t>(v)));
                    else
                        throw std::runtime_error("config: mixed array types at " + where);
                }
                cfg.values_[full] = dv;
            }
        } else {
            cfg.values_[full] = parse_scalar(val, where);
        }
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str(), path);
}

const Config::Value& Config::at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config: missing required key: " + key);
    return it->second;
}

bool Config::get_bool(const std::string& key) const {
    const Value& v = at(key);
    if (!std::holds_alternative<bool>(v)) throw std::runtime_error("config: key " + key + ": expected bool");
    return std::get<bool>(v);
}

int64_t Config::get_int(const std::string& key) const {
    const Value& v = at(key);
    if (!std::holds_alternative<int64_t>(v)) throw std::runtime_error("config: key " + key + ": expected integer");
    return std::get<int64_t>(v);
}

double Config::get_double(const std::string& key) const {
    const Value& v = at(key);
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<int64_t>(v)) return double(std::get<int64_t>(v));
    throw std::runtime_error("config: key " + key + ": expected number");
}

std::string Config::get_string(const std::string& key) const {
    const Value& v = at(key);
    if (!std::holds_alternative<std::string>(v)) throw std::runtime_error("config: key " + key + ": expected string");
    return std::get<std::string>(v);
}

std::vector<double> Config::get_double_array(const std::string& key) const {
    const Value& v = at(key);
    if (std::holds_alternative<std::vector<double>>(v)) return std::get<std::vector<double>>(v);
    if (std::holds_alternative<double>(v)) return {std::get<double>(v)};
    if (std::holds_alternative<int64_t>(v)) return {double(std::get<int64_t>(v))};
    throw std::runtime_error("config: key " + key + ": expected number array");
}

std::vector<std::string> Config::get_string_array(const std::string& key) const {
    const Value& v = at(key);
    if (std::holds_alternative<std::vector<std::string>>(v)) return std::get<std::vector<std::string>>(v);
    if (std::holds_alternative<std::string>(v)) return {std::get<std::string>(v)};
    throw std::runtime_error("config: key " + key + ": expected string array");
}

void Config::require(const std::vector<std::string>& keys) const {
    std::string missing;
    for (const auto& k : keys) {
        if (!has(k)) missing += (missing.empty() ? "" : ", ") + k;
    }
    if (!missing.empty()) throw std::runtime_error("config: missing required key: " + missing);
}

void Config::check_schema(int64_t expected) const {
    require({"schema_version"});
    int64_t got = get_int("schema_version");
    if (got != expected)
        throw std::runtime_error("config: schema_version " + std::to_string(got) + " unsupported (expected " +
                                 std::to_string(expected) + ")");
}

std::vector<std::string> Config::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_) {
        if (k.rfind(prefix, 0) == 0) out.push_back(k);
    }
    return out;
}

}  // namespace bicm
