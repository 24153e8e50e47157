#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace bicm {

// TOML-style key-value tree, enough for experiment configs: [section]
// headers, scalar values (bool, integer, float, "string"), flat arrays,
// # comments. Keys are addressed by dotted path. Every config must carry
// schema_version = 1.
class Config {
  public:
    using Value = std::variant<bool, int64_t, double, std::string, std::vector<double>, std::vector<std::string>>;

    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    bool get_bool(const std::string& key) const;
    int64_t get_int(const std::string& key) const;
    double get_double(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::vector<double> get_double_array(const std::string& key) const;
    std::vector<std::string> get_string_array(const std::string& key) const;

    bool get_bool(const std::string& key, bool dflt) const { return has(key) ? get_bool(key) : dflt; }
    int64_t get_int(const std::string& key, int64_t dflt) const { return has(key) ? get_int(key) : dflt; }
    double get_double(const std::string& key, double dflt) const { return has(key) ? get_double(key) : dflt; }
    std::string get_string(const std::string& key, const std::string& dflt) const {
        return has(key) ? get_string(key) : dflt;
    }

    // throws naming every missing key
    void require(const std::vector<std::string>& keys) const;
    // schema_version == expected, else diagnostic
    void check_schema(int64_t expected) const;

    const std::string& text() const { return text_; }
    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  private:
    const Value& at(const std::string& key) const;
    std::map<std::string, Value> values_;
    std::string text_, origin_;
};

}  // namespace bicm
