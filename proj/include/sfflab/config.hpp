#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace sfflab {

// Flat sectioned key-value experiment configs:
//
//   # comment
//   [model]
//   l = 8
//   w = 2.0
//
// Unknown keys are rejected after a command has consumed what it understands.
// A run manifest (JSON) is also accepted: its resolved_config object is the
// config, so any manifest can be fed back to reproduce its run.
class Config {
public:
    static Config load(const std::string& path);
    static Config from_text(const std::string& text, const std::string& origin);

    bool has(const std::string& section, const std::string& key) const;

    std::string str(const std::string& section, const std::string& key);
    std::string str_or(const std::string& section, const std::string& key,
                       const std::string& fallback);
    double num(const std::string& section, const std::string& key);
    double num_or(const std::string& section, const std::string& key, double fallback);
    long long integer(const std::string& section, const std::string& key);
    long long integer_or(const std::string& section, const std::string& key,
                         long long fallback);
    std::uint64_t u64_or(const std::string& section, const std::string& key,
                         std::uint64_t fallback);
    // "auto" (or absence) -> nullopt
    std::optional<double> num_or_auto(const std::string& section, const std::string& key);

    void set(const std::string& section, const std::string& key, const std::string& value);

    // throws config_error listing any key no command consumed
    void reject_unknown() const;

    // canonical text form (sections and keys sorted)
    std::string render() const;
    std::map<std::string, std::map<std::string, std::string>> resolved() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };

    std::string origin_;
    std::map<std::string, std::map<std::string, Entry>> sections_;

    const Entry* find(const std::string& section, const std::string& key) const;
    std::string where(const std::string& section, const std::string& key) const;
};

}  // namespace sfflab
