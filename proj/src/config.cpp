#include "sfflab/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sfflab/errors.hpp"

namespace sfflab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str(), path);
}

Config Config::from_text(const std::string& text, const std::string& origin) {
    Config cfg;
    cfg.origin_ = origin;

    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        // a run manifest: pull its resolved_config back out
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const std::exception& e) {
            throw config_error(origin + ": manifest JSON parse error: " + e.what());
        }
        if (!j.contains("resolved_config") || !j["resolved_config"].is_object())
            throw config_error(origin + ": manifest carries no resolved_config object");
        for (const auto& [section, body] : j["resolved_config"].items())
            for (const auto& [key, value] : body.items())
                cfg.sections_[section][key] = Entry{value.get<std::string>(), 0, false};
        return cfg;
    }

    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error(origin + ":" + std::to_string(lineno) +
                                   ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw config_error(origin + ":" + std::to_string(lineno) + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(origin + ":" + std::to_string(lineno) +
                               ": expected key = value");
        if (section.empty())
            throw config_error(origin + ":" + std::to_string(lineno) +
                               ": key before any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.sections_[section].count(key))
            throw config_error(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                               key + "' in [" + section + "]");
        cfg.sections_[section][key] = Entry{value, lineno, false};
    }
    return cfg;
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return nullptr;
    return &k->second;
}

std::string Config::where(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    std::string loc = origin_ + ": [" + section + "] " + key;
    if (e && e->line > 0) loc += " (line " + std::to_string(e->line) + ")";
    return loc;
}

bool Config::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

std::string Config::str(const std::string& section, const std::string& key) {
    const Entry* e = find(section, key);
    if (!e) throw config_error(origin_ + ": missing required key [" + section + "] " + key);
    e->consumed = true;
    return e->value;
}

std::string Config::str_or(const std::string& section, const std::string& key,
                           const std::string& fallback) {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    return e->value;
}

double Config::num(const std::string& section, const std::string& key) {
    const std::string v = str(section, key);
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error(where(section, key) + ": not a number: '" + v + "'");
    }
}

double Config::num_or(const std::string& section, const std::string& key, double fallback) {
    return has(section, key) ? num(section, key) : fallback;
}

long long Config::integer(const std::string& section, const std::string& key) {
    const std::string v = str(section, key);
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw config_error(where(section, key) + ": not an integer: '" + v + "'");
    return x;
}

long long Config::integer_or(const std::string& section, const std::string& key,
                             long long fallback) {
    return has(section, key) ? integer(section, key) : fallback;
}

std::uint64_t Config::u64_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) {
    if (!has(section, key)) return fallback;
    const std::string v = str(section, key);
    std::uint64_t x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw config_error(where(section, key) + ": not a u64: '" + v + "'");
    return x;
}

std::optional<double> Config::num_or_auto(const std::string& section, const std::string& key) {
    if (!has(section, key)) return std::nullopt;
    const Entry* e = find(section, key);
    if (trim(e->value) == "auto" || trim(e->value) == "center") {
        e->consumed = true;
        return std::nullopt;
    }
    return num(section, key);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = Entry{value, 0, true};
}

void Config::reject_unknown() const {
    std::string complaints;
    for (const auto& [section, body] : sections_)
        for (const auto& [key, entry] : body)
            if (!entry.consumed) {
                complaints += "\n  " + where(section, key);
            }
    if (!complaints.empty())
        throw config_error(origin_ + ": unknown config keys:" + complaints);
}

std::string Config::render() const {
    std::ostringstream os;
    for (const auto& [section, body] : sections_) {
        os << "[" << section << "]\n";
        for (const auto& [key, entry] : body) os << key << " = " << entry.value << "\n";
        os << "\n";
    }
    return os.str();
}

std::map<std::string, std::map<std::string, std::string>> Config::resolved() const {
    std::map<std::string, std::map<std::string, std::string>> out;
    for (const auto& [section, body] : sections_)
        for (const auto& [key, entry] : body) out[section][key] = entry.value;
    return out;
}

}  // namespace sfflab
