#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pacifier/errors.hpp"

namespace pacifier {

// Sectioned key/value config text:
//
//   version = 1
//   [section]
//   key = value        # comment
//
// The file must declare version = 1 before the first section. Unknown
// sections or keys are rejected against the schema the caller provides.
class ConfigFile {
public:
    static ConfigFile parse_text(const std::string& text, const std::string& origin = "<config>") {
        ConfigFile cfg;
        std::istringstream in(text);
        std::string line, section;
        int line_no = 0;
        bool version_seen = false;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                if (section.empty())
                    throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
                cfg.sections_[section];
                continue;
            }
            auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
            if (section.empty()) {
                if (key != "version")
                    throw ConfigError(origin + ":" + std::to_string(line_no) +
                                      ": only 'version' may appear before the first section");
                if (value != "1")
                    throw ConfigError(origin + ": unsupported config version '" + value + "'");
                version_seen = true;
                continue;
            }
            if (!cfg.sections_[section].emplace(key, value).second)
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                                  "'");
        }
        if (!version_seen) throw ConfigError(origin + ": missing 'version = 1'");
        return cfg;
    }

    static ConfigFile parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_text(buf.str(), path);
    }

    // Rejects sections/keys outside the schema.
    void check_schema(const std::map<std::string, std::set<std::string>>& schema) const {
        for (const auto& [section, kv] : sections_) {
            auto it = schema.find(section);
            if (it == schema.end()) throw ConfigError("unknown config section [" + section + "]");
            for (const auto& [key, value] : kv)
                if (!it->second.count(key))
                    throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
        }
    }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const {
        auto s = sections_.find(section);
        if (s == sections_.end()) return fallback;
        auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    double get_real(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get(section, key);
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' in [" + section + "] is not a number: '" + v + "'");
        }
    }

    long long get_int(const std::string& section, const std::string& key, long long fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get(section, key);
        try {
            std::size_t pos = 0;
            long long i = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return i;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "' in [" + section + "] is not an integer: '" + v + "'");
        }
    }

    std::vector<std::string> get_list(const std::string& section, const std::string& key) const {
        std::vector<std::string> out;
        std::string v = get(section, key);
        std::istringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r\n");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace pacifier
