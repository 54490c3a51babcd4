#include "tsgan/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tsgan {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    require(is.good(), "config: cannot open " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_string(buf.str());
}

KeyValueConfig KeyValueConfig::from_string(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, "config: malformed line '" + line + "'");
        cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::from_tokens(const std::string& line) {
    KeyValueConfig cfg;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        require(eq != std::string::npos, "config: malformed token '" + tok + "'");
        cfg.values_[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return cfg;
}

bool KeyValueConfig::has(const std::string& key) const {
    return values_.count(key) != 0;
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
    const auto it = values_.find(key);
    require(it != values_.end(), "config: missing required key '" + key + "'");
    return it->second;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stoi(it->second);
    } catch (const std::exception&) {
        fail("config: key '" + key + "' is not an integer: " + it->second);
    }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        fail("config: key '" + key + "' is not a number: " + it->second);
    }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), ::tolower);
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    fail("config: key '" + key + "' is not a boolean: " + it->second);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

std::string KeyValueConfig::to_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
    return os.str();
}

}  // namespace tsgan
