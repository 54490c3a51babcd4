#pragma once

#include <map>
#include <string>
#include <vector>

#include "tsgan/common.hpp"

namespace tsgan {

/// Key-value text config: one `key = value` pair per line, `#` comments.
/// The same syntax is used for dataset, training, and ablation-row configs.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig from_file(const std::string& path);
    static KeyValueConfig from_string(const std::string& text);
    /// Space-separated `key=value` tokens on one line (ablation matrix rows).
    static KeyValueConfig from_tokens(const std::string& line);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    void set(const std::string& key, const std::string& value);
    const std::map<std::string, std::string>& entries() const { return values_; }

    /// Render back to config-file text (reproducibility records).
    std::string to_text() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace tsgan
