#pragma once
#include <map>
#include <string>
#include <vector>

namespace patchpert {

// Flat key = value configuration file; '#' starts a comment.
struct Config {
    std::map<std::string, std::string> kv;

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    // comma- or space-separated list of doubles
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;
};

} // namespace patchpert
