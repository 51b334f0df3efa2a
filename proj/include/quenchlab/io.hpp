#pragma once

// deterministic CSV output, flat key=value configs, and run manifests.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "version.hpp"

namespace quenchlab {

// shortest round-trip decimal; reproducible across runs
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : f_(path), n_cols_(columns.size()) {
        if (!f_) throw validation_error("CsvWriter: cannot open " + path.string());
        for (std::size_t i = 0; i < columns.size(); ++i)
            f_ << (i ? "," : "") << columns[i];
        f_ << "\n";
    }

    void row(const std::vector<double>& values) {
        if (values.size() != n_cols_) throw validation_error("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < values.size(); ++i)
            f_ << (i ? "," : "") << fmt_double(values[i]);
        f_ << "\n";
    }

    void row_strings(const std::vector<std::string>& values) {
        if (values.size() != n_cols_) throw validation_error("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < values.size(); ++i)
            f_ << (i ? "," : "") << values[i];
        f_ << "\n";
    }

  private:
    std::ofstream f_;
    std::size_t n_cols_;
};

// ---------------------------------------------------------------- config

// flat key=value text: one pair per line, '#' comments, blank lines ignored
class Config {
  public:
    Config() = default;

    static Config from_file(const std::filesystem::path& path) {
        std::ifstream f(path);
        if (!f) throw validation_error("config: cannot open " + path.string());
        Config c;
        std::string line;
        int lineno = 0;
        while (std::getline(f, line)) {
            ++lineno;
            std::string s = strip(line);
            if (s.empty() || s[0] == '#') continue;
            auto hash = s.find('#');
            if (hash != std::string::npos) s = strip(s.substr(0, hash));
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw validation_error("config: line " + std::to_string(lineno) + " is not key=value");
            std::string key = strip(s.substr(0, eq));
            std::string val = strip(s.substr(eq + 1));
            if (key.empty()) throw validation_error("config: empty key at line " + std::to_string(lineno));
            if (c.kv_.count(key)) throw validation_error("config: duplicate key '" + key + "'");
            c.kv_[key] = val;
        }
        return c;
    }

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& dflt) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second;
    }

    double get_double(const std::string& key, double dflt) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        return parse_double(key, it->second);
    }

    long get_int(const std::string& key, long dflt) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        try {
            std::size_t pos = 0;
            long v = std::stol(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw validation_error("config: key '" + key + "' is not an integer: " + it->second);
        }
    }

    std::vector<double> get_double_list(const std::string& key, const std::string& dflt) const {
        std::string raw = get_string(key, dflt);
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = strip(tok);
            if (tok.empty()) continue;
            out.push_back(parse_double(key, tok));
        }
        if (out.empty()) throw validation_error("config: key '" + key + "' has no values");
        return out;
    }

    std::vector<int> get_int_list(const std::string& key, const std::string& dflt) const {
        std::vector<int> out;
        for (double v : get_double_list(key, dflt)) {
            int i = static_cast<int>(v);
            if (v != i) throw validation_error("config: key '" + key + "' must be integers");
            out.push_back(i);
        }
        return out;
    }

    const std::map<std::string, std::string>& items() const { return kv_; }

  private:
    static std::string strip(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }
    static double parse_double(const std::string& key, const std::string& v) {
        try {
            std::size_t pos = 0;
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return d;
        } catch (...) {
            throw validation_error("config: key '" + key + "' is not a number: " + v);
        }
    }

    std::map<std::string, std::string> kv_;
};

// ---------------------------------------------------------------- manifest

// run manifest: config echo, library version, outputs, wall time.  The
// manifest is the only output allowed to differ between identical reruns.
inline void write_manifest(const std::filesystem::path& out_dir, const std::string& scenario,
                           const Config& cfg, const std::vector<std::string>& outputs,
                           double wall_time_s, int workers) {
    nlohmann::ordered_json j;
    j["scenario"] = scenario;
    j["version"] = version;
    nlohmann::ordered_json c;
    for (const auto& [k, v] : cfg.items()) c[k] = v;
    j["config"] = c;
    j["outputs"] = outputs;
    j["wall_time_s"] = wall_time_s;
    j["workers"] = workers;
    std::ofstream f(out_dir / "manifest.json");
    f << j.dump(2) << "\n";
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    std::ofstream f(path);
    if (!f) throw validation_error("write_json: cannot open " + path.string());
    f << j.dump(2) << "\n";
}

}
