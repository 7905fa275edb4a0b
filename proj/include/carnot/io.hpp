#ifndef CARNOT_IO_HPP
#define CARNOT_IO_HPP

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "carnot/errors.hpp"
#include "carnot/grid.hpp"

namespace carnot {

using json = nlohmann::json;

// .gfn grid-function container: magic "GFN1", u64 header length, JSON
// header (group, half_width, points_per_axis), then N complex values as
// interleaved little-endian f64 (re, im) in row-major node order.

inline void save_gfn(const std::string& path, const GridFunction& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    json header = {
        {"group", f.grid.group.to_json()},
        {"half_width", f.grid.half_width},
        {"points_per_axis", f.grid.points_per_axis},
    };
    std::string h = header.dump();
    uint64_t len = h.size();
    os.write("GFN1", 4);
    os.write(reinterpret_cast<const char*>(&len), 8);
    os.write(h.data(), static_cast<std::streamsize>(len));
    for (const auto& v : f.values) {
        double re = v.real(), im = v.imag();
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
    if (!os) throw ConfigError("write failed: " + path);
}

inline GridFunction load_gfn(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "GFN1")
        throw ConfigError("not a .gfn file: " + path);
    uint64_t len = 0;
    is.read(reinterpret_cast<char*>(&len), 8);
    std::string h(len, '\0');
    is.read(h.data(), static_cast<std::streamsize>(len));
    json header = json::parse(h);
    GroupSpec group = GroupSpec::from_json(header.at("group"));
    GridSpec grid(group, header.at("half_width").get<double>(),
                  header.at("points_per_axis").get<std::vector<int>>());
    GridFunction f(grid);
    for (auto& v : f.values) {
        double re, im;
        is.read(reinterpret_cast<char*>(&re), 8);
        is.read(reinterpret_cast<char*>(&im), 8);
        v = cplx(re, im);
    }
    if (!is) throw ConfigError("truncated .gfn payload: " + path);
    return f;
}

/// Deterministic numeric formatting for report files: shortest exact
/// round-trip representation via %.17g.
inline std::string fmt_g17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    for (size_t i = 0; i < header.size(); ++i)
        os << (i ? "," : "") << header[i];
    os << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << fmt_g17(row[i]);
        os << "\n";
    }
}

/// Cache directory from CARNOT_CACHE, empty string if caching disabled.
inline std::string cache_dir() {
    const char* env = std::getenv("CARNOT_CACHE");
    if (!env || !*env) return "";
    std::filesystem::create_directories(env);
    return env;
}

inline bool cache_load(const std::string& key, GridFunction& out) {
    std::string dir = cache_dir();
    if (dir.empty()) return false;
    std::filesystem::path p = std::filesystem::path(dir) / (key + ".gfn");
    if (!std::filesystem::exists(p)) return false;
    out = load_gfn(p.string());
    return true;
}

inline void cache_store(const std::string& key, const GridFunction& f) {
    std::string dir = cache_dir();
    if (dir.empty()) return;
    std::filesystem::path p = std::filesystem::path(dir) / (key + ".gfn");
    save_gfn(p.string(), f);
}

} // namespace carnot

#endif
