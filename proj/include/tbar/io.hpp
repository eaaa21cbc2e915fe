#ifndef TBAR_IO_HPP
#define TBAR_IO_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "tbar/cycles.hpp"
#include "tbar/maps.hpp"

namespace tbar {

/// Plain-text map format: header `gmap 1 <n> <m> <target> <k>`, then one vertex per
/// line in vertex-index order (an angle, or k components), 17 significant digits.
/// The grid offset is not stored; loaded maps have zero offset.
std::string format_map(const GridMap& u);
GridMap parse_map(const std::string& text);
void save_map(const std::string& path, const GridMap& u);
GridMap load_map(const std::string& path);

/// Chain format: header `chain 1 <n> <m> <dim>`, then `<cell-index> <coefficient>` lines.
std::string format_chain(const Chain& c);
Chain parse_chain(const std::string& text);
void save_chain(const std::string& path, const Chain& c);
Chain load_chain(const std::string& path);

/// Shortest decimal text that parses back to the same double (up to 17 digits).
std::string format_double(double x);

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t x);

/// Sectioned key=value configuration. `#` starts a comment; `[name]` opens a section.
struct ConfigEntry {
    std::string value;
    int line = 0;
};

class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    /// Comma- or whitespace-separated reals.
    std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                    const std::vector<double>& fallback) const;
    void set(const std::string& section, const std::string& key, const std::string& value);
    /// Canonical text (sorted sections and keys), used for hashing.
    std::string canonical() const;
    const std::map<std::string, std::map<std::string, ConfigEntry>>& sections() const { return sections_; }

private:
    const ConfigEntry* find(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, ConfigEntry>> sections_;
};

/// CSV writer with a header row; every row is prefixed by a fixed first column value.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header, std::string prefix_value);
    void row(const std::vector<std::string>& cells);
    int rows() const { return rows_; }

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::string prefix_;
    int rows_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

} // namespace tbar

#endif
