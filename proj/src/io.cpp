#include "tbar/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tbar/error.hpp"

namespace tbar {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& tok, const std::string& what) {
    double x = 0.0;
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, x);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::Format, what + ": not a number: '" + tok + "'");
    return x;
}

std::int64_t parse_int(const std::string& tok, const std::string& what) {
    std::int64_t x = 0;
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, x);
    if (ec != std::errc() || ptr != end) throw Error(ErrorCode::Format, what + ": not an integer: '" + tok + "'");
    return x;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        double y = 0.0;
        std::from_chars(buf, buf + std::char_traits<char>::length(buf), y);
        if (y == x) break;
    }
    return buf;
}

std::string format_map(const GridMap& u) {
    std::ostringstream out;
    out << "gmap 1 " << u.grid.n << ' ' << u.grid.m << ' ' << target_name(u.target) << ' ' << u.k << '\n';
    char buf[64];
    const int c = u.comps();
    for (std::int64_t v = 0; v < u.size(); ++v) {
        for (int j = 0; j < c; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", u.values[static_cast<std::size_t>(v * c + j)]);
            out << (j ? " " : "") << buf;
        }
        out << '\n';
    }
    return out.str();
}

GridMap parse_map(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw Error(ErrorCode::Format, "empty map file");
    const auto head = split_ws(lines[0]);
    if (head.size() != 6 || head[0] != "gmap" || head[1] != "1")
        throw Error(ErrorCode::Format, "malformed map header: '" + lines[0] + "'");
    const int n = static_cast<int>(parse_int(head[2], "header n"));
    const int m = static_cast<int>(parse_int(head[3], "header m"));
    GridMap u;
    try {
        u.grid = make_grid(n, m);
        u.target = parse_target(head[4]);
    } catch (const Error& e) {
        throw Error(ErrorCode::Format, std::string("malformed map header: ") + e.what());
    }
    u.k = static_cast<int>(parse_int(head[5], "header k"));
    if (u.target == Target::Circle && u.k != 2) throw Error(ErrorCode::Format, "circle maps have k = 2");
    if (u.target == Target::Sphere && u.k != 3) throw Error(ErrorCode::Format, "sphere maps have k = 3");
    if (u.target == Target::Ambient && u.k != 2 && u.k != 3) throw Error(ErrorCode::Format, "ambient maps have k = 2 or 3");
    const std::int64_t expected = u.grid.num_vertices();
    const std::int64_t actual = static_cast<std::int64_t>(lines.size()) - 1;
    if (actual != expected)
        throw Error(ErrorCode::Format, "vertex count mismatch: expected " + std::to_string(expected) + ", found " +
                                           std::to_string(actual));
    const int c = u.comps();
    u.values.reserve(static_cast<std::size_t>(expected * c));
    for (std::int64_t v = 0; v < expected; ++v) {
        const auto toks = split_ws(lines[static_cast<std::size_t>(v + 1)]);
        if (static_cast<int>(toks.size()) != c)
            throw Error(ErrorCode::Format, "vertex " + std::to_string(v) + ": expected " + std::to_string(c) +
                                               " components, found " + std::to_string(toks.size()));
        for (const auto& t : toks) u.values.push_back(parse_double(t, "vertex " + std::to_string(v)));
    }
    if (u.target == Target::Sphere) {
        for (std::int64_t v = 0; v < expected; ++v) {
            const Value x = u.value(v);
            const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
            if (std::abs(r - 1.0) > 1e-9)
                throw Error(ErrorCode::InvalidArgument,
                            "vertex " + std::to_string(v) + ": sphere value has norm " + format_double(r));
        }
    }
    return u;
}

void save_map(const std::string& path, const GridMap& u) { write_file(path, format_map(u)); }

GridMap load_map(const std::string& path) { return parse_map(read_file(path)); }

std::string format_chain(const Chain& c) {
    std::ostringstream out;
    out << "chain 1 " << c.grid.n << ' ' << c.grid.m << ' ' << c.dim << '\n';
    for (const auto& [cell, coef] : c.coeffs) out << cell << ' ' << coef << '\n';
    return out.str();
}

Chain parse_chain(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw Error(ErrorCode::Format, "empty chain file");
    const auto head = split_ws(lines[0]);
    if (head.size() != 5 || head[0] != "chain" || head[1] != "1")
        throw Error(ErrorCode::Format, "malformed chain header: '" + lines[0] + "'");
    Chain c;
    try {
        c.grid = make_grid(static_cast<int>(parse_int(head[2], "header n")), static_cast<int>(parse_int(head[3], "header m")));
    } catch (const Error& e) {
        throw Error(ErrorCode::Format, std::string("malformed chain header: ") + e.what());
    }
    c.dim = static_cast<int>(parse_int(head[4], "header dim"));
    if (c.dim < 0 || c.dim > c.grid.n) throw Error(ErrorCode::Format, "chain dimension out of range");
    const std::int64_t cells = CubicalComplex(c.grid).num_cells(c.dim);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto toks = split_ws(lines[i]);
        if (toks.size() != 2) throw Error(ErrorCode::Format, "chain line " + std::to_string(i + 1) + ": expected 2 fields");
        const std::int64_t cell = parse_int(toks[0], "chain line " + std::to_string(i + 1));
        if (cell < 0 || cell >= cells)
            throw Error(ErrorCode::Format, "chain line " + std::to_string(i + 1) + ": cell index out of range");
        c.add(cell, parse_int(toks[1], "chain line " + std::to_string(i + 1)));
    }
    return c;
}

void save_chain(const std::string& path, const Chain& c) { write_file(path, format_chain(c)); }

Chain load_chain(const std::string& path) { return parse_chain(read_file(path)); }

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": key outside of any section");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": empty key");
        auto& sec = cfg.sections_[section];
        if (sec.count(key))
            throw Error(ErrorCode::Config, "line " + std::to_string(lineno) + ": duplicate key " + section + "." + key);
        sec[key] = ConfigEntry{trim(line.substr(eq + 1)), lineno};
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    try {
        return parse(read_file(path));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw Error(ErrorCode::Config, path + ": " + e.what());
        throw;
    }
}

const ConfigEntry* Config::find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
    const ConfigEntry* e = find(section, key);
    return e ? e->value : fallback;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key, std::int64_t fallback) const {
    const ConfigEntry* e = find(section, key);
    if (!e) return fallback;
    try {
        return parse_int(e->value, section + "." + key);
    } catch (const Error& err) {
        throw Error(ErrorCode::Config, "line " + std::to_string(e->line) + ": " + err.what());
    }
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
    const ConfigEntry* e = find(section, key);
    if (!e) return fallback;
    try {
        return parse_double(e->value, section + "." + key);
    } catch (const Error& err) {
        throw Error(ErrorCode::Config, "line " + std::to_string(e->line) + ": " + err.what());
    }
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
    const ConfigEntry* e = find(section, key);
    if (!e) return fallback;
    std::string s = e->value;
    for (char& ch : s)
        if (ch == ',') ch = ' ';
    std::vector<double> out;
    try {
        for (const auto& t : split_ws(s)) out.push_back(parse_double(t, section + "." + key));
    } catch (const Error& err) {
        throw Error(ErrorCode::Config, "line " + std::to_string(e->line) + ": " + err.what());
    }
    if (out.empty()) throw Error(ErrorCode::Config, "line " + std::to_string(e->line) + ": " + section + "." + key + " is empty");
    return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = ConfigEntry{value, 0};
}

std::string Config::canonical() const {
    std::ostringstream out;
    for (const auto& [name, sec] : sections_) {
        out << '[' << name << "]\n";
        for (const auto& [k, e] : sec) out << k << '=' << e.value << '\n';
    }
    return out.str();
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header, std::string prefix_value)
    : out_(path, std::ios::binary), columns_(header.size()), prefix_(std::move(prefix_value)) {
    if (!out_) throw Error(ErrorCode::Io, "cannot write " + path);
    out_ << "config_hash";
    for (const auto& h : header) out_ << ',' << h;
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error(ErrorCode::InvalidArgument, "CSV row has the wrong number of cells");
    out_ << prefix_;
    for (const auto& c : cells) out_ << ',' << c;
    out_ << '\n';
    out_.flush();
    ++rows_;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

} // namespace tbar
