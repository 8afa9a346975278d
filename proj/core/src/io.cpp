#include "tomotv/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tomotv {

static_assert(std::endian::native == std::endian::little,
              "grid payloads are little-endian");

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void save_grid(const std::string& path, const GridFile& gf) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("save_grid: cannot open " + path);
    f << "PFG1\n";
    f << "kind " << gf.kind << '\n';
    f << "rows " << gf.grid.rows() << '\n';
    f << "cols " << gf.grid.cols() << '\n';
    f << "spacing1 " << format_double(gf.spacing1) << '\n';
    f << "spacing2 " << format_double(gf.spacing2) << '\n';
    f << "end\n";
    f.write(reinterpret_cast<const char*>(gf.grid.data()),
            static_cast<std::streamsize>(gf.grid.size() * sizeof(double)));
    if (!f) throw std::runtime_error("save_grid: write failed for " + path);
}

GridFile load_grid(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_grid: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || trim(line) != "PFG1")
        throw std::runtime_error("load_grid: bad magic in " + path);
    GridFile gf;
    int rows = 0, cols = 0;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line == "end") break;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "kind")
            ss >> gf.kind;
        else if (key == "rows")
            ss >> rows;
        else if (key == "cols")
            ss >> cols;
        else if (key == "spacing1")
            ss >> gf.spacing1;
        else if (key == "spacing2")
            ss >> gf.spacing2;
        else
            throw std::runtime_error("load_grid: unknown header key '" + key + "'");
        if (ss.fail()) throw std::runtime_error("load_grid: bad header line '" + line + "'");
    }
    if (rows < 1 || cols < 1)
        throw std::runtime_error("load_grid: missing dimensions in " + path);
    gf.grid = Grid2D(rows, cols);
    f.read(reinterpret_cast<char*>(gf.grid.data()),
           static_cast<std::streamsize>(gf.grid.size() * sizeof(double)));
    if (!f) throw std::runtime_error("load_grid: truncated payload in " + path);
    return gf;
}

void save_pgm16(const std::string& path, const Grid2D& grid) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("save_pgm16: cannot open " + path);
    const double lo = min_value(grid);
    const double hi = max_value(grid);
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    f << "P5\n" << grid.cols() << ' ' << grid.rows() << "\n65535\n";
    for (int i = 0; i < grid.rows(); ++i) {
        for (int j = 0; j < grid.cols(); ++j) {
            const auto v = static_cast<std::uint16_t>(
                std::clamp((grid(i, j) - lo) * scale, 0.0, 65535.0));
            const char bytes[2] = {static_cast<char>(v >> 8),
                                   static_cast<char>(v & 0xFF)};
            f.write(bytes, 2);
        }
    }
    if (!f) throw std::runtime_error("save_pgm16: write failed for " + path);
}

KeyValueMap read_key_value_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_key_value_file: cannot open " + path);
    KeyValueMap kv;
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("read_key_value_file: bad line '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("read_key_value_file: empty key in '" + line + "'");
        kv[key] = value;
    }
    return kv;
}

void write_key_value_file(const std::string& path, const KeyValueMap& kv,
                          const std::string& header_comment) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("write_key_value_file: cannot open " + path);
    if (!header_comment.empty()) f << "# " << header_comment << '\n';
    for (const auto& [key, value] : kv) f << key << " = " << value << '\n';
    if (!f) throw std::runtime_error("write_key_value_file: write failed for " + path);
}

} // namespace tomotv
