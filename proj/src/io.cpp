#include "corofsi/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "corofsi/errors.hpp"

namespace corofsi {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw SimError("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw SimError("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void le_store(double v, char out[8]) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap64(bits);
    }
    std::memcpy(out, &bits, 8);
}

double le_load(const char in[8]) {
    std::uint64_t bits;
    std::memcpy(&bits, in, 8);
    if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap64(bits);
    }
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace

void write_timeseries(const std::string& path,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out << ',';
        out << columns[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << fmt17(row[i]);
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

void read_timeseries(const std::string& path, std::vector<std::string>& columns,
                     std::vector<std::vector<double>>& rows) {
    std::ifstream in(path);
    if (!in) throw SimError("cannot open " + path);
    columns.clear();
    rows.clear();
    std::string line;
    if (!std::getline(in, line)) throw SimError("empty timeseries file " + path);
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) columns.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            // strtod handles denormals without throwing
            row.push_back(std::strtod(cell.c_str(), nullptr));
        }
        rows.push_back(std::move(row));
    }
}

void write_snapshot(const std::string& path,
                    const std::vector<SnapshotField>& fields, double t) {
    std::ostringstream out;
    for (const auto& f : fields) {
        out << "field " << f.name << ' ' << f.nx << ' ' << f.ny << ' '
            << f.staggering << '\n';
    }
    out << "time " << fmt17(t) << '\n' << '\n';
    for (const auto& f : fields) {
        if (f.data.size() != static_cast<std::size_t>(f.nx) * f.ny)
            throw SimError("snapshot field " + f.name + " has wrong size");
        char buf[8];
        for (double v : f.data) {
            le_store(v, buf);
            out.write(buf, 8);
        }
    }
    atomic_write(path, out.str());
}

void read_snapshot(const std::string& path, std::vector<SnapshotField>& fields,
                   double& t) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError("cannot open " + path);
    fields.clear();
    t = 0.0;
    std::string line;
    bool have_time = false;
    while (std::getline(in, line)) {
        if (line.empty()) break;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "field") {
            SnapshotField f;
            ls >> f.name >> f.nx >> f.ny >> f.staggering;
            if (!ls) throw SimError("malformed field header in " + path);
            fields.push_back(std::move(f));
        } else if (tag == "time") {
            ls >> t;
            have_time = true;
        } else {
            throw SimError("unknown snapshot header line: " + line);
        }
    }
    if (!have_time) throw SimError("snapshot missing time header: " + path);
    for (auto& f : fields) {
        f.data.resize(static_cast<std::size_t>(f.nx) * f.ny);
        std::vector<char> buf(f.data.size() * 8);
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size())
            throw SimError("snapshot truncated: " + path);
        for (std::size_t i = 0; i < f.data.size(); ++i)
            f.data[i] = le_load(buf.data() + 8 * i);
    }
}

void write_text(const std::string& path, const std::string& text) {
    atomic_write(path, text);
}

} // namespace corofsi
