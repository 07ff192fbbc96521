#include "cusp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cusp/errors.hpp"
#include "cusp/io_format.hpp"

namespace cusp::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError("could not parse number: \"" + s + "\"");
    return v;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, delim)) cells.push_back(cell);
    if (!line.empty() && line.back() == delim) cells.push_back("");
    return cells;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const PreprocessSpec& preprocess) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");

    std::string line;
    if (!std::getline(in, line)) throw ParseError("\"" + path + "\": empty file");
    const std::vector<std::string> header = split_line(strip_cr(line), ',');
    const std::size_t p = header.size();
    if (p == 0) throw ParseError("\"" + path + "\": empty header row");

    std::vector<std::vector<double>> rows;
    std::size_t rownum = 0;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty() && in.eof()) break;
        ++rownum;
        const std::vector<std::string> cells = split_line(line, ',');
        if (cells.size() != p) {
            std::ostringstream msg;
            msg << "\"" << path << "\": row " << rownum << " has " << cells.size()
                << " cells, expected " << p;
            throw ParseError(msg.str());
        }
        std::vector<double> vals(p);
        for (std::size_t j = 0; j < p; ++j) {
            const std::string cell = trimmed(cells[j]);
            if (cell.empty()) {
                std::ostringstream msg;
                msg << "\"" << path << "\": missing value at row " << rownum
                    << ", column \"" << header[j] << "\"";
                throw ParseError(msg.str());
            }
            try {
                vals[j] = parse_double(cell);
            } catch (const ParseError&) {
                std::ostringstream msg;
                msg << "\"" << path << "\": non-numeric cell \"" << cell << "\" at row "
                    << rownum << ", column \"" << header[j] << "\"";
                throw ParseError(msg.str());
            }
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ParseError("\"" + path + "\": no data rows");

    // Validate the preprocessing spec against p.
    std::vector<std::size_t> negate = preprocess.negate_columns;
    std::sort(negate.begin(), negate.end());
    for (std::size_t k = 0; k < negate.size(); ++k) {
        if (negate[k] < 1 || negate[k] > p)
            throw ConfigError("negate column index out of range [1, p]");
        if (k > 0 && negate[k] == negate[k - 1])
            throw ConfigError("duplicate negate column index");
    }

    Dataset data;
    data.y = Matrix(rows.size(), p);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < p; ++j) data.y(i, j) = rows[i][j];

    for (std::size_t idx : preprocess.negate_columns) {
        const std::size_t j = idx - 1;
        for (std::size_t i = 0; i < data.n(); ++i) data.y(i, j) = -data.y(i, j);
    }
    if (preprocess.center) {
        for (std::size_t j = 0; j < p; ++j) {
            double mean = 0.0;
            for (std::size_t i = 0; i < data.n(); ++i) mean += data.y(i, j);
            mean /= static_cast<double>(data.n());
            for (std::size_t i = 0; i < data.n(); ++i) data.y(i, j) -= mean;
        }
    }
    data.provenance.centered = preprocess.center;
    data.provenance.negated_columns = preprocess.negate_columns;
    return data;
}

std::uint64_t manifest_hash(const std::map<std::string, std::string>& manifest) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& [k, v] : manifest) {
        if (k == "config_hash") continue;
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    return h;
}

std::map<std::string, std::string> read_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t rownum = 0;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        ++rownum;
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "\"" << path << "\": line " << rownum << " is not key=value";
            throw ParseError(msg.str());
        }
        kv[trimmed(line.substr(0, eq))] = trimmed(line.substr(eq + 1));
    }
    return kv;
}

void write_kv(const std::string& path, const std::map<std::string, std::string>& kv) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write \"" + path + "\"");
    for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
}

void write_draws(const DrawStore& store, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::map<std::string, std::string> manifest = store.manifest;
    manifest["p"] = std::to_string(store.p);
    manifest["draw_count"] = std::to_string(store.size());
    if (store.manifest.count("draw_count") &&
        store.manifest.at("draw_count") != manifest["draw_count"])
        throw IntegrityError("write_draws: manifest draw count disagrees with store");
    char hashbuf[24];
    std::snprintf(hashbuf, sizeof(hashbuf), "%016llx",
                  static_cast<unsigned long long>(manifest_hash(manifest)));
    manifest["config_hash"] = hashbuf;
    write_kv((fs::path(dir) / "manifest.txt").string(), manifest);

    std::ofstream omega(fs::path(dir) / "omega.txt");
    if (!omega) throw ParseError("cannot write omega.txt");
    for (const auto& draw : store.omega_upper) {
        for (std::size_t k = 0; k < draw.size(); ++k) {
            if (k) omega << ' ';
            omega << format_double(draw[k]);
        }
        omega << '\n';
    }

    std::ofstream scalars(fs::path(dir) / "scalars.txt");
    if (!scalars) throw ParseError("cannot write scalars.txt");
    scalars << "iteration h_star h\n";
    for (std::size_t d = 0; d < store.size(); ++d)
        scalars << store.iteration[d] << ' ' << store.h_star[d] << ' '
                << store.h_trunc[d] << '\n';
}

DrawStore read_draws(const std::string& dir) {
    namespace fs = std::filesystem;
    std::map<std::string, std::string> manifest =
        read_kv((fs::path(dir) / "manifest.txt").string());

    const auto hash_it = manifest.find("config_hash");
    if (hash_it == manifest.end())
        throw IntegrityError("read_draws: manifest lacks config_hash");
    char expect[24];
    std::snprintf(expect, sizeof(expect), "%016llx",
                  static_cast<unsigned long long>(manifest_hash(manifest)));
    if (hash_it->second != expect)
        throw IntegrityError("read_draws: manifest hash mismatch");

    if (!manifest.count("p") || !manifest.count("draw_count"))
        throw IntegrityError("read_draws: manifest lacks p or draw_count");
    const std::size_t p = std::stoull(manifest.at("p"));
    const std::size_t count = std::stoull(manifest.at("draw_count"));
    const std::size_t entries = upper_size(p);

    DrawStore store;
    store.p = p;
    manifest.erase("config_hash");
    store.manifest = std::move(manifest);

    std::ifstream omega(fs::path(dir) / "omega.txt");
    if (!omega) throw IntegrityError("read_draws: omega.txt missing");
    std::string line;
    while (std::getline(omega, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<double> draw;
        draw.reserve(entries);
        std::string tok;
        while (ss >> tok) draw.push_back(parse_double(tok));
        if (draw.size() != entries)
            throw IntegrityError("read_draws: omega.txt row has wrong entry count");
        store.omega_upper.push_back(std::move(draw));
    }
    if (store.omega_upper.size() != count)
        throw IntegrityError("read_draws: omega.txt draw count disagrees with manifest");

    std::ifstream scalars(fs::path(dir) / "scalars.txt");
    if (!scalars) throw IntegrityError("read_draws: scalars.txt missing");
    std::getline(scalars, line);  // header
    while (std::getline(scalars, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::uint64_t iter;
        int hstar, h;
        if (!(ss >> iter >> hstar >> h))
            throw IntegrityError("read_draws: malformed scalars.txt row");
        store.iteration.push_back(iter);
        store.h_star.push_back(hstar);
        store.h_trunc.push_back(h);
    }
    if (store.h_star.size() != count)
        throw IntegrityError("read_draws: scalars.txt row count disagrees with manifest");
    return store;
}

}  // namespace cusp::io
