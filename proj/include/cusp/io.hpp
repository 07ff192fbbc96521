#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cusp/factor_model.hpp"

namespace cusp::io {

// Column negation applies before centering; indices are 1-based.
struct PreprocessSpec {
    bool center = false;
    std::vector<std::size_t> negate_columns;
};

// Comma-delimited UTF-8 file with one header row and numeric cells.
// Throws ParseError naming the offending row and column.
Dataset load_csv(const std::string& path, const PreprocessSpec& preprocess);

// Persists a draw store as delimited text: omega.txt (one flattened upper
// triangle per line), scalars.txt (iteration, H*, H), and manifest.txt
// (key=value plus a config hash). Values round-trip bit-exactly.
void write_draws(const DrawStore& store, const std::string& dir);
DrawStore read_draws(const std::string& dir);

// FNV-1a over the canonical key=value serialization.
std::uint64_t manifest_hash(const std::map<std::string, std::string>& manifest);

std::map<std::string, std::string> read_kv(const std::string& path);
void write_kv(const std::string& path, const std::map<std::string, std::string>& kv);

int cli_main(int argc, const char* const* argv);

}  // namespace cusp::io
