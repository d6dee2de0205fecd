#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace aaklab {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal representation (17 significant digits max),
/// fixed across platforms and thread counts for reproducible CSV output.
std::string format_double(double v);

std::string format_complex_pair(double re, double im);

/// Writes content atomically-ish (parent directories created first).
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Serialize JSON with 2-space indentation and a trailing newline.
std::string dump_json(const nlohmann::json& j);

}  // namespace aaklab
