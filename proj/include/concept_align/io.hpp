#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace concept_align::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

// printf("%.*f") with negative zero printed as zero.
std::string fixed(double value, int decimals);

// Rounds to a fixed number of decimals for JSON emission; never returns -0.
double round_to(double value, int decimals);

// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace concept_align::io
