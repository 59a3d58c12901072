#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tsi/field.hpp"
#include "tsi/reconstruct.hpp"

namespace tsi {

/// Thrown for unreadable or malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `%.12g`, the precision of every CSV this library writes.
std::string format_number(double v);

/// Header `domain: x0 x1 [y0 y1]; cells: nx [ny]`, then one line of node
/// values per grid line (x runs along a line).
void write_field_csv(std::ostream& out, const GridFieldd& field);
GridFieldd read_field_csv(std::istream& in);
void save_field_csv(const std::filesystem::path& path, const GridFieldd& field);
GridFieldd load_field_csv(const std::filesystem::path& path);

/// P2 or P5 grayscale image as a field on the unit square with one node per
/// pixel, values scaled to [0, 1]. The first image row is y = 1.
GridFieldd read_pgm(std::istream& in);
GridFieldd load_pgm(const std::filesystem::path& path);

/// Writes a 2D field as 8-bit P5 (binary) or P2; values are clamped to [0, 1].
void write_pgm(std::ostream& out, const GridFieldd& field, bool binary = true);
void save_pgm(const std::filesystem::path& path, const GridFieldd& field, bool binary = true);

/// One line `outer_index,inner_index,family,coefficients...` per free node
/// transform. Reading needs a table of the same shape to fill.
void write_checkpoint(std::ostream& out, const TransformTabled& table);
TransformTabled read_checkpoint(std::istream& in, const TransformTabled& shape);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace tsi
