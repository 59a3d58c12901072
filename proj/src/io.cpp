#include "tsi/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tsi {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_field_csv(std::ostream& out, const GridFieldd& field) {
  const auto& d = field.domain();
  out << "domain: " << format_number(d.lower[0]) << ' ' << format_number(d.upper[0]);
  if (field.dim() == 2) out << ' ' << format_number(d.lower[1]) << ' ' << format_number(d.upper[1]);
  out << "; cells: " << field.cells()[0];
  if (field.dim() == 2) out << ' ' << field.cells()[1];
  out << '\n';
  for (int j = 0; j < field.nodes(1); ++j) {
    for (int i = 0; i < field.nodes(0); ++i) {
      if (i > 0) out << ',';
      out << format_number(field.value(i, j));
    }
    out << '\n';
  }
}

namespace {

std::vector<double> parse_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, sep)) {
    if (token.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (token.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(token);
    } catch (const std::logic_error&) {
      throw FormatError("not a number: '" + token + "'");
    }
  }
  return out;
}

}  // namespace

GridFieldd read_field_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("field csv: missing header");
  const auto semi = header.find(';');
  if (header.rfind("domain:", 0) != 0 || semi == std::string::npos) throw FormatError("field csv: bad header");
  const auto cells_at = header.find("cells:", semi);
  if (cells_at == std::string::npos) throw FormatError("field csv: header lacks cells");
  const auto bounds = parse_numbers(header.substr(7, semi - 7), ' ');
  const auto counts = parse_numbers(header.substr(cells_at + 6), ' ');
  Domaind domain;
  Cells cells{0, 0};
  if (bounds.size() == 2 && counts.size() == 1) {
    domain = Domaind::interval(bounds[0], bounds[1]);
    cells = {int(counts[0]), 0};
  } else if (bounds.size() == 4 && counts.size() == 2) {
    domain = Domaind::rectangle(bounds[0], bounds[1], bounds[2], bounds[3]);
    cells = {int(counts[0]), int(counts[1])};
  } else {
    throw FormatError("field csv: header dimensions disagree");
  }
  const int nx = cells[0] + 1, ny = cells[1] + 1;
  GridFieldd::Values values(Eigen::Index(nx) * ny);
  std::string line;
  for (int j = 0; j < ny; ++j) {
    if (!std::getline(in, line)) throw FormatError("field csv: too few rows");
    const auto row = parse_numbers(line, ',');
    if (int(row.size()) != nx) throw FormatError("field csv: row " + std::to_string(j) + " has the wrong length");
    for (int i = 0; i < nx; ++i) values[Eigen::Index(j) * nx + i] = row[std::size_t(i)];
  }
  try {
    return GridFieldd(domain, cells, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("field csv: ") + e.what());
  }
}

void save_field_csv(const std::filesystem::path& path, const GridFieldd& field) {
  std::ostringstream out;
  write_field_csv(out, field);
  write_text(path, out.str());
}

GridFieldd load_field_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_field_csv(in);
}

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string token;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token += c;
  }
  if (token.empty()) throw FormatError("pgm: truncated header");
  return token;
}

int pgm_int(std::istream& in) {
  const std::string t = pgm_token(in);
  if (t.find_first_not_of("0123456789") != std::string::npos) throw FormatError("pgm: bad header value '" + t + "'");
  return std::stoi(t);
}

}  // namespace

GridFieldd read_pgm(std::istream& in) {
  const std::string magic = pgm_token(in);
  if (magic != "P2" && magic != "P5") throw FormatError("pgm: unsupported magic '" + magic + "'");
  const int width = pgm_int(in), height = pgm_int(in), maxval = pgm_int(in);
  if (width < 2 || height < 2) throw FormatError("pgm: image must be at least 2x2");
  if (maxval < 1 || maxval > 65535) throw FormatError("pgm: maxval out of range");

  GridFieldd::Values values(Eigen::Index(width) * height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      int v = 0;
      if (magic == "P2") {
        if (!(in >> v)) throw FormatError("pgm: truncated pixel data");
      } else if (maxval < 256) {
        const int b = in.get();
        if (b == EOF) throw FormatError("pgm: truncated pixel data");
        v = b;
      } else {
        const int hi = in.get(), lo = in.get();
        if (lo == EOF) throw FormatError("pgm: truncated pixel data");
        v = hi * 256 + lo;
      }
      if (v < 0 || v > maxval) throw FormatError("pgm: pixel exceeds maxval");
      values[Eigen::Index(height - 1 - r) * width + c] = double(v) / double(maxval);
    }
  }
  return GridFieldd(Domaind::rectangle(0.0, 1.0, 0.0, 1.0), Cells{width - 1, height - 1}, std::move(values));
}

GridFieldd load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_pgm(in);
}

void write_pgm(std::ostream& out, const GridFieldd& field, bool binary) {
  if (field.dim() != 2) throw std::invalid_argument("write_pgm: field must be 2D");
  const int width = field.nodes(0), height = field.nodes(1);
  out << (binary ? "P5" : "P2") << '\n' << width << ' ' << height << "\n255\n";
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const double v = std::clamp(field.value(c, height - 1 - r), 0.0, 1.0);
      const int level = int(std::lround(v * 255.0));
      if (binary) out.put(char(level));
      else out << level << (c + 1 == width ? '\n' : ' ');
    }
  }
}

void save_pgm(const std::filesystem::path& path, const GridFieldd& field, bool binary) {
  std::ostringstream out;
  write_pgm(out, field, binary);
  write_text(path, out.str());
}

void write_checkpoint(std::ostream& out, const TransformTabled& table) {
  table.for_each_free([&](Eigen::Index k, Eigen::Index v, const Transformd& t) {
    out << k << ',' << v << ',' << to_csv_line(t) << '\n';
  });
}

TransformTabled read_checkpoint(std::istream& in, const TransformTabled& shape) {
  TransformTabled table = shape;
  std::string line;
  int filled = 0, expected = 0;
  shape.for_each_free([&](Eigen::Index, Eigen::Index, const Transformd&) { ++expected; });
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto a = line.find(','), b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) throw FormatError("checkpoint: malformed line");
    Eigen::Index k = 0, v = 0;
    try {
      k = std::stol(line.substr(0, a));
      v = std::stol(line.substr(a + 1, b - a - 1));
    } catch (const std::logic_error&) {
      throw FormatError("checkpoint: bad node index");
    }
    if (k < 0 || k >= table.size() || v < 0 || v >= Eigen::Index(table.row(k).transforms.size()) || !table.is_free(k, v))
      throw FormatError("checkpoint: node index outside the table");
    try {
      table.set(k, v, from_csv_line(line.substr(b + 1), table.row(k).transforms[std::size_t(v)]));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("checkpoint: ") + e.what());
    }
    ++filled;
  }
  if (filled != expected) throw FormatError("checkpoint: expected " + std::to_string(expected) + " transforms");
  return table;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) { return fnv1a(read_text(path)); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(text.data(), std::streamsize(text.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace tsi
