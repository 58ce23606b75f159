#include "vlk/embedstore.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "vlk/error.hpp"

namespace vlk {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> read_ids(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(path + ": cannot open file");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ids.push_back(line);
  }
  // A trailing empty line is the newline after the last id, not an id.
  while (!ids.empty() && ids.back().empty()) ids.pop_back();
  return ids;
}

Emb1Matrix parse_csv_matrix(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  Emb1Matrix m;
  std::string text(bytes.begin(), bytes.end());
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t cols = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, comma - pos);
      char* end = nullptr;
      const float v = std::strtof(cell.c_str(), &end);
      if (cell.empty() || end == cell.c_str() || *end != '\0') {
        throw ParseError(path, line_no, "invalid number \"" + cell + "\"");
      }
      m.values.push_back(v);
      ++cols;
      pos = comma + 1;
    }
    if (m.rows == 0) m.dim = cols;
    if (cols != m.dim) throw ParseError(path, line_no, "row has " + std::to_string(cols) + " values, expected " + std::to_string(m.dim));
    ++m.rows;
  }
  return m;
}

}  // namespace

EmbeddingSet::EmbeddingSet(std::vector<std::string> ids, std::vector<float> values, std::size_t dim, bool normalized)
    : ids_(std::move(ids)), values_(std::move(values)), dim_(dim), normalized_(normalized) {
  if (dim_ == 0) throw Error("embedding dimension must be at least 1");
  if (values_.size() != ids_.size() * dim_) {
    throw Error("embedding row/id count mismatch: " + std::to_string(values_.size() / dim_) + " rows, " +
                std::to_string(ids_.size()) + " ids");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error("non-finite value in row " + std::to_string(i / dim_) + " (" + ids_[i / dim_] + ")");
    }
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw Error("duplicate embedding id \"" + ids_[i] + "\"");
  }
}

std::ptrdiff_t EmbeddingSet::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::span<const float> EmbeddingSet::row(const std::string& id) const {
  const auto i = find(id);
  if (i < 0) throw Error("unknown embedding id \"" + id + "\"");
  return row(static_cast<std::size_t>(i));
}

std::vector<std::uint8_t> encode_emb1(std::size_t rows, std::size_t dim, std::span<const float> values) {
  if (rows > UINT32_MAX || dim > UINT32_MAX) throw Error("EMB1 dimensions exceed u32");
  std::vector<std::uint8_t> out{'E', 'M', 'B', '1'};
  out.reserve(12 + values.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(rows));
  put_u32(out, static_cast<std::uint32_t>(dim));
  for (float v : values) put_u32(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

Emb1Matrix decode_emb1(std::span<const std::uint8_t> bytes, const std::string& source) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "EMB1", 4) != 0) throw Error(source + ": bad magic (expected EMB1)");
  Emb1Matrix m;
  m.rows = get_u32(bytes.data() + 4);
  m.dim = get_u32(bytes.data() + 8);
  const std::size_t expected = 12 + m.rows * m.dim * 4;
  if (bytes.size() < expected) throw Error(source + ": truncated payload");
  if (bytes.size() > expected) throw Error(source + ": trailing bytes after payload");
  m.values.resize(m.rows * m.dim);
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = std::bit_cast<float>(get_u32(bytes.data() + 12 + 4 * i));
  return m;
}

Emb1Matrix load_matrix(const std::string& matrix_path) {
  const auto bytes = read_bytes(matrix_path);
  const bool has_magic = bytes.size() >= 4 && std::memcmp(bytes.data(), "EMB1", 4) == 0;
  const bool is_csv = matrix_path.size() >= 4 && matrix_path.compare(matrix_path.size() - 4, 4, ".csv") == 0;
  if (!has_magic && is_csv) return parse_csv_matrix(bytes, matrix_path);
  return decode_emb1(bytes, matrix_path);
}

EmbeddingSet load_embeddings(const std::string& matrix_path, const std::string& ids_path) {
  Emb1Matrix m = load_matrix(matrix_path);
  auto ids = read_ids(ids_path);
  if (ids.size() != m.rows) {
    throw Error(matrix_path + ": row/id count mismatch (" + std::to_string(m.rows) + " rows, " +
                std::to_string(ids.size()) + " ids in " + ids_path + ")");
  }
  try {
    return EmbeddingSet(std::move(ids), std::move(m.values), m.dim == 0 ? 1 : m.dim);
  } catch (const Error& e) {
    throw Error(matrix_path + ": " + e.what());
  }
}

void save_embeddings(const EmbeddingSet& set, const std::string& matrix_path, const std::string& ids_path) {
  const auto bytes = encode_emb1(set.rows(), set.dim(), set.values());
  std::ofstream out(matrix_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(matrix_path + ": cannot write file");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  std::ofstream ids(ids_path, std::ios::binary | std::ios::trunc);
  if (!ids) throw Error(ids_path + ": cannot write file");
  for (const auto& id : set.ids()) ids << id << '\n';
}

double dot(std::span<const float> a, std::span<const float> b) {
  // Four independent accumulators; the summation order is fixed, so every
  // caller sees bit-identical scores for the same pair.
  const std::size_t n = a.size();
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * b[i];
    s1 += static_cast<double>(a[i + 1]) * b[i + 1];
    s2 += static_cast<double>(a[i + 2]) * b[i + 2];
    s3 += static_cast<double>(a[i + 3]) * b[i + 3];
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * b[i];
  return (s0 + s1) + (s2 + s3);
}

double norm(std::span<const float> a) { return std::sqrt(dot(a, a)); }

double cosine(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw Error("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  const double na = norm(a), nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw Error("cosine: zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

EmbeddingSet l2_normalize(const EmbeddingSet& set) {
  std::vector<float> values(set.values());
  const std::size_t d = set.dim();
  for (std::size_t r = 0; r < set.rows(); ++r) {
    const double n = norm(set.row(r));
    if (n == 0.0) throw Error("zero-norm row " + std::to_string(r) + " (" + set.ids()[r] + ")");
    for (std::size_t c = 0; c < d; ++c) values[r * d + c] = static_cast<float>(values[r * d + c] / n);
  }
  return EmbeddingSet(set.ids(), std::move(values), d, true);
}

}  // namespace vlk
