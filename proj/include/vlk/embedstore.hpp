#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace vlk {

/// Row-major float32 matrix keyed by ad id.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  /// Throws Error if ids/rows disagree, dim is 0, or a value is non-finite.
  EmbeddingSet(std::vector<std::string> ids, std::vector<float> values, std::size_t dim, bool normalized = false);

  std::size_t rows() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  bool normalized() const { return normalized_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<float>& values() const { return values_; }

  std::span<const float> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  /// Row index of an ad id, or -1.
  std::ptrdiff_t find(const std::string& id) const;
  std::span<const float> row(const std::string& id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<float> values_;
  std::size_t dim_ = 0;
  bool normalized_ = false;
  std::unordered_map<std::string, std::size_t> index_;
};

/// EMB1: "EMB1", u32 rows, u32 dim (little-endian), rows*dim f32 LE. Files that
/// do not start with the magic and end in ".csv" are read as CSV rows.
EmbeddingSet load_embeddings(const std::string& matrix_path, const std::string& ids_path);
void save_embeddings(const EmbeddingSet& set, const std::string& matrix_path, const std::string& ids_path);

std::vector<std::uint8_t> encode_emb1(std::size_t rows, std::size_t dim, std::span<const float> values);
/// Returns (rows, dim, values). Throws Error on bad magic or truncation.
struct Emb1Matrix {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<float> values;
};
Emb1Matrix decode_emb1(std::span<const std::uint8_t> bytes, const std::string& source = "<memory>");

/// Matrix only (EMB1 or CSV by the same rule as load_embeddings).
Emb1Matrix load_matrix(const std::string& matrix_path);

/// Divides each row by its L2 norm; throws Error naming the first zero row.
EmbeddingSet l2_normalize(const EmbeddingSet& set);

/// Dot product with 64-bit accumulation.
double dot(std::span<const float> a, std::span<const float> b);
double norm(std::span<const float> a);

/// dot(a,b)/(|a||b|) clamped to [-1,1]. Throws Error on dim mismatch or zero
/// vectors.
double cosine(std::span<const float> a, std::span<const float> b);

}  // namespace vlk
