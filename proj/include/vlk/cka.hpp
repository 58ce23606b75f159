#pragma once

#include <string>
#include <vector>

namespace vlk::cka {

/// Dense row-major float64 matrix: one row per sample.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, std::vector<double> v);
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

enum class Kernel { linear, rbf };

inline constexpr double kDefaultSigmaFrac = 0.5;

double linear_cka(const Matrix& x, const Matrix& y);
double rbf_cka(const Matrix& x, const Matrix& y, double sigma_frac = kDefaultSigmaFrac);

/// Median of the pairwise Euclidean distances between rows (even counts
/// average the two middle values).
double median_pairwise_distance(const Matrix& x);

struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

Grid cka_matrix(const std::vector<Matrix>& layers_a, const std::vector<Matrix>& layers_b, Kernel kernel,
                double sigma_frac = kDefaultSigmaFrac, unsigned threads = 1);

/// Reads {"layers": [paths...]}; each path is an EMB1 (or CSV) matrix.
/// Relative paths resolve against the manifest's directory.
std::vector<Matrix> load_layers(const std::string& manifest_path);

/// CSV grid of CKA similarity with layer indices as headers.
std::string grid_to_csv(const Grid& grid);
/// {"kernel", "similarity": [[...]], "distance": [[1 - similarity]]}
std::string grid_to_json(const Grid& grid, Kernel kernel);

Kernel parse_kernel(const std::string& name);

}  // namespace vlk::cka
