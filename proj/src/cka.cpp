#include "vlk/cka.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "vlk/embedstore.hpp"
#include "vlk/error.hpp"
#include "vlk/parallel.hpp"

namespace vlk::cka {

namespace {

using Dense = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const Dense> view(const Matrix& m) {
  return Eigen::Map<const Dense>(m.values.data(), static_cast<Eigen::Index>(m.rows), static_cast<Eigen::Index>(m.cols));
}

void check_pair(const Matrix& x, const Matrix& y) {
  if (x.rows != y.rows) {
    throw Error("CKA: sample counts differ (" + std::to_string(x.rows) + " vs " + std::to_string(y.rows) + ")");
  }
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Dense squared_distances(const Matrix& x) {
  const auto n = static_cast<Eigen::Index>(x.rows);
  const auto m = view(x);
  Dense d2 = Dense::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (m.row(i) - m.row(j)).squaredNorm();
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

double median_of_upper(const Dense& d2) {
  std::vector<double> d;
  const auto n = d2.rows();
  d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) d.push_back(std::sqrt(d2(i, j)));
  }
  std::sort(d.begin(), d.end());
  const std::size_t h = d.size() / 2;
  return d.size() % 2 == 1 ? d[h] : 0.5 * (d[h - 1] + d[h]);
}

Dense centered_rbf(const Matrix& x, double sigma_frac) {
  const Dense d2 = squared_distances(x);
  const double sigma = sigma_frac * median_of_upper(d2);
  if (!(sigma > 0.0)) throw Error("RBF CKA: median pairwise distance is zero (all rows identical)");
  Dense k = (-d2.array() / (2.0 * sigma * sigma)).exp().matrix();
  const Eigen::VectorXd row_mean = k.rowwise().mean();
  const Eigen::RowVectorXd col_mean = k.colwise().mean();
  const double grand = k.mean();
  k.colwise() -= row_mean;
  k.rowwise() -= col_mean;
  k.array() += grand;
  return k;
}

}  // namespace

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> v) : rows(r), cols(c), values(std::move(v)) {
  if (r < 2) throw Error("representation matrix needs at least 2 samples");
  if (c == 0) throw Error("representation matrix has no columns");
  if (values.size() != r * c) throw Error("representation matrix size does not match its shape");
  for (double x : values) {
    if (!std::isfinite(x)) throw Error("representation matrix has a non-finite value");
  }
}

double linear_cka(const Matrix& x, const Matrix& y) {
  check_pair(x, y);
  const Dense xc = view(x).rowwise() - view(x).colwise().mean();
  const Dense yc = view(y).rowwise() - view(y).colwise().mean();
  const double num = (yc.transpose() * xc).squaredNorm();
  const double den = (xc.transpose() * xc).norm() * (yc.transpose() * yc).norm();
  if (!(den > 0.0)) throw Error("linear CKA: zero denominator (constant matrix)");
  return clamp01(num / den);
}

double rbf_cka(const Matrix& x, const Matrix& y, double sigma_frac) {
  check_pair(x, y);
  if (!(sigma_frac > 0.0)) throw Error("sigma_frac must be positive");
  const Dense kc = centered_rbf(x, sigma_frac);
  const Dense lc = centered_rbf(y, sigma_frac);
  const double den = kc.norm() * lc.norm();
  if (!(den > 0.0)) throw Error("RBF CKA: zero denominator");
  return clamp01(kc.cwiseProduct(lc).sum() / den);
}

double median_pairwise_distance(const Matrix& x) { return median_of_upper(squared_distances(x)); }

Grid cka_matrix(const std::vector<Matrix>& layers_a, const std::vector<Matrix>& layers_b, Kernel kernel,
                double sigma_frac, unsigned threads) {
  if (layers_a.empty() || layers_b.empty()) throw Error("CKA grid needs at least one layer on each side");
  const std::size_t n = layers_a.front().rows;
  for (const auto* list : {&layers_a, &layers_b}) {
    for (const auto& m : *list) {
      if (m.rows != n) throw Error("CKA grid: layers have inconsistent sample counts");
    }
  }
  Grid g;
  g.rows = layers_a.size();
  g.cols = layers_b.size();
  g.values.assign(g.rows * g.cols, 0.0);
  parallel_for(g.values.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t cell = begin; cell < end; ++cell) {
      const auto& a = layers_a[cell / g.cols];
      const auto& b = layers_b[cell % g.cols];
      g.values[cell] = kernel == Kernel::linear ? linear_cka(a, b) : rbf_cka(a, b, sigma_frac);
    }
  });
  return g;
}

std::vector<Matrix> load_layers(const std::string& manifest_path) {
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw Error(manifest_path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::vector<std::string> paths;
  try {
    paths = nlohmann::json::parse(buf.str()).at("layers").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(manifest_path + ": " + e.what());
  }
  const auto base = std::filesystem::path(manifest_path).parent_path();
  std::vector<Matrix> layers;
  for (const auto& p : paths) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = base / path;
    const auto m = load_matrix(path.string());
    try {
      layers.emplace_back(m.rows, m.dim, std::vector<double>(m.values.begin(), m.values.end()));
    } catch (const Error& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  return layers;
}

std::string grid_to_csv(const Grid& grid) {
  std::ostringstream out;
  out << "layer";
  for (std::size_t c = 0; c < grid.cols; ++c) out << ",b" << c;
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < grid.rows; ++r) {
    out << 'a' << r;
    for (std::size_t c = 0; c < grid.cols; ++c) {
      std::snprintf(buf, sizeof buf, "%.6f", grid(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::string grid_to_json(const Grid& grid, Kernel kernel) {
  nlohmann::ordered_json j;
  j["kernel"] = kernel == Kernel::linear ? "linear" : "rbf";
  j["similarity"] = nlohmann::ordered_json::array();
  j["distance"] = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < grid.rows; ++r) {
    std::vector<double> s, d;
    for (std::size_t c = 0; c < grid.cols; ++c) {
      s.push_back(grid(r, c));
      d.push_back(1.0 - grid(r, c));
    }
    j["similarity"].push_back(s);
    j["distance"].push_back(d);
  }
  j["distance_definition"] = "CKA distance = 1 - CKA similarity";
  return j.dump(2) + "\n";
}

Kernel parse_kernel(const std::string& name) {
  if (name == "linear") return Kernel::linear;
  if (name == "rbf") return Kernel::rbf;
  throw Error("unknown kernel \"" + name + "\" (expected linear or rbf)");
}

}  // namespace vlk::cka
