#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "vlk/error.hpp"
#include "vlk/retrieval.hpp"

namespace vlk::retrieval {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double squared_distance(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

std::vector<float> seed_plus_plus(const EmbeddingSet& x, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = x.rows(), d = x.dim();
  std::vector<float> centroids;
  centroids.reserve(k * d);
  std::vector<bool> chosen(n, false);
  auto take = [&](std::size_t r) {
    chosen[r] = true;
    const auto row = x.row(r);
    centroids.insert(centroids.end(), row.begin(), row.end());
  };
  take(static_cast<std::size_t>(rng() % n));

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    const std::span<const float> last(centroids.data() + (c - 1) * d, d);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      nearest[r] = std::min(nearest[r], squared_distance(x.row(r), last));
      total += nearest[r];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        if (nearest[r] <= 0.0) continue;
        acc += nearest[r];
        pick = r;
        if (acc > target) break;
      }
    }
    if (pick == n) {
      // Every remaining point coincides with a centroid: first unchosen row.
      pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), false) - chosen.begin());
    }
    take(pick);
  }
  return centroids;
}

}  // namespace

KMeansResult spherical_kmeans(const EmbeddingSet& x, const KMeansConfig& cfg) {
  const std::size_t n = x.rows(), d = x.dim(), k = cfg.k;
  if (k == 0) throw Error("k-means needs at least one cluster");
  if (k > n) throw Error("k-means: " + std::to_string(k) + " clusters exceed " + std::to_string(n) + " rows");

  std::mt19937_64 rng(cfg.seed);
  KMeansResult res;
  res.centroids = seed_plus_plus(x, k, rng);
  res.assignment.assign(n, 0);

  auto centroid = [&](std::size_t c) { return std::span<const float>(res.centroids.data() + c * d, d); };

  for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
    // Assignment: highest cosine, lowest cluster index on ties.
    double inertia = 0.0;
    std::vector<double> best_score(n);
    for (std::size_t r = 0; r < n; ++r) {
      std::size_t best = 0;
      double best_dot = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double s = dot(x.row(r), centroid(c));
        if (s > best_dot) {
          best_dot = s;
          best = c;
        }
      }
      res.assignment[r] = static_cast<std::uint32_t>(best);
      best_score[r] = best_dot;
      inertia += squared_distance(x.row(r), centroid(best));
    }
    res.inertia.push_back(inertia);
    res.iterations = iter + 1;

    // Update: normalized mean of members.
    std::vector<double> sums(k * d, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t r = 0; r < n; ++r) {
      const auto c = res.assignment[r];
      ++counts[c];
      const auto row = x.row(r);
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += row[j];
    }
    std::vector<float> next(k * d);
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      double len = 0.0;
      for (std::size_t j = 0; j < d; ++j) len += sums[c * d + j] * sums[c * d + j];
      len = std::sqrt(len);
      if (counts[c] == 0 || len == 0.0) {
        // Empty (or degenerate) cluster: restart it at the worst-served row.
        std::size_t worst = 0;
        double worst_score = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < n; ++r) {
          if (!taken[r] && best_score[r] < worst_score) {
            worst_score = best_score[r];
            worst = r;
          }
        }
        taken[worst] = true;
        const auto row = x.row(worst);
        std::copy(row.begin(), row.end(), next.begin() + static_cast<std::ptrdiff_t>(c * d));
        continue;
      }
      for (std::size_t j = 0; j < d; ++j) next[c * d + j] = static_cast<float>(sums[c * d + j] / len);
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(centroid(c), {next.data() + c * d, d})));
    }
    res.centroids = std::move(next);
    if (shift < cfg.tolerance) break;
  }

  // Final assignment against the final centroids.
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t best = 0;
    double best_dot = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      const double s = dot(x.row(r), centroid(c));
      if (s > best_dot) {
        best_dot = s;
        best = c;
      }
    }
    res.assignment[r] = static_cast<std::uint32_t>(best);
  }
  return res;
}

}  // namespace vlk::retrieval
