#ifndef TRANSLEV_MULTI_INDEX_HPP
#define TRANSLEV_MULTI_INDEX_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

namespace translev {

/// Multi-index n = (n_1,...,n_d) of nonnegative integers.
struct MultiIndex {
  std::vector<int> entries;

  int dim() const { return static_cast<int>(entries.size()); }
  int degree() const;
  bool operator==(const MultiIndex& other) const { return entries == other.entries; }
};

/// All multi-indices of dimension d with total degree <= N, in graded
/// lexicographic order: degree-major, then lexicographic with the leftmost
/// coordinate most significant. The order is total and platform-independent.
std::vector<MultiIndex> multi_indices(int dim, int max_degree);

/// Number of multi-indices with |n| <= N in d variables: C(N+d, d).
std::size_t simplex_count(int dim, int max_degree);

/// Shared enumeration of the truncated index set {|n| <= N} plus lookup
/// tables. Immutable after construction; reps and operators over the same
/// (d, N) share one instance.
class Basis {
 public:
  Basis(int dim, int max_degree);

  int dim() const { return dim_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return indices_.size(); }

  const MultiIndex& index(std::size_t k) const { return indices_[k]; }
  int degree_of(std::size_t k) const { return degrees_[k]; }
  /// The spectral weight 2|n| + d of index k.
  double weight(std::size_t k) const { return weights_[k]; }

  /// Position of a multi-index in the enumeration, or -1 when it lies
  /// outside the truncation (including negative entries).
  std::ptrdiff_t find(const MultiIndex& n) const;
  /// Position of index(k) +/- e_axis, or -1 when outside the truncation.
  std::ptrdiff_t neighbor(std::size_t k, int axis, int delta) const;

  /// Embedding into the full tensor grid {0..N}^d (row-major, axis 0 slowest)
  /// used for per-axis contractions.
  std::size_t full_grid_size() const { return full_grid_size_; }
  std::size_t full_grid_pos(std::size_t k) const { return full_positions_[k]; }

  /// Cached shared instance per (d, N).
  static std::shared_ptr<const Basis> get(int dim, int max_degree);

 private:
  std::uint64_t pack(const MultiIndex& n) const;

  int dim_;
  int max_degree_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degrees_;
  std::vector<double> weights_;
  std::vector<std::size_t> full_positions_;
  std::size_t full_grid_size_;
  std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

}  // namespace translev

#endif
