#include "translev/multi_index.hpp"

#include <algorithm>
#include <mutex>

#include "translev/errors.hpp"

namespace translev {

int MultiIndex::degree() const {
  int s = 0;
  for (int e : entries) s += e;
  return s;
}

std::size_t simplex_count(int dim, int max_degree) {
  // C(N+d, d) by incremental products, exact for desk-scale sizes.
  std::size_t c = 1;
  for (int i = 1; i <= dim; ++i) {
    c = c * static_cast<std::size_t>(max_degree + i) / static_cast<std::size_t>(i);
  }
  return c;
}

namespace {

void enumerate_shell(int dim, int shell, std::vector<int>& cur,
                     std::vector<MultiIndex>& out) {
  const int pos = static_cast<int>(cur.size());
  if (pos == dim - 1) {
    cur.push_back(shell);
    out.push_back(MultiIndex{cur});
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= shell; ++v) {
    cur.push_back(v);
    enumerate_shell(dim, shell - v, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices(int dim, int max_degree) {
  if (dim < 1) throw_invalid("multi_indices: dim must be >= 1");
  if (max_degree < 0) throw_invalid("multi_indices: max_degree must be >= 0");
  std::vector<MultiIndex> out;
  out.reserve(simplex_count(dim, max_degree));
  std::vector<int> cur;
  for (int shell = 0; shell <= max_degree; ++shell) {
    enumerate_shell(dim, shell, cur, out);
  }
  return out;
}

Basis::Basis(int dim, int max_degree)
    : dim_(dim), max_degree_(max_degree), indices_(multi_indices(dim, max_degree)) {
  if (dim > 8) throw_unsupported("Basis: dim > 8 not supported");
  if (max_degree > 255) throw_unsupported("Basis: max_degree > 255 not supported");
  degrees_.reserve(indices_.size());
  weights_.reserve(indices_.size());
  full_positions_.reserve(indices_.size());
  full_grid_size_ = 1;
  for (int k = 0; k < dim_; ++k) full_grid_size_ *= static_cast<std::size_t>(max_degree_ + 1);
  lookup_.reserve(indices_.size() * 2);
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    const MultiIndex& n = indices_[k];
    degrees_.push_back(n.degree());
    weights_.push_back(static_cast<double>(2 * degrees_.back() + dim_));
    std::size_t pos = 0;
    for (int i = 0; i < dim_; ++i) {
      pos = pos * static_cast<std::size_t>(max_degree_ + 1) + static_cast<std::size_t>(n.entries[i]);
    }
    full_positions_.push_back(pos);
    lookup_.emplace(pack(n), k);
  }
}

std::uint64_t Basis::pack(const MultiIndex& n) const {
  std::uint64_t key = 0;
  for (int i = 0; i < dim_; ++i) {
    key = (key << 8) | static_cast<std::uint64_t>(n.entries[i] & 0xff);
  }
  return key;
}

std::ptrdiff_t Basis::find(const MultiIndex& n) const {
  if (n.dim() != dim_) throw_invalid("Basis::find: dimension mismatch");
  int deg = 0;
  for (int e : n.entries) {
    if (e < 0) return -1;
    deg += e;
  }
  if (deg > max_degree_) return -1;
  auto it = lookup_.find(pack(n));
  return it == lookup_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::ptrdiff_t Basis::neighbor(std::size_t k, int axis, int delta) const {
  MultiIndex n = indices_[k];
  n.entries[axis] += delta;
  if (n.entries[axis] < 0) return -1;
  if (degrees_[k] + delta > max_degree_) return -1;
  auto it = lookup_.find(pack(n));
  return it == lookup_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::shared_ptr<const Basis> Basis::get(int dim, int max_degree) {
  static std::mutex mtx;
  static std::unordered_map<std::uint64_t, std::shared_ptr<const Basis>> cache;
  const std::uint64_t key =
      (static_cast<std::uint64_t>(dim) << 32) | static_cast<std::uint64_t>(max_degree);
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto basis = std::make_shared<const Basis>(dim, max_degree);
  cache.emplace(key, basis);
  return basis;
}

}  // namespace translev
