#include "smoothridge/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace smoothridge {

Adjacency::Adjacency(std::vector<std::vector<int>> neighbors, int lattice_degree)
    : neighbors_(std::move(neighbors)), lattice_degree_(lattice_degree) {
  const int m = size();
  if (lattice_degree_ <= 0)
    for (int j = 0; j < m; ++j) lattice_degree_ = std::max(lattice_degree_, degree(j));
  for (int j = 0; j < m; ++j) {
    for (int k : neighbors_[static_cast<std::size_t>(j)]) {
      if (k < 0 || k >= m || k == j) throw ConfigError("adjacency index out of range");
      const auto& back = neighbors_[static_cast<std::size_t>(k)];
      if (std::find(back.begin(), back.end(), j) == back.end())
        throw ConfigError("adjacency is not symmetric");
    }
  }
}

Adjacency Adjacency::chain(int m) {
  std::vector<std::vector<int>> nb(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    if (j > 0) nb[static_cast<std::size_t>(j)].push_back(j - 1);
    if (j + 1 < m) nb[static_cast<std::size_t>(j)].push_back(j + 1);
  }
  return Adjacency(std::move(nb), 2);
}

Adjacency Adjacency::grid(int rows, int cols) {
  std::vector<std::vector<int>> nb(static_cast<std::size_t>(rows * cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      auto& list = nb[static_cast<std::size_t>(r * cols + c)];
      if (r > 0) list.push_back((r - 1) * cols + c);
      if (c > 0) list.push_back(r * cols + c - 1);
      if (c + 1 < cols) list.push_back(r * cols + c + 1);
      if (r + 1 < rows) list.push_back((r + 1) * cols + c);
    }
  }
  return Adjacency(std::move(nb), 4);
}

std::vector<std::pair<int, int>> Adjacency::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j < size(); ++j)
    for (int k : neighbors(j))
      if (j < k) out.emplace_back(j, k);
  std::sort(out.begin(), out.end());
  return out;
}

bool Adjacency::connected() const {
  if (size() == 0) return true;
  std::vector<bool> seen(static_cast<std::size_t>(size()), false);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = true;
  int count = 1;
  while (!todo.empty()) {
    const int j = todo.front();
    todo.pop();
    for (int k : neighbors(j)) {
      if (!seen[static_cast<std::size_t>(k)]) {
        seen[static_cast<std::size_t>(k)] = true;
        ++count;
        todo.push(k);
      }
    }
  }
  return count == size();
}

Matrix Adjacency::laplacian() const {
  const int m = size();
  Matrix d = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    d(j, j) = degree(j);
    for (int k : neighbors(j)) d(j, k) = -1.0;
  }
  return d;
}

BasisSpec::BasisSpec(Matrix centers, double width, std::vector<Interval> domain,
                     std::vector<int> shape, BasisKind kind)
    : centers_(std::move(centers)),
      width_(width),
      domain_(std::move(domain)),
      shape_(std::move(shape)),
      kind_(kind) {
  if (centers_.rows() < 2) throw ConfigError("basis needs at least 2 centers");
  if (centers_.cols() < 1 || centers_.cols() > 2) throw ConfigError("basis must be 1D or 2D");
  if (!(width_ > 0.0) || !std::isfinite(width_)) throw ConfigError("basis width must be positive");
  if (domain_.size() != static_cast<std::size_t>(centers_.cols()))
    throw ConfigError("basis domain dimension mismatch");
  if (shape_.size() != domain_.size()) throw ConfigError("basis shape dimension mismatch");
  long long total = 1;
  for (int s : shape_) total *= s;
  if (total != centers_.rows()) throw ConfigError("basis shape does not match center count");
  for (Eigen::Index a = 0; a < centers_.rows(); ++a)
    for (Eigen::Index b = a + 1; b < centers_.rows(); ++b)
      if ((centers_.row(a) - centers_.row(b)).squaredNorm() == 0.0)
        throw ConfigError("basis centers must be pairwise distinct");
}

Adjacency BasisSpec::adjacency() const {
  if (dims() == 1) return Adjacency::chain(size());
  return Adjacency::grid(shape_[0], shape_[1]);
}

Matrix build_grid_centers(const std::vector<Interval>& domain, int m_per_dim) {
  if (m_per_dim < 2) throw ConfigError("need at least 2 centers per dimension");
  if (domain.empty() || domain.size() > 2) throw ConfigError("basis must be 1D or 2D");
  auto axis = [&](const Interval& iv) {
    Vector v(m_per_dim);
    for (int k = 0; k < m_per_dim; ++k)
      v(k) = iv.lo + (iv.hi - iv.lo) * static_cast<double>(k) / (m_per_dim - 1);
    v(m_per_dim - 1) = iv.hi;
    return v;
  };
  if (domain.size() == 1) return axis(domain[0]);
  const Vector a = axis(domain[0]);
  const Vector b = axis(domain[1]);
  Matrix c(m_per_dim * m_per_dim, 2);
  for (int i = 0; i < m_per_dim; ++i)
    for (int j = 0; j < m_per_dim; ++j) c.row(i * m_per_dim + j) << a(i), b(j);
  return c;
}

double rbf_width(const Matrix& centers, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("width scale must be positive");
  double spacing = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < centers.rows(); ++a)
    for (Eigen::Index b = a + 1; b < centers.rows(); ++b) {
      const double d = (centers.row(a) - centers.row(b)).norm();
      if (d > 0.0) spacing = std::min(spacing, d);
    }
  if (!std::isfinite(spacing)) throw ConfigError("need at least two distinct centers");
  return scale * spacing;
}

BasisSpec make_grid_basis(const std::vector<Interval>& domain, int m_per_dim, double width_scale) {
  for (const auto& iv : domain)
    if (!(iv.hi > iv.lo)) throw ConfigError("basis domain must have positive length");
  Matrix centers = build_grid_centers(domain, m_per_dim);
  const double width = rbf_width(centers, width_scale);
  std::vector<int> shape(domain.size(), m_per_dim);
  return BasisSpec(std::move(centers), width, domain, std::move(shape));
}

int default_centers_per_dim(std::size_t dims) { return dims == 1 ? 30 : 10; }

Matrix evaluate_basis(const BasisSpec& spec, const Matrix& xs) {
  if (static_cast<std::size_t>(xs.cols()) != spec.dims())
    throw ConfigError("dimension mismatch between points and basis");
  const double inv = 1.0 / (2.0 * spec.width() * spec.width());
  const Matrix& c = spec.centers();
  Matrix phi(xs.rows(), c.rows());
  for (Eigen::Index j = 0; j < c.rows(); ++j)
    for (Eigen::Index i = 0; i < xs.rows(); ++i)
      phi(i, j) = std::exp(-(xs.row(i) - c.row(j)).squaredNorm() * inv);
  return phi;
}

DesignMatrix design_matrix(const BasisSpec& spec, const Matrix& xs) {
  return DesignMatrix{evaluate_basis(spec, xs), spec.adjacency()};
}

Vector predict(const BasisSpec& spec, const Vector& beta, const Matrix& xs) {
  if (beta.size() != spec.size()) throw ConfigError("coefficient count does not match basis");
  return evaluate_basis(spec, xs) * beta;
}

}  // namespace smoothridge
