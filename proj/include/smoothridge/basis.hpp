#pragma once

#include "smoothridge/core.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace smoothridge {

enum class BasisKind { gaussian_rbf };

/// Neighbor structure over basis centers: a chain in 1D, the 4-neighbor
/// lattice of a row-major grid in 2D. Symmetric by construction.
class Adjacency {
 public:
  Adjacency() = default;
  /// `lattice_degree` is the neighbor count of an interior node (the degree
  /// boundary nodes are padded to); defaults to the largest degree present.
  explicit Adjacency(std::vector<std::vector<int>> neighbors, int lattice_degree = 0);

  static Adjacency chain(int m);
  static Adjacency grid(int rows, int cols);

  int size() const { return static_cast<int>(neighbors_.size()); }
  const std::vector<int>& neighbors(int j) const { return neighbors_[static_cast<std::size_t>(j)]; }
  int degree(int j) const { return static_cast<int>(neighbors(j).size()); }
  int lattice_degree() const { return lattice_degree_; }
  /// Undirected edges (i < j), ascending.
  std::vector<std::pair<int, int>> edges() const;
  bool connected() const;
  /// Graph Laplacian: degree on the diagonal, -1 per edge. For a chain this
  /// is the second-difference matrix with unit corners.
  Matrix laplacian() const;

 private:
  std::vector<std::vector<int>> neighbors_;
  int lattice_degree_ = 0;
};

/// Gaussian RBF basis on a regular grid of centers.
class BasisSpec {
 public:
  /// `shape` holds the per-dimension center counts; centers are row-major.
  BasisSpec(Matrix centers, double width, std::vector<Interval> domain, std::vector<int> shape,
            BasisKind kind = BasisKind::gaussian_rbf);

  std::size_t dims() const { return static_cast<std::size_t>(centers_.cols()); }
  int size() const { return static_cast<int>(centers_.rows()); }
  const Matrix& centers() const { return centers_; }
  double width() const { return width_; }
  const std::vector<Interval>& domain() const { return domain_; }
  const std::vector<int>& shape() const { return shape_; }
  BasisKind kind() const { return kind_; }

  Adjacency adjacency() const;

 private:
  Matrix centers_;
  double width_;
  std::vector<Interval> domain_;
  std::vector<int> shape_;
  BasisKind kind_;
};

struct DesignMatrix {
  Matrix phi;  ///< n x m, phi(i, j) = basis j at design point i
  Adjacency adjacency;
};

/// Equally spaced centers including both endpoints of every interval; the
/// 2D grid is the tensor product ordered row-major (last dimension fastest).
Matrix build_grid_centers(const std::vector<Interval>& domain, int m_per_dim);

/// scale times the grid spacing (smallest distance between distinct centers).
double rbf_width(const Matrix& centers, double scale = 1.0);

/// Grid centers plus width in one step.
BasisSpec make_grid_basis(const std::vector<Interval>& domain, int m_per_dim, double width_scale = 1.0);

/// Default centers per dimension: 30 in 1D, 10 (a 10 x 10 grid) in 2D.
int default_centers_per_dim(std::size_t dims);

/// Evaluates every basis function at every row of xs.
Matrix evaluate_basis(const BasisSpec& spec, const Matrix& xs);

DesignMatrix design_matrix(const BasisSpec& spec, const Matrix& xs);

/// Fitted values beta^T phi(x) at arbitrary points.
Vector predict(const BasisSpec& spec, const Vector& beta, const Matrix& xs);

}  // namespace smoothridge
