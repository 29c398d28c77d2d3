#pragma once

#include "smoothridge/basis.hpp"
#include "smoothridge/core.hpp"

#include <optional>
#include <string_view>
#include <variant>

namespace smoothridge {

/// How the lambda sweep treats the ends of the center chain (or the rim of a
/// grid). `paper` pads with zero-valued phantom neighbors so every node sees
/// the interior degree; `exact` uses the true neighbor count, which makes
/// each update the exact coordinate minimizer of the objective.
enum class BoundaryMode { paper, exact };

std::string_view to_string(BoundaryMode mode);
BoundaryMode parse_boundary_mode(std::string_view text);

struct SvrOptions {
  double gamma1 = 1e-3;
  double gamma2 = 1e-3;
  double tol = 1e-6;
  int max_iter = 500;
  BoundaryMode boundary = BoundaryMode::paper;
  /// Empty: start from the GIC-selected ridge lambda replicated m times.
  std::variant<std::monostate, double, Vector> lambda_init;
  /// Tolerance and iteration cap of the inner (alpha, beta) alternation.
  double inner_tol = 1e-8;
  int inner_max_iter = 500;
  /// Workers for the ridge pre-pass when lambda_init is empty.
  unsigned threads = 1;
};

/// sum_i [ -2 l_i(theta) + sum_j lambda_j beta_j^2
///         + gamma1 sum_{edges} (lambda_j - lambda_k)^2 - gamma2 sum_j log lambda_j ].
/// Every penalty is therefore multiplied by n. Edges come from `adjacency`
/// (consecutive indices in 1D).
double svr_objective(const Matrix& phi, const Vector& ys, const ModelParams& params,
                     const LambdaState& state, const Adjacency& adjacency);

/// (alpha, beta) minimizing the objective for fixed lambda: the ridge
/// alternation with lambda I replaced by diag(lambda). `alpha_start` warm
/// starts the first solve.
ModelParams weighted_ridge_step(const Matrix& phi, const Vector& ys, const Vector& lambda, double tol = 1e-8,
                                int max_iter = 500, std::optional<double> alpha_start = std::nullopt);

/// Positive root of 2 g1 d x^2 + (r - 2 g1 s) x - g2 = 0, where s is the sum
/// of the neighbor values seen by the node and d their count: the minimizer
/// over x of x r + g1 sum_k (x - lambda_k)^2 - g2 log x.
double lambda_coordinate_update(double neighbor_sum, double r_beta, double gamma1, double gamma2, int degree);

/// Two-neighbor form of the update. With degree 2 this is
/// (2 g1 (prev + next) - r + sqrt((2 g1 (prev + next) - r)^2 + 16 g1 g2)) / (8 g1).
double lambda_step_single(double lambda_prev, double lambda_next, double r_beta, double gamma1, double gamma2,
                          int degree = 2);

/// One in-place Gauss-Seidel pass over lambda in ascending index order:
/// lower-index neighbors contribute their updated values and higher-index
/// neighbors their previous ones. r_values holds r(beta_j) = beta_j^2.
Vector lambda_sweep(const Vector& lambda, const Vector& r_values, double gamma1, double gamma2,
                    const Adjacency& adjacency, BoundaryMode mode);

/// Alternates weighted_ridge_step and lambda_sweep until the largest
/// relative change in (alpha, beta, lambda) drops below options.tol. The
/// objective is recorded after every full iteration. Stops early with
/// converged = false when alpha collapses (the basis interpolates the data);
/// the partial result carries a warning.
FitResult svr_fit(const DesignMatrix& design, const Vector& ys, const SvrOptions& options);

}  // namespace smoothridge
