#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fracgfm/functionals.hpp"
#include "fracgfm/graph.hpp"
#include "fracgfm/linalg.hpp"
#include "fracgfm/rng.hpp"
#include "fracgfm/solver.hpp"

namespace fracgfm {

/// Q-orthonormal generalized graph Fourier modes u_1..u_K (columns of U).
struct ModeSet {
  DenseMatrix modes;  ///< n x K
  DiagonalMetric q;
  Vector values;  ///< T(u_k)

  std::size_t count() const { return modes.cols(); }
};

/// Orthonormal basis of {x : U_prev^T Q x = 0}. Empty U_prev gives I_n.
/// Throws std::invalid_argument when the constrained space is {0}.
DenseMatrix constraint_basis(const DenseMatrix& u_prev, const DiagonalMetric& q);

/// Orthonormal basis of the orthogonal complement of
/// X_0 = {x in span(X_basis) : M x = 0} within span(X_basis).
DenseMatrix subspace_reduction(const DenseMatrix& x_basis, const DenseMatrix& m);

/// Eigenvectors (ascending eigenvalue) of the symmetrized Laplacian
/// L = D - (W + W^T)/2 with D_ii = (out_i + in_i)/2. Each eigenvector's first
/// nonzero entry is positive.
DenseMatrix laplacian_basis(const WeightedDigraph& g);

/// U = Q^{-1/2} [v_1, V~] with v_1 = Q^{1/2} u_1 and V~ an orthonormal
/// completion of v_1, so that U^T Q U = I and U e_1 = u_1.
DenseMatrix metric_seed_basis(const DiagonalMetric& q);

/// First mode 1 / |Q^{1/2} 1| * 1.
Vector constant_mode(const DiagonalMetric& q);

/// Unit-norm point a x1 + b x2 (normalized); x1 alone when b = 0.
Vector adversarial_combination(std::span<const double> x1, std::span<const double> x2, double a, double b);

/// Initial points for mode k in the coordinates of p's basis V.
/// The first n_adv are random positive combinations of the two seed columns
/// (columns k..n of u_full, 1-based) with the largest ratio; the next n_rand
/// are normalized Gaussian vectors.
std::vector<Vector> initial_points(const FractionalProblem& p, const DenseMatrix& u_full, int k,
                                   int n_adv, int n_rand, Rng& rng);

struct StartSpec {
  int n_adv = 15;
  int n_rand = 35;
  std::uint64_t seed = 1;
};

/// Sequential (T,Q)-mode computation: u_1 constant, then modes 2..K from the
/// best of the multi-start PS-DCA runs. The multi-start loop runs in parallel.
ModeSet compute_modes(const WeightedDigraph& g, const DiagonalMetric& q, int count, const SolverConfig& cfg,
                      const StartSpec& starts);

/// JSON: {"n", "Q", "K", "modes": [[column]...], "values"}.
void write_modes_json(std::ostream& os, const ModeSet& modes);
ModeSet read_modes_json(std::istream& is);

}  // namespace fracgfm
