#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sgne/rng.hpp"

namespace sgne {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Communication graph over which agents exchange dual and auxiliary
// consensus variables. Weights are symmetric and nonnegative with a zero
// diagonal; the graph must be connected.
struct MultiplierGraph {
  Mat weights;  // N x N

  int size() const { return static_cast<int>(weights.rows()); }
  Vec degrees() const { return weights.rowwise().sum(); }
  double max_degree() const { return degrees().maxCoeff(); }
  bool is_symmetric(double tol = 0.0) const;
  bool is_connected() const;

  static MultiplierGraph cycle(int n, double w = 1.0);
  static MultiplierGraph complete(int n, double w = 1.0);
  void add_edge(int i, int j, double w = 1.0);
};

// L = D - W. Throws std::invalid_argument when the graph violates the
// connectivity/symmetry requirements.
Mat laplacian(const MultiplierGraph& graph);

// L ⊗ I_m, acting on stacked per-agent copies of an m-dimensional variable.
Mat extended_laplacian(const MultiplierGraph& graph, int m);

// Shared constraints g(x) = Σ_i g_i(x_i) ≤ 0 with per-agent blocks.
struct SeparableCoupling {
  int m = 0;
  // g_i : R^{n_i} -> R^m and its Jacobian (m x n_i).
  std::vector<std::function<Vec(const Vec&)>> g;
  std::vector<std::function<Mat(const Vec&)>> grad_g;
  double lipschitz_bound = 0.0;  // ℓ_g, caller supplied
  double grad_bound = 0.0;       // B_∇g, caller supplied
};

// Affine specialization g_i(x_i) = A_i x_i - b_i with Σ_i b_i = b.
struct AffineCoupling {
  std::vector<Mat> A;  // each m x n_i
  std::vector<Vec> b;  // each R^m

  int m() const { return A.empty() ? 0 : static_cast<int>(A[0].rows()); }
  Vec total_b() const;
};

class CouplingConstraints {
 public:
  CouplingConstraints() = default;  // no coupling (m = 0)
  explicit CouplingConstraints(SeparableCoupling sep) : kind_(std::move(sep)) {}
  explicit CouplingConstraints(AffineCoupling aff) : kind_(std::move(aff)) {}

  bool present() const { return !std::holds_alternative<std::monostate>(kind_); }
  bool is_affine() const { return std::holds_alternative<AffineCoupling>(kind_); }
  int m() const;

  const AffineCoupling& affine() const;
  const SeparableCoupling& separable() const;

  // Unified per-agent access, valid for both representations.
  Vec g_block(int i, const Vec& xi) const;
  Mat jacobian_block(int i, const Vec& xi) const;

 private:
  std::variant<std::monostate, SeparableCoupling, AffineCoupling> kind_;
};

// Known equilibrium attached to a scenario: primal profile and the shared
// (consensus) multiplier.
struct ReferencePoint {
  Vec x;
  Vec lambda;  // R^m, empty when m = 0
};

// Immutable description of an N-player game. All oracles must be safe to
// call concurrently as long as each caller uses its own RngStream.
struct GameProblem {
  int n_players = 0;
  std::vector<int> dims;  // n_i
  CouplingConstraints coupling;
  MultiplierGraph graph;

  // (agent, full decision x, noise sample ξ) -> gradient block in R^{n_i}.
  std::function<Vec(int, const Vec&, const Vec&)> grad_sampler;
  // (agent, stream) -> ξ draw.
  std::function<Vec(int, RngStream&)> noise_sampler;
  // Exact expected gradient block, when available in closed form.
  std::function<Vec(int, const Vec&)> grad_exact;
  // prox of α f_i at a point in R^{n_i}.
  std::function<Vec(int, const Vec&, double)> prox_f;
  // Projection onto the local set Ω_i (used by the projection variant and
  // by residual diagnostics).
  std::function<Vec(int, const Vec&)> proj_local;
  // Optional fused batch-mean oracle: (agent, x, batch, stream) -> mean of
  // `batch` sampled gradient blocks. Must consume the stream exactly as a
  // loop over noise_sampler + grad_sampler would. Scenarios provide it to
  // keep the sampling loop free of per-sample std::function overhead.
  std::function<Vec(int, const Vec&, long, RngStream&)> grad_batch_mean;

  std::optional<ReferencePoint> reference;
  bool monotone_declared = false;

  int m() const { return coupling.m(); }
  int dim_x() const;
  int offset(int i) const;
  Eigen::VectorBlock<const Vec> block(const Vec& x, int i) const {
    return x.segment(offset(i), dims[i]);
  }

  // Mean of `batch` sampled gradient blocks for one agent, using the fused
  // oracle when present.
  Vec sample_mean_block(int i, const Vec& x, long batch, RngStream& rng) const;

  void check_dimensions() const;  // throws on inconsistency
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  bool machine_checkable = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const;
  const ValidationCheck* find(const std::string& name) const;
};

// Runs the mechanically checkable structural assumptions: graph symmetry
// and connectivity, dimension consistency, sampled firm nonexpansiveness of
// the prox oracles, sampled Jacobian consistency of the coupling, and
// agreement between grad_exact and the sampler mean. Convexity and Slater's
// condition cannot be checked through black-box oracles and are reported as
// asserted by the caller.
ValidationReport validate_game(const GameProblem& game, std::uint64_t seed = 1234,
                               int prox_samples = 50, int jac_samples = 20,
                               int mean_samples = 10000);

}  // namespace sgne
