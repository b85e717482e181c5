#include "sgne/game.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <queue>

namespace sgne {

bool MultiplierGraph::is_symmetric(double tol) const {
  return (weights - weights.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool MultiplierGraph::is_connected() const {
  const int n = size();
  if (n == 0) return false;
  if (n == 1) return true;
  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      if (!seen[v] && weights(u, v) > 0.0) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

MultiplierGraph MultiplierGraph::cycle(int n, double w) {
  MultiplierGraph g;
  g.weights = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    g.weights(i, j) = w;
    g.weights(j, i) = w;
  }
  return g;
}

MultiplierGraph MultiplierGraph::complete(int n, double w) {
  MultiplierGraph g;
  g.weights = Mat::Constant(n, n, w);
  g.weights.diagonal().setZero();
  return g;
}

void MultiplierGraph::add_edge(int i, int j, double w) {
  weights(i, j) = w;
  weights(j, i) = w;
}

Mat laplacian(const MultiplierGraph& graph) {
  if (!graph.is_symmetric())
    throw std::invalid_argument("multiplier graph weights must be symmetric");
  if (graph.weights.diagonal().cwiseAbs().maxCoeff() != 0.0)
    throw std::invalid_argument("multiplier graph must have zero diagonal");
  if (graph.weights.minCoeff() < 0.0)
    throw std::invalid_argument("multiplier graph weights must be nonnegative");
  if (!graph.is_connected())
    throw std::invalid_argument("multiplier graph must be connected");
  Mat L = -graph.weights;
  L.diagonal() = graph.degrees();
  return L;
}

Mat extended_laplacian(const MultiplierGraph& graph, int m) {
  const Mat L = laplacian(graph);
  const int n = graph.size();
  Mat ext = Mat::Zero(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (L(i, j) != 0.0)
        ext.block(i * m, j * m, m, m) = L(i, j) * Mat::Identity(m, m);
  return ext;
}

Vec AffineCoupling::total_b() const {
  Vec out = Vec::Zero(m());
  for (const auto& bi : b) out += bi;
  return out;
}

int CouplingConstraints::m() const {
  if (std::holds_alternative<AffineCoupling>(kind_))
    return std::get<AffineCoupling>(kind_).m();
  if (std::holds_alternative<SeparableCoupling>(kind_))
    return std::get<SeparableCoupling>(kind_).m;
  return 0;
}

const AffineCoupling& CouplingConstraints::affine() const {
  if (!is_affine())
    throw std::logic_error("coupling constraints are not affine");
  return std::get<AffineCoupling>(kind_);
}

const SeparableCoupling& CouplingConstraints::separable() const {
  if (!std::holds_alternative<SeparableCoupling>(kind_))
    throw std::logic_error("coupling constraints have no separable oracles");
  return std::get<SeparableCoupling>(kind_);
}

Vec CouplingConstraints::g_block(int i, const Vec& xi) const {
  if (is_affine()) {
    const auto& aff = std::get<AffineCoupling>(kind_);
    return aff.A[i] * xi - aff.b[i];
  }
  return separable().g[i](xi);
}

Mat CouplingConstraints::jacobian_block(int i, const Vec& xi) const {
  if (is_affine()) return std::get<AffineCoupling>(kind_).A[i];
  return separable().grad_g[i](xi);
}

int GameProblem::dim_x() const {
  return std::accumulate(dims.begin(), dims.end(), 0);
}

int GameProblem::offset(int i) const {
  int off = 0;
  for (int j = 0; j < i; ++j) off += dims[j];
  return off;
}

Vec GameProblem::sample_mean_block(int i, const Vec& x, long batch,
                                   RngStream& rng) const {
  if (grad_batch_mean) return grad_batch_mean(i, x, batch, rng);
  Vec acc = Vec::Zero(dims[i]);
  for (long t = 0; t < batch; ++t) {
    const Vec xi = noise_sampler(i, rng);
    acc += grad_sampler(i, x, xi);
  }
  return acc / static_cast<double>(batch);
}

void GameProblem::check_dimensions() const {
  if (n_players <= 0) throw std::invalid_argument("game needs n_players >= 1");
  if (static_cast<int>(dims.size()) != n_players)
    throw std::invalid_argument("dims size must equal n_players");
  for (int d : dims)
    if (d < 1) throw std::invalid_argument("every player dimension must be >= 1");
  if (graph.size() != n_players)
    throw std::invalid_argument("multiplier graph size must equal n_players");
  if (coupling.is_affine()) {
    const auto& aff = coupling.affine();
    if (static_cast<int>(aff.A.size()) != n_players ||
        static_cast<int>(aff.b.size()) != n_players)
      throw std::invalid_argument("affine coupling needs one (A_i, b_i) per player");
    for (int i = 0; i < n_players; ++i) {
      if (aff.A[i].rows() != aff.m() || aff.A[i].cols() != dims[i])
        throw std::invalid_argument("A_i has wrong shape");
      if (aff.b[i].size() != aff.m())
        throw std::invalid_argument("b_i has wrong dimension");
    }
  }
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks)
    if (c.machine_checkable && !c.passed) return false;
  return true;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

ValidationCheck check_dims(const GameProblem& game) {
  ValidationCheck c{"dimensions", false, true, ""};
  try {
    game.check_dimensions();
    c.passed = true;
  } catch (const std::exception& e) {
    c.detail = e.what();
  }
  return c;
}

ValidationCheck check_graph(const GameProblem& game) {
  ValidationCheck c{"graph", false, true, ""};
  try {
    const Mat L = laplacian(game.graph);
    const double row_sum = (L * Vec::Ones(L.cols())).cwiseAbs().maxCoeff();
    if (row_sum > 1e-12) {
      c.detail = "Laplacian rows do not sum to zero";
    } else {
      c.passed = true;
    }
  } catch (const std::exception& e) {
    c.detail = e.what();
  }
  return c;
}

// Firm nonexpansiveness on sampled pairs:
// ‖prox(u)-prox(v)‖² ≤ ‖u-v‖² − ‖(u-prox(u)) − (v-prox(v))‖².
ValidationCheck check_prox(const GameProblem& game, std::uint64_t seed, int samples) {
  ValidationCheck c{"prox_firmly_nonexpansive", true, true, ""};
  RngStream rng = RngStream::derive(seed, 0, 0, 101);
  for (int s = 0; s < samples && c.passed; ++s) {
    const int i = static_cast<int>(rng.next_u64() % game.n_players);
    const int ni = game.dims[i];
    Vec u(ni), v(ni);
    for (int d = 0; d < ni; ++d) {
      u[d] = 3.0 * rng.next_normal();
      v[d] = 3.0 * rng.next_normal();
    }
    const double alpha = 0.05 + rng.next_double();
    const Vec pu = game.prox_f(i, u, alpha);
    const Vec pv = game.prox_f(i, v, alpha);
    const double lhs = (pu - pv).squaredNorm();
    const double rhs = (u - v).squaredNorm() - ((u - pu) - (v - pv)).squaredNorm();
    if (lhs > rhs + 1e-10) {
      c.passed = false;
      std::ostringstream os;
      os << "violated on agent " << i << " by " << lhs - rhs;
      c.detail = os.str();
    }
  }
  return c;
}

// Central finite differences of g_i against the supplied Jacobian.
ValidationCheck check_jacobian(const GameProblem& game, std::uint64_t seed, int samples) {
  ValidationCheck c{"coupling_jacobian", true, true, ""};
  if (!game.coupling.present()) {
    c.detail = "no coupling constraints";
    return c;
  }
  RngStream rng = RngStream::derive(seed, 0, 0, 102);
  const double h = 1e-6;
  for (int s = 0; s < samples && c.passed; ++s) {
    const int i = static_cast<int>(rng.next_u64() % game.n_players);
    const int ni = game.dims[i];
    Vec xi(ni);
    for (int d = 0; d < ni; ++d) xi[d] = 0.2 + rng.next_double();
    const Mat J = game.coupling.jacobian_block(i, xi);
    for (int d = 0; d < ni; ++d) {
      Vec xp = xi, xm = xi;
      xp[d] += h;
      xm[d] -= h;
      const Vec col = (game.coupling.g_block(i, xp) - game.coupling.g_block(i, xm)) / (2 * h);
      const double scale = std::max(1.0, col.norm());
      if ((col - J.col(d)).norm() > 1e-6 * scale) {
        c.passed = false;
        c.detail = "finite differences disagree with grad_g";
        break;
      }
    }
  }
  return c;
}

// grad_exact must match the empirical sampler mean within 3 standard errors
// (per coordinate, with a small absolute floor for degenerate noise).
ValidationCheck check_exact_vs_mean(const GameProblem& game, std::uint64_t seed,
                                    int n_samples) {
  ValidationCheck c{"grad_exact_matches_sampler", true, true, ""};
  if (!game.grad_exact) {
    c.detail = "no exact oracle attached";
    return c;
  }
  RngStream point_rng = RngStream::derive(seed, 0, 0, 103);
  Vec x(game.dim_x());
  for (int d = 0; d < x.size(); ++d) x[d] = 0.2 + 0.6 * point_rng.next_double();
  for (int i = 0; i < game.n_players && c.passed; ++i) {
    RngStream rng = RngStream::derive(seed, i, 0, 104);
    const int ni = game.dims[i];
    Vec mean = Vec::Zero(ni), m2 = Vec::Zero(ni);
    for (int t = 1; t <= n_samples; ++t) {
      const Vec xi = game.noise_sampler(i, rng);
      const Vec gval = game.grad_sampler(i, x, xi);
      const Vec delta = gval - mean;
      mean += delta / t;
      m2 += delta.cwiseProduct(gval - mean);
    }
    const Vec exact = game.grad_exact(i, x);
    for (int d = 0; d < ni; ++d) {
      const double se = std::sqrt(std::max(m2[d] / (n_samples - 1), 0.0) / n_samples);
      const double tol = 3.0 * se + 1e-9;
      if (std::abs(mean[d] - exact[d]) > tol) {
        c.passed = false;
        std::ostringstream os;
        os << "agent " << i << " coord " << d << ": |mean-exact|="
           << std::abs(mean[d] - exact[d]) << " > " << tol;
        c.detail = os.str();
        break;
      }
    }
  }
  return c;
}

}  // namespace

ValidationReport validate_game(const GameProblem& game, std::uint64_t seed,
                               int prox_samples, int jac_samples, int mean_samples) {
  ValidationReport report;
  report.checks.push_back(check_dims(game));
  report.checks.push_back(check_graph(game));
  if (report.checks[0].passed) {
    report.checks.push_back(check_prox(game, seed, prox_samples));
    report.checks.push_back(check_jacobian(game, seed, jac_samples));
    report.checks.push_back(check_exact_vs_mean(game, seed, mean_samples));
  }
  report.checks.push_back(
      {"cost_convexity", true, false, "not machine-checkable, asserted by caller"});
  report.checks.push_back(
      {"slater_condition", true, false, "not machine-checkable, asserted by caller"});
  return report;
}

}  // namespace sgne
