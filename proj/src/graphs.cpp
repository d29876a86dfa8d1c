#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "gfm/bench.hpp"

namespace gfm {

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::kBarabasiAlbert: return "ba";
    case GraphKind::kErdosRenyi: return "er";
    case GraphKind::kWattsStrogatz: return "ws";
    case GraphKind::kRandomGeometric: return "rgg";
  }
  return "unknown";
}

GraphKind parse_graph_kind(std::string_view name) {
  for (GraphKind k : {GraphKind::kBarabasiAlbert, GraphKind::kErdosRenyi,
                      GraphKind::kWattsStrogatz, GraphKind::kRandomGeometric}) {
    if (to_string(k) == name) return k;
  }
  if (name == "barabasi") return GraphKind::kBarabasiAlbert;
  if (name == "erdos") return GraphKind::kErdosRenyi;
  if (name == "watts") return GraphKind::kWattsStrogatz;
  if (name == "geometric") return GraphKind::kRandomGeometric;
  throw Error(ErrorCode::kUsage, "unknown graph model '" + std::string(name) + "'");
}

namespace {

void connect(BoolMatrix& a, Index i, Index j) {
  a(i, j) = true;
  a(j, i) = true;
}

BoolMatrix erdos_renyi(Index p, double prob, Rng& rng) {
  BoolMatrix a = BoolMatrix::Constant(p, p, false);
  std::bernoulli_distribution coin(std::clamp(prob, 0.0, 1.0));
  for (Index i = 0; i < p; ++i)
    for (Index j = i + 1; j < p; ++j)
      if (coin(rng)) connect(a, i, j);
  return a;
}

// Ring lattice with k/2 neighbors on each side, each lattice edge (u, u+j)
// rewired with probability beta to a uniformly chosen non-neighbor.
BoolMatrix watts_strogatz(Index p, int k, double beta, Rng& rng) {
  BoolMatrix a = BoolMatrix::Constant(p, p, false);
  const Index half = k / 2;
  for (Index j = 1; j <= half; ++j)
    for (Index u = 0; u < p; ++u) connect(a, u, (u + j) % p);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<Index> pick(0, p - 1);
  for (Index j = 1; j <= half; ++j) {
    for (Index u = 0; u < p; ++u) {
      const Index v = (u + j) % p;
      if (unif(rng) >= beta) continue;
      if (a.row(u).count() >= p - 1) continue;
      Index w = pick(rng);
      while (w == u || a(u, w)) w = pick(rng);
      a(u, v) = a(v, u) = false;
      connect(a, u, w);
    }
  }
  return a;
}

BoolMatrix random_geometric(Index p, double radius, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector xs(p), ys(p);
  for (Index i = 0; i < p; ++i) {
    xs(i) = unif(rng);
    ys(i) = unif(rng);
  }
  BoolMatrix a = BoolMatrix::Constant(p, p, false);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      const double dx = xs(i) - xs(j);
      const double dy = ys(i) - ys(j);
      if (dx * dx + dy * dy <= radius * radius) connect(a, i, j);
    }
  }
  return a;
}

// Preferential attachment from a star on m+1 nodes; each new node links to m
// distinct targets drawn from the degree-weighted node list.
BoolMatrix barabasi_albert(Index p, int m, Rng& rng) {
  if (m < 1 || m >= p) {
    throw Error(ErrorCode::kInvalidArgument, "BA needs 1 <= attach < p");
  }
  BoolMatrix a = BoolMatrix::Constant(p, p, false);
  std::vector<Index> repeated;
  for (Index i = 1; i <= m; ++i) {
    connect(a, 0, i);
    repeated.push_back(0);
    repeated.push_back(i);
  }
  for (Index source = m + 1; source < p; ++source) {
    std::set<Index> targets;
    while (Index(targets.size()) < m) {
      std::uniform_int_distribution<std::size_t> pick(0, repeated.size() - 1);
      targets.insert(repeated[pick(rng)]);
    }
    for (Index t : targets) {
      connect(a, source, t);
      repeated.push_back(t);
      repeated.push_back(source);
    }
  }
  return a;
}

}  // namespace

Matrix sample_graph(const GraphModel& model, Index p, Rng& rng) {
  if (p < 5) throw Error(ErrorCode::kInvalidArgument, "graph needs p >= 5");
  if (!(model.er_probability >= 0 && model.er_probability <= 1) ||
      !(model.ws_rewire >= 0 && model.ws_rewire <= 1) || !(model.rgg_radius > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "graph parameters out of range");
  }
  BoolMatrix support;
  switch (model.kind) {
    case GraphKind::kErdosRenyi:
      support = erdos_renyi(p, model.er_probability, rng);
      break;
    case GraphKind::kWattsStrogatz:
      support = watts_strogatz(p, model.ws_neighbors, model.ws_rewire, rng);
      break;
    case GraphKind::kRandomGeometric:
      support = random_geometric(p, model.rgg_radius, rng);
      break;
    case GraphKind::kBarabasiAlbert:
      support = barabasi_albert(p, model.ba_attach, rng);
      break;
  }
  std::uniform_real_distribution<double> weight(model.weight_low,
                                                model.weight_high);
  Matrix w = Matrix::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = i + 1; j < p; ++j) {
      if (support(i, j)) w(i, j) = w(j, i) = weight(rng);
    }
  }
  return w;
}

BoolMatrix support_of(const Matrix& weighted_adjacency) {
  BoolMatrix a = (weighted_adjacency.array() != 0.0).matrix();
  a.diagonal().setConstant(false);
  return a;
}

SpdMatrix<double> graph_to_precision(const Matrix& adjacency, double kappa) {
  if (!(kappa > 0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be > 0");
  Matrix theta = -adjacency;
  theta.diagonal() = adjacency.rowwise().sum();
  theta.diagonal().array() += kappa;
  return SpdMatrix<double>(theta);
}

Data sample_elliptical(const SpdMatrix<double>& sigma,
                       const DensityGenerator& g, Index n, Rng& rng) {
  const Index p = sigma.dim();
  const Matrix l = sigma.lower();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::optional<std::chi_squared_distribution<double>> chi2;
  if (!g.is_gaussian()) chi2.emplace(g.nu);
  Matrix z(p, n);
  Vector scale = Vector::Ones(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) z(j, i) = normal(rng);
    if (chi2) scale(i) = 1.0 / std::sqrt((*chi2)(rng) / g.nu);
  }
  Matrix x = (l * z * scale.asDiagonal()).transpose();
  return Data(std::move(x));
}

double modularity(const BoolMatrix& adjacency, std::span<const int> partition) {
  const Index p = adjacency.rows();
  if (Index(partition.size()) != p) {
    throw Error(ErrorCode::kInvalidArgument, "partition must cover every node");
  }
  Vector degree(p);
  for (Index i = 0; i < p; ++i) {
    degree(i) = 0;
    for (Index j = 0; j < p; ++j)
      if (i != j && adjacency(i, j)) degree(i) += 1;
  }
  const double two_w = degree.sum();
  if (two_w == 0) throw Error(ErrorCode::kZeroEdges, "modularity of an empty graph");
  double acc = 0;
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      if (partition[std::size_t(i)] != partition[std::size_t(j)]) continue;
      const double aij = (i != j && adjacency(i, j)) ? 1.0 : 0.0;
      acc += aij - degree(i) * degree(j) / two_w;
    }
  }
  return acc / two_w;
}

}  // namespace gfm
