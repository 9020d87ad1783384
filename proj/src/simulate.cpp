#include "netdag/simulate.hpp"

#include "netdag/glasso.hpp"
#include "netdag/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace netdag {

namespace {

double signed_uniform(Rng& rng, std::pair<double, double> magnitude) {
  const double m = rng.uniform(magnitude.first, magnitude.second);
  return rng.coin() ? m : -m;
}

// Tridiagonal precision of the exponential-decay correlation r^{|i-j|}.
void fill_markov_block(Matrix& sigma, Matrix& theta, Index off, Index b, double r) {
  const double r2 = r * r;
  for (Index i = 0; i < b; ++i)
    for (Index j = 0; j < b; ++j)
      sigma(off + i, off + j) = std::pow(r, static_cast<double>(std::abs(i - j)));
  for (Index i = 0; i < b; ++i) {
    const bool interior = i > 0 && i < b - 1;
    theta(off + i, off + i) = (interior ? (1.0 + r2) : 1.0) / (1.0 - r2);
    if (i + 1 < b) {
      theta(off + i, off + i + 1) = -r / (1.0 - r2);
      theta(off + i + 1, off + i) = -r / (1.0 - r2);
    }
  }
}

void fill_equicorrelation_block(Matrix& sigma, Matrix& theta, Index off, Index b, double c) {
  const double bd = static_cast<double>(b);
  const double denom = (1.0 - c) * (1.0 + (bd - 1.0) * c);
  if (!(denom > 0.0)) throw std::invalid_argument("equicorrelation parameter is not feasible");
  const double diag = (1.0 + (bd - 2.0) * c) / denom;
  const double offd = -c / denom;
  for (Index i = 0; i < b; ++i)
    for (Index j = 0; j < b; ++j) {
      sigma(off + i, off + j) = i == j ? 1.0 : c;
      theta(off + i, off + j) = i == j ? diag : offd;
    }
}

// Hub node is the first index of the block: Sigma_1j = a, Sigma_ij = a^2.
void fill_star_block(Matrix& sigma, Matrix& theta, Index off, Index b, double a) {
  const double a2 = a * a;
  if (!(a2 < 1.0)) throw std::invalid_argument("star parameter must have |a| < 1");
  for (Index i = 0; i < b; ++i)
    for (Index j = 0; j < b; ++j) {
      if (i == j)
        sigma(off + i, off + j) = 1.0;
      else if (i == 0 || j == 0)
        sigma(off + i, off + j) = a;
      else
        sigma(off + i, off + j) = a2;
    }
  const double leaf = 1.0 / (1.0 - a2);
  theta(off, off) = 1.0 + static_cast<double>(b - 1) * a2 / (1.0 - a2);
  for (Index i = 1; i < b; ++i) {
    theta(off + i, off + i) = leaf;
    theta(off, off + i) = -a * leaf;
    theta(off + i, off) = -a * leaf;
  }
}

Matrix banded_ar_precision(Index b, double base) {
  const Index band = static_cast<Index>(std::ceil(static_cast<double>(b) / 4.0));
  Matrix theta = Matrix::Zero(b, b);
  for (Index i = 0; i < b; ++i)
    for (Index j = 0; j < b; ++j)
      if (std::abs(i - j) <= band)
        theta(i, j) = std::pow(base, static_cast<double>(std::abs(i - j)));
  return theta;
}

}  // namespace

void DagSpec::validate() const {
  if (p < 2) throw std::invalid_argument("dag spec requires p >= 2");
  if (num_edges < 0 || num_edges > p * (p - 1) / 2)
    throw std::invalid_argument("num_edges exceeds p(p-1)/2");
  if (!(weight_range.first > 0.0) || weight_range.second < weight_range.first)
    throw std::invalid_argument("invalid weight range");
  if (!(omega_range.first > 0.0) || omega_range.second < omega_range.first)
    throw std::invalid_argument("invalid omega range");
}

CovFamily cov_family_from_string(const std::string& name) {
  if (name == "toeplitz") return CovFamily::toeplitz;
  if (name == "equicor" || name == "equicorrelation") return CovFamily::equicorrelation;
  if (name == "star") return CovFamily::star;
  if (name == "ar") return CovFamily::ar;
  if (name == "identity") return CovFamily::identity;
  throw std::invalid_argument("unknown covariance family: " + name);
}

std::string to_string(CovFamily family) {
  switch (family) {
    case CovFamily::toeplitz: return "toeplitz";
    case CovFamily::equicorrelation: return "equicorrelation";
    case CovFamily::star: return "star";
    case CovFamily::ar: return "ar";
    case CovFamily::identity: return "identity";
  }
  return "unknown";
}

void CovSpec::validate() const {
  if (block_size < 1 || num_blocks < 1)
    throw std::invalid_argument("covariance spec requires positive block size and count");
  if (star_low > star_high || star_low <= -1.0 || star_high >= 1.0)
    throw std::invalid_argument("invalid star parameter range");
}

DagParams random_dag(const DagSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const Index p = spec.p;

  std::vector<Index> order(p);
  for (Index i = 0; i < p; ++i) order[i] = i;
  rng.shuffle(order);

  // All position pairs (a < b); partial shuffle picks num_edges of them.
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(p * (p - 1) / 2);
  for (Index a = 0; a < p; ++a)
    for (Index b = a + 1; b < p; ++b) pairs.emplace_back(a, b);
  for (Index i = 0; i < spec.num_edges; ++i) {
    const auto j = i + static_cast<Index>(rng.below(pairs.size() - i));
    std::swap(pairs[i], pairs[j]);
  }

  Matrix b = Matrix::Zero(p, p);
  for (Index e = 0; e < spec.num_edges; ++e) {
    const Index k = order[pairs[e].first];
    const Index j = order[pairs[e].second];
    b(k, j) = signed_uniform(rng, spec.weight_range);
  }
  Vector omega_sq(p);
  for (Index j = 0; j < p; ++j) {
    const double w = rng.uniform(spec.omega_range.first, spec.omega_range.second);
    omega_sq[j] = w * w;
  }
  return DagParams::make(std::move(b), std::move(omega_sq));
}

RowPrecision build_covariance(const CovSpec& spec) {
  spec.validate();
  const Index n = spec.n();
  const Index b = spec.block_size;
  Rng rng(spec.seed);

  if (spec.family == CovFamily::identity)
    return RowPrecision::identity(n);

  if (spec.family == CovFamily::ar) {
    const double base = spec.base > 0.0 ? spec.base : 0.7;
    Matrix theta = Matrix::Zero(n, n);
    for (Index blk = 0; blk < spec.num_blocks; ++blk) {
      Matrix block = banded_ar_precision(b, base);
      Eigen::SelfAdjointEigenSolver<Matrix> es(block, Eigen::EigenvaluesOnly);
      double emin = es.eigenvalues().minCoeff();
      int attempts = 0;
      while (emin <= 1e-10 && attempts < 10) {
        block.diagonal().array() += std::abs(emin) + 0.05;
        emin = Eigen::SelfAdjointEigenSolver<Matrix>(block, Eigen::EigenvaluesOnly)
                   .eigenvalues()
                   .minCoeff();
        ++attempts;
      }
      if (emin <= 0.0) throw std::runtime_error("ar precision could not be made positive definite");
      theta.block(blk * b, blk * b, b, b) = block;
    }
    return normalize_to_correlation(theta);
  }

  Matrix sigma = Matrix::Zero(n, n);
  Matrix theta = Matrix::Zero(n, n);
  for (Index blk = 0; blk < spec.num_blocks; ++blk) {
    const Index off = blk * b;
    switch (spec.family) {
      case CovFamily::toeplitz: {
        const double base = spec.base > 0.0 ? spec.base : 0.3;
        fill_markov_block(sigma, theta, off, b, std::pow(base, 0.2));
        break;
      }
      case CovFamily::equicorrelation: {
        const double c = spec.base > 0.0 ? spec.base : 0.7;
        fill_equicorrelation_block(sigma, theta, off, b, c);
        break;
      }
      case CovFamily::star: {
        const double a = rng.uniform(spec.star_low, spec.star_high);
        fill_star_block(sigma, theta, off, b, a);
        break;
      }
      default:
        throw std::invalid_argument("unsupported covariance family");
    }
  }
  Matrix l = whitening_cholesky(theta);
  return RowPrecision{std::move(theta), std::move(sigma), std::move(l)};
}

RowPrecision network_precision(const std::vector<std::pair<Index, Index>>& edges, Index n,
                               std::pair<double, double> value_range, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("network precision requires n >= 1");
  Rng rng(seed);
  Matrix theta = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) theta(i, i) = rng.uniform(value_range.first, value_range.second);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("edge references a node outside [0, n)");
    if (u == v) continue;
    const double val = rng.uniform(value_range.first, value_range.second);
    theta(u, v) = val;
    theta(v, u) = val;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(theta, Eigen::EigenvaluesOnly);
  const double emin = es.eigenvalues().minCoeff();
  if (emin <= 1e-10) theta.diagonal().array() += std::abs(emin) + 0.1;
  return normalize_to_correlation(theta);
}

Matrix psi_from_dag(const DagParams& dag) {
  const Index p = dag.p();
  Matrix inv = (Matrix::Identity(p, p) - dag.b).partialPivLu().solve(Matrix::Identity(p, p));
  return inv.transpose() * dag.omega_sq.asDiagonal() * inv;
}

GroundTruth sample_sem(const DagParams& dag, const RowPrecision& rp, Index n, std::uint64_t seed) {
  const Index p = dag.p();
  if (n < 2) throw std::invalid_argument("sample_sem requires n >= 2");
  Rng rng(seed);

  Matrix z(n, p);
  for (Index j = 0; j < p; ++j)
    for (Index i = 0; i < n; ++i) z(i, j) = rng.normal();

  Eigen::LLT<Matrix> llt(rp.sigma);
  if (llt.info() != Eigen::Success) throw std::runtime_error("sigma is not positive definite");
  const Matrix a_sigma = llt.matrixL();
  const Vector omega = dag.omega_sq.array().sqrt();
  Matrix eps = a_sigma * z * omega.asDiagonal();

  auto order = topological_order(dag.support());
  if (!order) throw std::invalid_argument("dag has a cycle");
  Matrix x(n, p);
  for (Index j : *order) {
    x.col(j) = eps.col(j);
    for (Index k = 0; k < p; ++k)
      if (dag.b(k, j) != 0.0) x.col(j) += dag.b(k, j) * x.col(k);
  }

  GroundTruth gt{dag, rp, SupportMask::from_support(rp.theta), psi_from_dag(dag),
                 DataMatrix::from_values(std::move(x))};
  return gt;
}

DagParams replicate_dag(const DagParams& base, int copies, std::pair<double, double> omega_range,
                        std::uint64_t seed) {
  if (copies < 1) throw std::invalid_argument("copies must be at least 1");
  const Index p = base.p();
  const Index total = p * copies;
  Rng rng(seed);
  Matrix b = Matrix::Zero(total, total);
  Vector omega_sq(total);
  for (int c = 0; c < copies; ++c) b.block(c * p, c * p, p, p) = base.b;
  for (Index j = 0; j < total; ++j) {
    const double w = rng.uniform(omega_range.first, omega_range.second);
    omega_sq[j] = w * w;
  }
  return DagParams::make(std::move(b), std::move(omega_sq));
}

std::vector<std::pair<Index, Index>> read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open edge list: " + path);
  std::set<std::pair<Index, Index>> seen;
  std::vector<std::pair<Index, Index>> edges;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    long long u, v;
    if (!(ss >> u >> v)) continue;
    if (u < 1 || v < 1) throw std::invalid_argument("edge list ids must be 1-based positives");
    Index a = static_cast<Index>(u - 1), b = static_cast<Index>(v - 1);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second) edges.emplace_back(a, b);
  }
  return edges;
}

NamedEdgeList read_dag_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open dag edge list: " + path);
  NamedEdgeList out;
  std::string line;
  auto index_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < out.names.size(); ++i)
      if (out.names[i] == name) return static_cast<Index>(i);
    out.names.push_back(name);
    return static_cast<Index>(out.names.size() - 1);
  };
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string parent, child;
    if (!(ss >> parent >> child)) continue;
    const Index pi = index_of(parent);
    const Index ci = index_of(child);
    out.edges.emplace_back(pi, ci);
  }
  return out;
}

DagParams dag_from_edges(const std::vector<std::pair<Index, Index>>& edges, Index p,
                         std::pair<double, double> weight_range,
                         std::pair<double, double> omega_range, std::uint64_t seed) {
  Rng rng(seed);
  Matrix b = Matrix::Zero(p, p);
  for (const auto& [parent, child] : edges) {
    if (parent < 0 || child < 0 || parent >= p || child >= p)
      throw std::invalid_argument("edge references a node outside [0, p)");
    if (parent == child) throw std::invalid_argument("self loop in dag edge list");
    b(parent, child) = signed_uniform(rng, weight_range);
  }
  Vector omega_sq(p);
  for (Index j = 0; j < p; ++j) {
    const double w = rng.uniform(omega_range.first, omega_range.second);
    omega_sq[j] = w * w;
  }
  return DagParams::make(std::move(b), std::move(omega_sq));
}

std::vector<std::pair<Index, Index>> induced_subgraph(
    const std::vector<std::pair<Index, Index>>& edges, Index total_nodes, Index sample_n,
    std::uint64_t seed) {
  if (sample_n > total_nodes)
    throw std::invalid_argument("cannot sample more nodes than the graph has");
  Rng rng(seed);
  std::vector<Index> nodes(total_nodes);
  for (Index i = 0; i < total_nodes; ++i) nodes[i] = i;
  for (Index i = 0; i < sample_n; ++i) {
    const auto j = i + static_cast<Index>(rng.below(nodes.size() - i));
    std::swap(nodes[i], nodes[j]);
  }
  std::vector<Index> chosen(nodes.begin(), nodes.begin() + sample_n);
  std::sort(chosen.begin(), chosen.end());
  std::vector<Index> relabel(total_nodes, -1);
  for (Index i = 0; i < sample_n; ++i) relabel[chosen[i]] = i;
  std::vector<std::pair<Index, Index>> out;
  for (const auto& [u, v] : edges)
    if (relabel[u] >= 0 && relabel[v] >= 0) out.emplace_back(relabel[u], relabel[v]);
  return out;
}

}  // namespace netdag
