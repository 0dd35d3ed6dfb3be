#include "pdprox/linear_map.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace pdprox {

CsrMap CsrMap::from_triplets(Index rows, Index cols,
                             const std::vector<Eigen::Triplet<double>>& entries) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> a(rows, cols);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return CsrMap(std::move(a));
}

LaplacianMap::LaplacianMap(int node_count, int block_dim, std::vector<Edge> edges)
    : LinearMap(static_cast<Index>(node_count) * block_dim,
                static_cast<Index>(node_count) * block_dim),
      nodes_(node_count),
      block_dim_(block_dim),
      edges_(std::move(edges)),
      degree_(VectorXd::Zero(node_count)) {
  for (const auto& e : edges_) {
    if (e.i < 0 || e.j < 0 || e.i >= nodes_ || e.j >= nodes_) {
      throw DimensionError("LaplacianMap: edge endpoint out of range");
    }
    if (e.i == e.j) {
      throw DimensionError("LaplacianMap: self-loops are not allowed");
    }
    if (e.weight <= 0.0) {
      throw DimensionError("LaplacianMap: edge weights must be positive");
    }
    degree_[e.i] += e.weight;
    degree_[e.j] += e.weight;
  }
}

VectorXd LaplacianMap::do_apply(const VectorXd& x) const {
  VectorXd out(x.size());
  const int d = block_dim_;
  for (int v = 0; v < nodes_; ++v) {
    out.segment(static_cast<Index>(v) * d, d) =
        degree_[v] * x.segment(static_cast<Index>(v) * d, d);
  }
  for (const auto& e : edges_) {
    out.segment(static_cast<Index>(e.i) * d, d) -=
        e.weight * x.segment(static_cast<Index>(e.j) * d, d);
    out.segment(static_cast<Index>(e.j) * d, d) -=
        e.weight * x.segment(static_cast<Index>(e.i) * d, d);
  }
  return out;
}

MatrixXd LaplacianMap::node_matrix() const {
  MatrixXd l = MatrixXd::Zero(nodes_, nodes_);
  l.diagonal() = degree_;
  for (const auto& e : edges_) {
    l(e.i, e.j) -= e.weight;
    l(e.j, e.i) -= e.weight;
  }
  return l;
}

NormEstimate estimate_operator_norm(const LinearMap& map, double tol,
                                    long max_iters, unsigned seed) {
  if (tol <= 0.0) {
    throw DimensionError("estimate_operator_norm: tol must be positive");
  }
  const bool symmetric = map.symmetric_psd();

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd v(map.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  v.normalize();

  // Iterates v <- Mv with M = A (symmetric PSD) or M = A^T A.  The Rayleigh
  // quotient then converges to ||A|| resp. ||A||^2 from below.
  double eig = 0.0;
  NormEstimate out;
  for (long it = 1; it <= max_iters; ++it) {
    VectorXd w = symmetric ? map.apply(v) : map.apply_adjoint(map.apply(v));
    const double norm_w = w.norm();
    out.iterations = it;
    if (norm_w == 0.0) {
      return {0.0, it, true};
    }
    const double eig_next = v.dot(w);
    w /= norm_w;
    const bool settled = std::abs(eig_next - eig) <= tol * std::abs(eig_next);
    eig = eig_next;
    v = std::move(w);
    if (settled && it > 1) {
      out.value = symmetric ? eig : std::sqrt(std::max(eig, 0.0));
      out.converged = true;
      return out;
    }
  }
  out.value = symmetric ? eig : std::sqrt(std::max(eig, 0.0));
  out.converged = false;
  return out;
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open file: " + path.string());
  }
  return in;
}

}  // namespace

MatrixXd read_dense_matrix(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  Index rows = 0;
  Index cols = 0;
  if (!(in >> rows >> cols) || rows < 1 || cols < 1) {
    throw ParseError(path.string() + ": expected header 'rows cols'");
  }
  MatrixXd a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!(in >> a(i, j))) {
        throw ParseError(path.string() + ": truncated dense matrix");
      }
    }
  }
  return a;
}

CsrMap read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw ParseError(path.string() + ": missing MatrixMarket banner");
  }
  std::string lowered = line;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lowered.find("coordinate") == std::string::npos ||
      lowered.find("real") == std::string::npos) {
    throw ParseError(path.string() + ": only 'coordinate real' is supported");
  }
  const bool symmetric = lowered.find("symmetric") != std::string::npos;

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream header(line);
  Index rows = 0;
  Index cols = 0;
  long nnz = 0;
  if (!(header >> rows >> cols >> nnz) || rows < 1 || cols < 1 || nnz < 0) {
    throw ParseError(path.string() + ": bad size line");
  }

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<size_t>(symmetric ? 2 * nnz : nnz));
  for (long e = 0; e < nnz; ++e) {
    Index i = 0;
    Index j = 0;
    double value = 0.0;
    if (!(in >> i >> j >> value)) {
      throw ParseError(path.string() + ": truncated entry list");
    }
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw ParseError(path.string() + ": entry index out of range");
    }
    entries.emplace_back(i - 1, j - 1, value);
    if (symmetric && i != j) {
      entries.emplace_back(j - 1, i - 1, value);
    }
  }
  return CsrMap::from_triplets(rows, cols, entries);
}

MapPtr read_map_file(const std::filesystem::path& path) {
  if (path.extension() == ".mtx") {
    return std::make_shared<CsrMap>(read_matrix_market(path));
  }
  return std::make_shared<DenseMap>(read_dense_matrix(path));
}

VectorXd read_vector_file(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<double> values;
  double v = 0.0;
  while (in >> v) values.push_back(v);
  if (values.empty()) {
    throw ParseError(path.string() + ": empty vector file");
  }
  return Eigen::Map<VectorXd>(values.data(), static_cast<Index>(values.size()));
}

}  // namespace pdprox
