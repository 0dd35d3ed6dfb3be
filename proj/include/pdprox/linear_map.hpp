#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <filesystem>
#include <memory>
#include <utility>
#include <vector>

#include "pdprox/errors.hpp"

namespace pdprox {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// A linear operator x -> Ax with an adjoint.  Maps are immutable after
/// construction; apply/apply_adjoint are safe to call concurrently.
class LinearMap {
 public:
  virtual ~LinearMap() = default;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  VectorXd apply(const VectorXd& x) const {
    if (x.size() != cols_) {
      throw DimensionError("apply: expected vector of length " +
                           std::to_string(cols_) + ", got " +
                           std::to_string(x.size()));
    }
    return do_apply(x);
  }

  VectorXd apply_adjoint(const VectorXd& y) const {
    if (y.size() != rows_) {
      throw DimensionError("apply_adjoint: expected vector of length " +
                           std::to_string(rows_) + ", got " +
                           std::to_string(y.size()));
    }
    return do_apply_adjoint(y);
  }

  /// True for representations that are symmetric positive semidefinite by
  /// construction (graph Laplacians, gram compositions).
  virtual bool symmetric_psd() const { return false; }

 protected:
  LinearMap(Index rows, Index cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 1) {
      throw DimensionError("LinearMap: dimensions must be positive");
    }
  }

  virtual VectorXd do_apply(const VectorXd& x) const = 0;
  virtual VectorXd do_apply_adjoint(const VectorXd& y) const = 0;

 private:
  Index rows_;
  Index cols_;
};

using MapPtr = std::shared_ptr<const LinearMap>;

/// Dense row-major matrix.
class DenseMap final : public LinearMap {
 public:
  explicit DenseMap(MatrixXd a) : LinearMap(a.rows(), a.cols()), a_(std::move(a)) {}

  const MatrixXd& matrix() const { return a_; }

 private:
  VectorXd do_apply(const VectorXd& x) const override { return a_ * x; }
  VectorXd do_apply_adjoint(const VectorXd& y) const override {
    return a_.transpose() * y;
  }

  MatrixXd a_;
};

/// Compressed-sparse-row matrix.
class CsrMap final : public LinearMap {
 public:
  explicit CsrMap(Eigen::SparseMatrix<double, Eigen::RowMajor> a)
      : LinearMap(a.rows(), a.cols()), a_(std::move(a)) {}

  static CsrMap from_triplets(Index rows, Index cols,
                              const std::vector<Eigen::Triplet<double>>& entries);

  const Eigen::SparseMatrix<double, Eigen::RowMajor>& matrix() const { return a_; }

 private:
  VectorXd do_apply(const VectorXd& x) const override { return a_ * x; }
  VectorXd do_apply_adjoint(const VectorXd& y) const override {
    return a_.transpose() * y;
  }

  Eigen::SparseMatrix<double, Eigen::RowMajor> a_;
};

/// Graph Laplacian acting blockwise on R^{n x d}, stored as node-major flat
/// vectors of length n*d.  Symmetric PSD; the kernel contains all
/// block-constant vectors.
class LaplacianMap final : public LinearMap {
 public:
  struct Edge {
    int i;
    int j;
    double weight;
  };

  LaplacianMap(int node_count, int block_dim, std::vector<Edge> edges);

  bool symmetric_psd() const override { return true; }
  int node_count() const { return nodes_; }
  int block_dim() const { return block_dim_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// The n x n Laplacian matrix (block structure elided).
  MatrixXd node_matrix() const;

 private:
  VectorXd do_apply(const VectorXd& x) const override;
  VectorXd do_apply_adjoint(const VectorXd& y) const override {
    return do_apply(y);
  }

  int nodes_;
  int block_dim_;
  std::vector<Edge> edges_;
  VectorXd degree_;
};

/// Gram composition x -> A^T A x of an arbitrary map.  Symmetric PSD.
class GramMap final : public LinearMap {
 public:
  explicit GramMap(MapPtr inner)
      : LinearMap(inner->cols(), inner->cols()), inner_(std::move(inner)) {}

  bool symmetric_psd() const override { return true; }
  const MapPtr& inner() const { return inner_; }

 private:
  VectorXd do_apply(const VectorXd& x) const override {
    return inner_->apply_adjoint(inner_->apply(x));
  }
  VectorXd do_apply_adjoint(const VectorXd& y) const override {
    return do_apply(y);
  }

  MapPtr inner_;
};

/// Scalar multiple of another map.
class ScaledMap final : public LinearMap {
 public:
  ScaledMap(MapPtr inner, double scale)
      : LinearMap(inner->rows(), inner->cols()),
        inner_(std::move(inner)),
        scale_(scale) {}

  bool symmetric_psd() const override {
    return scale_ >= 0.0 && inner_->symmetric_psd();
  }

 private:
  VectorXd do_apply(const VectorXd& x) const override {
    return scale_ * inner_->apply(x);
  }
  VectorXd do_apply_adjoint(const VectorXd& y) const override {
    return scale_ * inner_->apply_adjoint(y);
  }

  MapPtr inner_;
  double scale_;
};

/// x -> A^T A x for the given map.
inline MapPtr build_gram(MapPtr a) {
  return std::make_shared<GramMap>(std::move(a));
}

struct NormEstimate {
  double value = 0.0;
  long iterations = 0;
  bool converged = true;
};

/// Power iteration estimate of the operator norm (largest singular value).
/// Runs on A^T A, or on A itself when it is symmetric PSD.  The start vector
/// is pseudo-random with a fixed seed so estimates are reproducible.
NormEstimate estimate_operator_norm(const LinearMap& map, double tol = 1e-6,
                                    long max_iters = 5000, unsigned seed = 42);

/// Whitespace-separated dense text: first line "rows cols", then the entries
/// row by row.
MatrixXd read_dense_matrix(const std::filesystem::path& path);

/// Matrix Market coordinate format (real, general or symmetric).
CsrMap read_matrix_market(const std::filesystem::path& path);

/// Dispatch on extension: ".mtx" -> CsrMap, anything else -> DenseMap.
MapPtr read_map_file(const std::filesystem::path& path);

/// One number per line.
VectorXd read_vector_file(const std::filesystem::path& path);

}  // namespace pdprox
