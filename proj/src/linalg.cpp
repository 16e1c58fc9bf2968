#include "mfpca/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mfpca {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_square(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::kShapeMismatch, "matrix is not square");
  if (!m.allFinite()) throw Error(ErrorKind::kInvalidArgument, "matrix has non-finite entries");
}

// Wraps dsyevr on the lower triangle; `il`..`n` are 1-based ascending indices.
EigenSystem run_syevr(const Matrix& m, Index count) {
  const Index n = m.rows();
  EigenSystem es;
  if (n == 0 || count == 0) {
    es.values = Vector::Zero(0);
    es.vectors = Matrix::Zero(n, 0);
    return es;
  }
  Matrix a = m;
  Vector w(n);
  Matrix z(n, count);
  std::vector<lapack_int> support(static_cast<std::size_t>(2 * std::max<Index>(count, 1)));
  lapack_int found = 0;
  const auto ln = static_cast<lapack_int>(n);
  const lapack_int il = static_cast<lapack_int>(n - count + 1);
  const char range = count == n ? 'A' : 'I';
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', range, 'L', ln, a.data(), ln, 0.0, 0.0, il, ln, 0.0,
                     &found, w.data(), z.data(), ln, support.data());
  if (info != 0) {
    throw Error(ErrorKind::kInvalidArgument, "dsyevr failed with info " + std::to_string(info));
  }
  es.values.resize(found);
  es.vectors.resize(n, found);
  for (lapack_int i = 0; i < found; ++i) {
    es.values(i) = w(found - 1 - i);
    es.vectors.col(i) = z.col(found - 1 - i);
  }
  return es;
}

void finish(EigenSystem& es, Index n) {
  const double top = es.values.size() > 0 ? std::max(es.values(0), 0.0) : 0.0;
  es.rank_tolerance = static_cast<double>(n) * kEps * top;
  es.clamped_mass = 0.0;
  es.rank = 0;
  for (Index i = 0; i < es.values.size(); ++i) {
    if (es.values(i) < 0.0) {
      es.clamped_mass += -es.values(i);
      es.values(i) = 0.0;
    }
    if (es.values(i) > es.rank_tolerance) ++es.rank;
  }
}

}  // namespace

EigenSystem symmetric_eigen(const Matrix& m) {
  require_square(m);
  EigenSystem es = run_syevr(m, m.rows());
  finish(es, m.rows());
  return es;
}

EigenSystem symmetric_eigen_leading(const Matrix& m, Index count) {
  require_square(m);
  count = std::clamp<Index>(count, 0, m.rows());
  EigenSystem es = run_syevr(m, count);
  finish(es, m.rows());
  return es;
}

Matrix symmetric_sqrt(const Matrix& w) {
  require_square(w);
  if (w.rows() == 0) return w;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w);
  const Vector& d = solver.eigenvalues();
  const double top = d.maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorKind::kBasisDegeneracy, "basis Gram matrix has no positive eigenvalue");
  if (d.minCoeff() < -std::sqrt(kEps) * top) {
    throw Error(ErrorKind::kBasisDegeneracy, "basis Gram matrix is not positive semidefinite");
  }
  const Vector root = d.cwiseMax(kEps * top).cwiseSqrt();
  return solver.eigenvectors() * root.asDiagonal() * solver.eigenvectors().transpose();
}

std::vector<std::pair<Index, Index>> degenerate_blocks(const Vector& values, double relative_gap) {
  std::vector<std::pair<Index, Index>> blocks;
  Index start = 0;
  for (Index i = 1; i <= values.size(); ++i) {
    const bool close =
        i < values.size() &&
        std::abs(values(i - 1) - values(i)) <=
            relative_gap * std::max(std::abs(values(i - 1)), std::abs(values(i)));
    if (!close) {
      if (i - 1 > start) blocks.emplace_back(start, i - 1);
      start = i;
    }
  }
  return blocks;
}

}  // namespace mfpca
