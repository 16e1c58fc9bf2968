#include "mfpca/model.hpp"

#include <algorithm>
#include <cmath>

#include "mfpca/linalg.hpp"

namespace mfpca {

const char* to_string(Pathway p) noexcept {
  switch (p) {
    case Pathway::kGram: return "gram";
    case Pathway::kCovariance: return "cov";
    case Pathway::kBasis: return "basis";
  }
  return "unknown";
}

Pathway parse_pathway(const std::string& name) {
  if (name == "gram") return Pathway::kGram;
  if (name == "cov" || name == "covariance") return Pathway::kCovariance;
  if (name == "basis") return Pathway::kBasis;
  throw Error(ErrorKind::kInvalidArgument, "unknown pathway '" + name + "'");
}

MultiFunction MfpcaModel::eigenfunction(Index k) const {
  MultiFunction f;
  for (const Matrix& e : eigenfunctions) f.push_back(e.row(k).transpose());
  return f;
}

Index select_components(const Vector& values, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "variance threshold must lie in (0, 1]");
  }
  const double total = values.sum();
  if (values.size() == 0 || total <= 0.0) return 0;
  double acc = 0.0;
  for (Index k = 0; k < values.size(); ++k) {
    acc += values(k);
    // The relative slack keeps threshold 1 from missing the last component
    // to rounding in the running sum.
    if (acc >= threshold * total * (1.0 - 1e-14)) return k + 1;
  }
  return values.size();
}

Index ComponentRequest::resolve(const Vector& positive_values, Index available) const {
  const Index k = count > 0 ? count : select_components(positive_values, threshold);
  return std::min(k, available);
}

Dataset reconstruct(const MfpcaModel& model, Index count) {
  if (count < 0 || count > model.n_components()) {
    throw Error(ErrorKind::kInvalidArgument, "reconstruction needs 0 <= K <= number of components");
  }
  std::vector<FeatureBlock> blocks;
  for (std::size_t p = 0; p < model.grids.size(); ++p) {
    Matrix values = model.scores.leftCols(count) * model.eigenfunctions[p].topRows(count);
    values.rowwise() += model.mean[p].transpose();
    blocks.emplace_back(model.grids[p], std::move(values));
  }
  return Dataset(std::move(blocks));
}

void apply_sign_convention(MfpcaModel& model) {
  for (Index k = 0; k < model.n_components(); ++k) {
    double best = 0.0;
    for (const Matrix& e : model.eigenfunctions) {
      Index at = 0;
      const double mag = e.row(k).cwiseAbs().maxCoeff(&at);
      if (mag > std::abs(best)) best = e(k, at);
    }
    if (best < 0.0) {
      for (Matrix& e : model.eigenfunctions) e.row(k) *= -1.0;
      model.scores.col(k) *= -1.0;
    }
  }
}

Vector sqrt_weight(const FeatureWeights* fw, Index p, const DomainGrid& grid) {
  if (fw == nullptr) return Vector::Ones(grid.size());
  return fw->effective_quadrature(p, grid).cwiseQuotient(grid.quadrature()).cwiseSqrt();
}

}  // namespace mfpca
