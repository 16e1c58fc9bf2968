#pragma once

// Plain CSV import/export of datasets, Gram matrices, fitted models and
// basis coefficients. Numbers are written with 17 significant digits so a
// round trip is exact.

#include <filesystem>
#include <string>

#include "mfpca/fdata.hpp"
#include "mfpca/mfpca_basis.hpp"
#include "mfpca/model.hpp"
#include "mfpca/simulation.hpp"

namespace mfpca {

/// Directory layout: grid_<p>.csv (one line per axis), feature_<p>.csv
/// (header "N=<n>,axes=<m0>x<m1>", then one row per observation),
/// mask_<p>.csv (0/1 rows) and weights.csv (one pi_n per line).
void write_dataset(const std::filesystem::path& dir, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& dir);

/// Header "N=<n>", then n rows.
void write_gram(const std::filesystem::path& file, const Matrix& m);
Matrix read_gram(const std::filesystem::path& file);

/// eigenvalues.csv (k,lambda,explained), scores.csv (N x K),
/// eigenfunctions_<p>.csv (one component per row), mean_<p>.csv.
void write_model(const std::filesystem::path& dir, const MfpcaModel& model);

/// Header "blocks=<K_1>;<K_2>;...", then one row per observation.
void write_coefficients(const std::filesystem::path& file, const CoefficientMatrix& c);
CoefficientMatrix read_coefficients(const std::filesystem::path& file);

/// k,lambda,alpha per component.
void write_kl_model(const std::filesystem::path& file, const KLModel& model);

std::string format_double(double v);

}  // namespace mfpca
