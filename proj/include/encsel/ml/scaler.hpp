#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "encsel/ml/dataset.hpp"

namespace encsel::ml {

// Per-feature z-score with population standard deviation. Zero-variance
// features map to 0.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::vector<double> apply(std::span<const double> x) const {
    if (x.size() != mean.size()) throw DataError("scaler expects " + std::to_string(mean.size()) + " features, got " + std::to_string(x.size()));
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = stddev[j] > 0 ? (x[j] - mean[j]) / stddev[j] : 0.0;
    return out;
  }

  Matrix apply(const Matrix& m) const {
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto scaled = apply(m.row(r));
      std::copy(scaled.begin(), scaled.end(), out.row(r).begin());
    }
    return out;
  }

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

inline Scaler fit_scaler(const Matrix& m) {
  if (m.rows() == 0) throw PreconditionError("fit_scaler needs at least one row");
  Scaler s;
  s.mean.assign(m.cols(), 0.0);
  s.stddev.assign(m.cols(), 0.0);
  const double n = static_cast<double>(m.rows());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) sum += m(r, j);
    const double mu = sum / n;
    double ss = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r) ss += (m(r, j) - mu) * (m(r, j) - mu);
    s.mean[j] = mu;
    s.stddev[j] = std::sqrt(ss / n);
  }
  return s;
}

inline std::vector<double> apply_scaler(const Scaler& s, std::span<const double> x) { return s.apply(x); }

}  // namespace encsel::ml
