// Copyright 2026 The egosocial Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <span>
#include <stdexcept>

#include "egosocial/errors.hpp"

namespace egosocial {

/// Centers `x` and scales it to unit norm, so that the Pearson coefficient of two
/// vectors is the dot product of their standardized forms.
/// Throws UndefinedCorrelation for a constant vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> standardized(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (x.size() < 2) throw std::invalid_argument("correlation needs at least two samples");
  const Scalar first = x(0);
  if ((x.array() == first).all()) throw UndefinedCorrelation("constant vector has no correlation");
  Vec centered = x.reshaped().array() - x.mean();
  const Scalar norm = centered.norm();
  if (!(norm > Scalar(0))) throw UndefinedCorrelation("constant vector has no correlation");
  return centered / norm;
}

/// Pearson product-moment correlation of two equally long samples, clamped to [-1, 1].
/// Throws UndefinedCorrelation when either sample is constant.
template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar pearson(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  if (x.size() != y.size()) throw std::invalid_argument("pearson: samples differ in length");
  const Scalar r = standardized(x).dot(standardized(y.template cast<Scalar>()));
  return std::clamp(r, Scalar(-1), Scalar(1));
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  using Map = Eigen::Map<const Eigen::VectorXd>;
  return pearson(Map(x.data(), static_cast<Eigen::Index>(x.size())),
                 Map(y.data(), static_cast<Eigen::Index>(y.size())));
}

}  // namespace egosocial
