/*
 * Copyright 2026 The gadm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#include "gadm/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace gadm {

double squared_exponential(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, double eps) {
  return std::exp(-(a - b).squaredNorm() / (2.0 * eps));
}

Matrix squared_exponential_kernel(const Matrix& points, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("squared_exponential_kernel: eps must be positive");
  const Eigen::Index n = points.rows();
  const Matrix rows = points.transpose();  // column access is contiguous
  Matrix k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double value = squared_exponential(rows.col(i), rows.col(j), eps);
      k(i, j) = value;
      k(j, i) = value;
    }
  }
  return k;
}

std::vector<double> pairwise_distances(const Matrix& points) {
  const Eigen::Index n = points.rows();
  const Matrix rows = points.transpose();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) out.push_back((rows.col(i) - rows.col(j)).norm());
  }
  return out;
}

double median_bandwidth(const Matrix& points) {
  if (points.rows() < 2) throw PreconditionError("median_bandwidth: need at least two points");
  std::vector<double> d = pairwise_distances(points);
  const std::size_t m = d.size();
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(d.begin(), mid, d.end());
  double median = *mid;
  if (m % 2 == 0) {
    median = 0.5 * (median + *std::max_element(d.begin(), mid));
  }
  return median * median;
}

}  // namespace gadm
