// Copyright 2026 The PAPO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAPO_STATS_HPP_
#define PAPO_STATS_HPP_

#include <span>

namespace papo {

// P(|T| >= |t|) for Student's t with `dof` degrees of freedom. Infinite |t|
// gives 0; NaN gives 1.
double student_t_two_sided_p(double t, double dof);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

// Pearson correlation of average ranks (ties share their mean rank).
double spearman_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace papo

#endif  // PAPO_STATS_HPP_
