// Copyright 2026 The LDP-FL Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LDPFL_STATS_H_
#define LDPFL_STATS_H_

#include <cstddef>
#include <span>
#include <vector>

namespace ldpfl::stats {

double Mean(std::span<const double> x);

// Unbiased sample variance (n - 1 denominator); 0 for fewer than 2 values.
double SampleVariance(std::span<const double> x);

// Linear-interpolation quantile (type 7) of an unsorted sample, p in [0, 1].
double Quantile(std::vector<double> x, double p);

// Kolmogorov-Smirnov statistic of the sample against Uniform(lo, hi).
double KsUniformStatistic(std::vector<double> x, double lo, double hi);

// Asymptotic p-value Pr[D_n >= d] with Stephens' small-sample correction.
double KsPValue(double d, std::size_t n);

}  // namespace ldpfl::stats

#endif  // LDPFL_STATS_H_
