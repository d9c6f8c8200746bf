/*
 *    Copyright 2026 The wharness Authors
 *
 *    SPDX-License-Identifier: Apache-2.0
 *
 *    Licensed under the Apache License, Version 2.0 (the "License");
 *    you may not use this file except in compliance with the License.
 *    You may obtain a copy of the License at
 *
 *        http://www.apache.org/licenses/LICENSE-2.0
 *
 *    Unless required by applicable law or agreed to in writing, software
 *    distributed under the License is distributed on an "AS IS" BASIS,
 *    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *    See the License for the specific language governing permissions and
 *    limitations under the License.
 */

#pragma once

#include <cstddef>
#include <vector>

namespace wharness::bench {

struct Distribution {
  std::size_t count = 0;
  double mean = 0;
  double median = 0;
  double p95 = 0;
  double p99 = 0;
  double stddev = 0; ///< population
  double min = 0;
  double max = 0;
};

double mean(const std::vector<double>& values);
/// Average of the two middle elements for even sizes.
double median(std::vector<double> values);
/// Nearest rank: the ceil(p/100 * n)-th smallest value, p in (0, 100].
double percentile(std::vector<double> values, double p);
double stddev(const std::vector<double>& values);

/// All fields zero for an empty input.
Distribution describe(const std::vector<double>& values);

} // namespace wharness::bench
