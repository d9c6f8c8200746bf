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

#include "wharness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wharness::bench {

double mean(const std::vector<double>& values)
{
  if (values.empty())
    return 0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::vector<double> values)
{
  if (values.empty())
    return 0;
  std::sort(values.begin(), values.end());
  auto n = values.size();
  if (n % 2 == 1)
    return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double percentile(std::vector<double> values, double p)
{
  if (values.empty())
    return 0;
  std::sort(values.begin(), values.end());
  auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return values[rank - 1];
}

double stddev(const std::vector<double>& values)
{
  if (values.empty())
    return 0;
  double m = mean(values);
  double acc = 0;
  for (double v : values)
    acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(values.size()));
}

Distribution describe(const std::vector<double>& values)
{
  Distribution d;
  if (values.empty())
    return d;
  d.count = values.size();
  d.mean = mean(values);
  d.median = median(values);
  d.p95 = percentile(values, 95);
  d.p99 = percentile(values, 99);
  d.stddev = stddev(values);
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  d.min = *lo;
  d.max = *hi;
  return d;
}

} // namespace wharness::bench
