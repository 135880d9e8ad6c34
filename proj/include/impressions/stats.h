// Copyright 2026 The Impressions Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small statistics helpers: regularized incomplete beta, Pearson correlation
// with a two-sided Student-t p-value, and a few descriptive summaries.

#ifndef IMPRESSIONS_STATS_H_
#define IMPRESSIONS_STATS_H_

#include <span>
#include <vector>

namespace impressions {

// I_x(a, b) for a, b > 0 and x in [0, 1], by the modified Lentz continued
// fraction (with the symmetry relation applied for x > (a+1)/(a+b+2)).
double RegularizedIncompleteBeta(double a, double b, double x);

struct Correlation {
  double r = 0.0;
  double p_value = 1.0;
  long n = 0;
};

// Sample Pearson r and the two-sided p-value of t = r*sqrt((n-2)/(1-r^2))
// under Student-t with n-2 degrees of freedom, evaluated as
// I_{1-r^2}((n-2)/2, 1/2). Throws TooFewSamples (n < 3), LengthMismatch or
// ConstantInput.
Correlation PearsonWithP(std::span<const double> x, std::span<const double> y);

double Mean(std::span<const double> values);
// Population standard deviation (divides by n).
double PopulationStd(std::span<const double> values);

}  // namespace impressions

#endif  // IMPRESSIONS_STATS_H_
