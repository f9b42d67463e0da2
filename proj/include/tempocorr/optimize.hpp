// Copyright 2026 The tempocorr Authors
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

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tempocorr/random.hpp"

namespace tempocorr {

struct OptimizerConfig {
    int restarts = 50;
    int max_iterations = 10'000;
    /// Relative improvement below which a local run stops.
    double tolerance = 1e-9;
    std::uint64_t seed = 1;
    /// 0 means TEMPOCORR_THREADS, or the hardware concurrency when unset.
    int threads = 0;
};

/// Value to maximize at x; writes the gradient when `grad` is not null.
using Objective = std::function<double(const double *x, double *grad)>;

struct LocalResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

/// L-BFGS ascent from x0.
LocalResult maximize_local(const Objective &f, std::vector<double> x0, int max_iterations, double tolerance);

/// Central differences with step h around a plain function of n variables.
Objective numeric_gradient(std::function<double(const double *)> f, int n, double h = 1e-6);

struct RestartStats {
    int restarts = 0;
    /// Restarts within 1e-6 of the best value.
    int hits = 0;
    double best = 0.0;
    double median = 0.0;
    double worst = 0.0;
};

RestartStats summarize(std::vector<double> values);

/// Worker count: `requested` if positive, else TEMPOCORR_THREADS, else the hardware concurrency.
int thread_count(int requested);

/// Runs job(i, rng_i) for i < count with rng_i seeded by derive_seed(seed, i); results keep index order, so the
/// outcome does not depend on the number of threads.
template <class R>
std::vector<R> run_restarts(int count, std::uint64_t seed, int threads, const std::function<R(int, Rng &)> &job);

namespace detail {
void parallel_for(int count, int threads, const std::function<void(int)> &body);
}

template <class R>
std::vector<R> run_restarts(int count, std::uint64_t seed, int threads, const std::function<R(int, Rng &)> &job) {
    std::vector<R> out(static_cast<std::size_t>(count));
    detail::parallel_for(count, thread_count(threads), [&](int i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        out[static_cast<std::size_t>(i)] = job(i, rng);
    });
    return out;
}

}  // namespace tempocorr
