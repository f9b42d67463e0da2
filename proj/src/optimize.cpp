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

#include "tempocorr/optimize.hpp"

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace tempocorr {

namespace {

class Negated final : public ceres::FirstOrderFunction {
   public:
    Negated(const Objective &f, int n) : f_(f), n_(n) {}
    bool Evaluate(const double *x, double *cost, double *grad) const override {
        *cost = -f_(x, grad);
        if (grad) {
            for (int i = 0; i < n_; ++i) {
                grad[i] = -grad[i];
            }
        }
        return std::isfinite(*cost);
    }
    int NumParameters() const override { return n_; }

   private:
    const Objective &f_;
    int n_;
};

}  // namespace

LocalResult maximize_local(const Objective &f, std::vector<double> x0, int max_iterations, double tolerance) {
    const int n = static_cast<int>(x0.size());
    LocalResult out;
    if (n == 0) {
        out.value = f(nullptr, nullptr);
        return out;
    }
    ceres::GradientProblem problem(new Negated(f, n));
    ceres::GradientProblemSolver::Options options;
    options.line_search_direction_type = ceres::LBFGS;
    options.max_num_iterations = max_iterations;
    options.function_tolerance = tolerance;
    options.gradient_tolerance = 1e-12;
    options.parameter_tolerance = 1e-14;
    options.logging_type = ceres::SILENT;
    options.minimizer_progress_to_stdout = false;
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(options, problem, x0.data(), &summary);
    out.value = f(x0.data(), nullptr);
    out.x = std::move(x0);
    out.iterations = static_cast<int>(summary.iterations.size());
    return out;
}

Objective numeric_gradient(std::function<double(const double *)> f, int n, double h) {
    return [f = std::move(f), n, h](const double *x, double *grad) {
        const double value = f(x);
        if (grad) {
            std::vector<double> y(x, x + n);
            for (int i = 0; i < n; ++i) {
                const double xi = y[static_cast<std::size_t>(i)];
                y[static_cast<std::size_t>(i)] = xi + h;
                const double up = f(y.data());
                y[static_cast<std::size_t>(i)] = xi - h;
                const double down = f(y.data());
                y[static_cast<std::size_t>(i)] = xi;
                grad[i] = (up - down) / (2.0 * h);
            }
        }
        return value;
    };
}

RestartStats summarize(std::vector<double> values) {
    RestartStats s;
    s.restarts = static_cast<int>(values.size());
    if (values.empty()) {
        return s;
    }
    std::sort(values.begin(), values.end());
    s.worst = values.front();
    s.best = values.back();
    s.median = values[values.size() / 2];
    s.hits = static_cast<int>(std::count_if(values.begin(), values.end(), [&](double v) { return v >= s.best - 1e-6; }));
    return s;
}

int thread_count(int requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char *env = std::getenv("TEMPOCORR_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception &) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

void parallel_for(int count, int threads, const std::function<void(int)> &body) {
    threads = std::clamp(threads, 1, std::max(count, 1));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace detail

}  // namespace tempocorr
