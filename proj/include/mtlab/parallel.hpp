#pragma once

#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <omp.h>

namespace mtlab {

/// Explicit request if nonzero, else MTLAB_WORKERS, else the OpenMP default.
/// A malformed MTLAB_WORKERS value is ignored.
inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MTLAB_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return static_cast<std::size_t>(omp_get_max_threads());
}

/// Reference runner: task(0), ..., task(count - 1) in order.
template <class Result, class Task>
std::vector<Result> run_tasks_serial(std::size_t count, Task&& task) {
  std::vector<Result> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(task(i));
  return out;
}

/// Same results as run_tasks_serial; each slot is written by exactly one
/// worker, so the output does not depend on the worker count. The first
/// exception (by task index) is rethrown after the loop.
template <class Result, class Task>
std::vector<Result> run_tasks_parallel(std::size_t count, std::size_t workers, Task&& task) {
  std::vector<Result> out(count);
  std::vector<std::exception_ptr> errors(count);
  const auto total = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(static_cast<int>(workers > 0 ? workers : 1))
  for (long long i = 0; i < total; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = task(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Serial for one worker, OpenMP otherwise.
template <class Result, class Task>
std::vector<Result> run_tasks(std::size_t count, std::size_t workers, Task&& task) {
  if (workers <= 1) return run_tasks_serial<Result>(count, task);
  return run_tasks_parallel<Result>(count, workers, task);
}

}  // namespace mtlab
