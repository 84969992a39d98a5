#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <vector>

#include "regx/graph.hpp"

// Data-parallel loops over graphs. Every parallel kernel has a serial
// reference with the same signature; results are written per index and any
// reduction happens afterwards in index order, so both produce bit-identical
// output regardless of the thread count.
namespace regx::kernels {

/// Calls body(i) for i in [0, n) on OpenMP threads. The first exception
/// thrown by any iteration is rethrown after the loop.
void parallel_for(int n, const std::function<void(int)>& body);
void serial_for(int n, const std::function<void(int)>& body);

enum class Exec { serial, parallel };

inline void for_each_index(Exec exec, int n, const std::function<void(int)>& body) {
  if (exec == Exec::parallel) {
    parallel_for(n, body);
  } else {
    serial_for(n, body);
  }
}

/// Number of OpenMP worker threads that parallel_for will use.
int worker_count();
/// Overrides the worker count (<= 0 keeps the OpenMP default).
void set_worker_count(int n);

/// Sums per-item gradient lists in item order.
std::vector<Matrix> ordered_sum(const std::vector<std::vector<Matrix>>& items);

}  // namespace regx::kernels
