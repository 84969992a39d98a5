#include "regx/kernels.hpp"

#include <omp.h>

namespace regx::kernels {

void parallel_for(int n, const std::function<void(int)>& body) {
  std::exception_ptr first;
  std::mutex mu;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

void serial_for(int n, const std::function<void(int)>& body) {
  for (int i = 0; i < n; ++i) body(i);
}

int worker_count() { return omp_get_max_threads(); }

void set_worker_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

std::vector<Matrix> ordered_sum(const std::vector<std::vector<Matrix>>& items) {
  std::vector<Matrix> total;
  for (const auto& item : items) {
    if (total.empty()) {
      total = item;
      continue;
    }
    for (std::size_t k = 0; k < item.size(); ++k) total[k] += item[k];
  }
  return total;
}

}  // namespace regx::kernels
