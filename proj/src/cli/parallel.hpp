#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace finsler::cli::detail {

/// out[i] = f(in[i]) on strided worker threads; results keep input order, first error is rethrown.
template <class In, class F>
auto parallel_map(const std::vector<In>& in, F f) -> std::vector<decltype(f(in[0]))> {
  using Out = decltype(f(in[0]));
  std::vector<Out> out(in.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(in.size(), std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t i = w; i < in.size(); i += workers) out[i] = f(in[i]);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace finsler::cli::detail
