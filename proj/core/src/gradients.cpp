#include "spindec/gradients.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "spindec/error.hpp"

namespace spindec {

GradientSet finite_difference_gradients(const TensorOracle& oracle,
                                        const std::vector<Vec3>& positions_ang,
                                        double dx_ang, int n_threads) {
  if (!(dx_ang > 0.0)) throw Error("finite differences: dx must be > 0");
  const std::size_t n = positions_ang.size();
  if (n == 0) throw Error("finite differences: empty geometry");
  if (n_threads < 1) n_threads = 1;

  GradientSet out;
  out.zfs_grad.assign(n, TensorGradient{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()});
  out.hfi_grad.assign(n, TensorGradient{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()});

  std::vector<std::exception_ptr> errors(n);
  std::vector<int> error_dir(n, -1);

  auto worker = [&](std::size_t begin, std::size_t end) {
    std::vector<Vec3> displaced = positions_ang;
    for (std::size_t a = begin; a < end; ++a) {
      for (int d = 0; d < 3; ++d) {
        try {
          displaced[a][d] = positions_ang[a][d] + dx_ang;
          const TensorSet plus = oracle.evaluate(displaced);
          displaced[a][d] = positions_ang[a][d] - dx_ang;
          const TensorSet minus = oracle.evaluate(displaced);
          displaced[a][d] = positions_ang[a][d];

          const double inv = 1.0 / (2.0 * dx_ang);
          out.zfs_grad[a][static_cast<std::size_t>(d)] =
              (plus.zfs.d_GHz - minus.zfs.d_GHz) * inv;
          out.hfi_grad[a][static_cast<std::size_t>(d)] =
              (plus.hfi_MHz[a] - minus.hfi_MHz[a]) * inv;
        } catch (...) {
          errors[a] = std::current_exception();
          error_dir[a] = d;
          displaced[a][d] = positions_ang[a][d];
          break;  // report this atom; remaining directions are moot
        }
      }
    }
  };

  if (n_threads == 1 || n < 2) {
    worker(0, n);
  } else {
    const auto workers = static_cast<std::size_t>(n_threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      if (begin >= n) break;
      pool.emplace_back(worker, begin, std::min(n, begin + chunk));
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t a = 0; a < n; ++a) {
    if (errors[a]) {
      try {
        std::rethrow_exception(errors[a]);
      } catch (const std::exception& e) {
        throw Error("finite differences: oracle failed at atom " + std::to_string(a) +
                    ", direction " + std::to_string(error_dir[a]) + ": " + e.what());
      }
    }
  }
  return out;
}

}  // namespace spindec
