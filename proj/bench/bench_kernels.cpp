// Serial reference vs OpenMP kernels.  Prints CSV: kernel,n,cols,threads,serial_ms,parallel_ms,max_abs_diff

#include "grank/kernels.hpp"
#include "grank/rng.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using grank::CounterStream;
namespace kernels = grank::kernels;

namespace {

double best_ms(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

Eigen::MatrixXd random_sym(Eigen::Index n, CounterStream& rng) {
  Eigen::MatrixXd g = rng.gaussian_matrix(n, n);
  return 0.5 * (g + g.transpose());
}

}  // namespace

int main() {
  CounterStream rng(1);
  std::printf("kernel,n,cols,threads,serial_ms,parallel_ms,max_abs_diff\n");
  for (Eigen::Index n : {256, 512, 1000, 2000}) {
    const Eigen::MatrixXd a = random_sym(n, rng);
    const Eigen::VectorXd x = rng.gaussian_vector(n);
    Eigen::VectorXd ys, yp;
    const int reps = n >= 1000 ? 5 : 20;
    const double ts = best_ms([&] { kernels::sym_matvec_serial(a, x, ys); }, reps);
    const double tp = best_ms([&] { kernels::sym_matvec_parallel(a, x, yp); }, reps);
    std::printf("matvec,%ld,1,%d,%.3f,%.3f,%.3g\n", static_cast<long>(n), kernels::max_threads(), ts, tp,
                (ys - yp).cwiseAbs().maxCoeff());

    for (Eigen::Index cols : {8, 32}) {
      const Eigen::MatrixXd xb = rng.gaussian_matrix(n, cols);
      Eigen::MatrixXd zs, zp;
      const double ms = best_ms([&] { kernels::sym_matmat_serial(a, xb, zs); }, 3);
      const double mp = best_ms([&] { kernels::sym_matmat_parallel(a, xb, zp); }, 3);
      std::printf("matmat,%ld,%ld,%d,%.3f,%.3f,%.3g\n", static_cast<long>(n), static_cast<long>(cols),
                  kernels::max_threads(), ms, mp, (zs - zp).cwiseAbs().maxCoeff());
    }
  }
  return 0;
}
