// Times the OpenMP assembly/application lanes against the serial reference
// implementations on a moderate mesh and reports the speedup. The serial lane
// shares the row engine, so the outputs are also checked bit for bit.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "lbdie/coefficients.hpp"
#include "lbdie/parallel.hpp"
#include "lbdie/potentials.hpp"

using namespace lbdie;
using clockt = std::chrono::steady_clock;

namespace {

double run_ms(const std::function<VecField()>& body, VecField& out) {
  const auto t0 = clockt::now();
  out = body();
  return std::chrono::duration<double, std::milli>(clockt::now() - t0).count();
}

bool identical(const VecField& a, const VecField& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const int grid = argc > 1 ? std::atoi(argv[1]) : 10;
  const int level = argc > 2 ? std::atoi(argv[2]) : 2;

  KernelSet ks{make_lame(2.0, 1.0), make_chi1k(3, 1.0)};
  auto vm = build_ball_volume(grid);
  auto sm = build_ball_surface(level);

  VecField du(vm.cells.size()), dg(sm.panels.size());
  for (std::size_t j = 0; j < vm.cells.size(); ++j) {
    const auto& c = vm.cells[j].centroid;
    du[j] = Eigen::Vector3d(c.x() + 0.2 * c.y(), c.z(), c.x() * c.z() - 1.0);
  }
  for (std::size_t i = 0; i < sm.panels.size(); ++i) {
    const auto& c = sm.panels[i].centroid;
    dg[i] = Eigen::Vector3d(c.x(), c.y() - c.z(), 0.5);
  }
  std::vector<Eigen::Vector3d> targets;
  for (const auto& c : vm.cells) targets.push_back(c.centroid);

  std::printf("grid %d (%zu cells), surface level %d (%zu panels), %d workers\n", grid,
              vm.cells.size(), level, sm.panels.size(), worker_count());
  std::printf("%-10s %12s %12s %9s %6s\n", "operator", "parallel ms", "serial ms", "speedup",
              "equal");

  struct Row {
    const char* name;
    std::function<VecField()> par, ser;
  };
  const Row rows[] = {
      {"N", [&] { return apply_N(ks, vm, du, targets); },
       [&] { return apply_N_serial(ks, vm, du, targets); }},
      {"Pvol", [&] { return apply_Pvol(ks, vm, du, targets); },
       [&] { return apply_Pvol_serial(ks, vm, du, targets); }},
      {"V", [&] { return apply_V(ks, sm, dg, targets); },
       [&] { return apply_V_serial(ks, sm, dg, targets); }},
      {"W", [&] { return apply_W(ks, sm, dg, targets); },
       [&] { return apply_W_serial(ks, sm, dg, targets); }},
  };

  bool all_equal = true;
  for (const auto& row : rows) {
    VecField out_par, out_ser;
    const double tp = run_ms(row.par, out_par);
    const double ts = run_ms(row.ser, out_ser);
    const bool eq = identical(out_par, out_ser);
    all_equal = all_equal && eq;
    std::printf("%-10s %12.1f %12.1f %8.2fx %6s\n", row.name, tp, ts, ts / tp,
                eq ? "yes" : "NO");
  }
  return all_equal ? 0 : 1;
}
