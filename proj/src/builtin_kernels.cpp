#include "iolb/kernel.hpp"

namespace iolb {

namespace {

using E = AffineExpr;

AffineKernel make_mgs() {
  KernelBuilder b("mgs");
  E M = b.parameter("M"), N = b.parameter("N");
  b.loop("k", 0, N, [&](const E& k) {
    b.statement("nrm_init", access("nrm", {k}), {});
    b.loop("i", 0, M, [&](const E& i) {
      b.statement("nrm_acc", access("nrm", {k}), {access("nrm", {k}), access("A", {i, k})});
    });
    b.statement("rdiag", access("R", {k, k}), {access("nrm", {k})});
    b.loop("i", 0, M, [&](const E& i) {
      b.statement("qcol", access("Q", {i, k}), {access("A", {i, k}), access("R", {k, k})});
    });
    b.loop("j", k + 1, N, [&](const E& j) {
      b.statement("r_init", access("R", {k, j}), {});
      b.loop("i", 0, M, [&](const E& i) {
        b.statement("SR", access("R", {k, j}), {access("R", {k, j}), access("Q", {i, k}), access("A", {i, j})});
      });
      b.loop("i", 0, M, [&](const E& i) {
        b.statement("SU", access("A", {i, j}), {access("A", {i, j}), access("Q", {i, k}), access("R", {k, j})});
      });
    });
  });
  b.output("Q");
  b.output("R");
  return b.build();
}

// tau[j] used as a per-column temporary is versioned as tauj[k][j].
AffineKernel make_a2v() {
  KernelBuilder b("hh_a2v");
  E M = b.parameter("M"), N = b.parameter("N");
  b.loop("k", 0, N, [&](const E& k) {
    b.statement("n2_init", access("norma2", {k}), {});
    b.loop("i", k + 1, M, [&](const E& i) {
      b.statement("n2_acc", access("norma2", {k}), {access("norma2", {k}), access("A", {i, k})});
    });
    b.statement("norma", access("norma", {k}), {access("A", {k, k}), access("norma2", {k})});
    b.statement("akk_shift", access("A", {k, k}), {access("A", {k, k}), access("norma", {k})});
    b.statement("tau", access("tau", {k}), {access("norma2", {k}), access("A", {k, k})});
    b.loop("i", k + 1, M, [&](const E& i) {
      b.statement("scale", access("A", {i, k}), {access("A", {i, k}), access("A", {k, k})});
    });
    b.statement("akk_final", access("A", {k, k}), {access("A", {k, k}), access("norma", {k})});
    b.loop("j", k + 1, N, [&](const E& j) {
      b.statement("w_init", access("tauj", {k, j}), {access("A", {k, j})});
      b.loop("i", k + 1, M, [&](const E& i) {
        b.statement("SR", access("tauj", {k, j}),
                    {access("tauj", {k, j}), access("A", {i, k}), access("A", {i, j})});
      });
      b.statement("w_scale", access("tauj", {k, j}), {access("tau", {k}), access("tauj", {k, j})});
      b.statement("row_upd", access("A", {k, j}), {access("A", {k, j}), access("tauj", {k, j})});
      b.loop("i", k + 1, M, [&](const E& i) {
        b.statement("SU", access("A", {i, j}),
                    {access("A", {i, j}), access("A", {i, k}), access("tauj", {k, j})});
      });
    });
  });
  b.output("A");
  b.output("tau");
  return b.build();
}

AffineKernel make_v2q() {
  KernelBuilder b("hh_v2q");
  E M = b.parameter("M"), N = b.parameter("N");
  b.loop_down("k", 0, N, [&](const E& k) {
    b.loop("j", k + 1, N, [&](const E& j) {
      b.statement("w_init", access("tauj", {k, j}), {});
      b.loop("i", k + 1, M, [&](const E& i) {
        b.statement("SR", access("tauj", {k, j}),
                    {access("tauj", {k, j}), access("A", {i, k}), access("A", {i, j})});
      });
    });
    b.loop("j", k + 1, N, [&](const E& j) {
      b.statement("ST", access("tauj", {k, j}), {access("tauj", {k, j}), access("tau", {k})});
    });
    b.statement("akk", access("A", {k, k}), {access("tau", {k})});
    b.loop("j", k + 1, N, [&](const E& j) {
      b.statement("row", access("A", {k, j}), {access("tauj", {k, j})});
    });
    b.loop("j", k + 1, N, [&](const E& j) {
      b.loop("i", k + 1, M, [&](const E& i) {
        b.statement("SU", access("A", {i, j}),
                    {access("A", {i, j}), access("A", {i, k}), access("tauj", {k, j})});
      });
    });
    b.loop("i", k + 1, M, [&](const E& i) {
      b.statement("col", access("A", {i, k}), {access("A", {i, k}), access("tau", {k})});
    });
  });
  b.output("A");
  return b.build();
}

// Scalars norma2, norma, tau are versioned by j; tmp[i] becomes tmp[j][i] for both sweeps.
AffineKernel make_gehd2() {
  KernelBuilder b("gehd2");
  E N = b.parameter("N");
  b.loop("j", 0, N - 2, [&](const E& j) {
    b.statement("n2_init", access("norma2", {j}), {});
    b.loop("i", j + 2, N, [&](const E& i) {
      b.statement("n2_acc", access("norma2", {j}), {access("norma2", {j}), access("A", {i, j})});
    });
    b.statement("norma", access("norma", {j}), {access("A", {j + 1, j}), access("norma2", {j})});
    b.statement("shift", access("A", {j + 1, j}), {access("A", {j + 1, j}), access("norma", {j})});
    b.statement("tau", access("tau", {j}), {access("norma2", {j}), access("A", {j + 1, j})});
    b.loop("i", j + 2, N, [&](const E& i) {
      b.statement("scale", access("A", {i, j}), {access("A", {i, j}), access("A", {j + 1, j})});
    });
    b.statement("fix", access("A", {j + 1, j}), {access("A", {j + 1, j}), access("norma", {j})});
    b.loop("i", j + 1, N, [&](const E& i) {
      b.statement("c_init", access("tmp", {j, i}), {access("A", {j + 1, i})});
      b.loop("k", j + 2, N, [&](const E& k) {
        b.statement("c_red", access("tmp", {j, i}),
                    {access("tmp", {j, i}), access("A", {k, j}), access("A", {k, i})});
      });
    });
    b.loop("i", j + 1, N, [&](const E& i) {
      b.statement("c_scale", access("tmp", {j, i}), {access("tmp", {j, i}), access("tau", {j})});
    });
    b.loop("i", j + 1, N, [&](const E& i) {
      b.statement("c_row", access("A", {j + 1, i}), {access("A", {j + 1, i}), access("tmp", {j, i})});
    });
    b.loop("i", j + 2, N, [&](const E& i) {
      b.loop("k", j + 1, N, [&](const E& k) {
        b.statement("c_upd", access("A", {i, k}),
                    {access("A", {i, k}), access("A", {i, j}), access("tmp", {j, k})});
      });
    });
    b.loop("i", 0, N, [&](const E& i) {
      b.statement("r_init", access("tmp", {j, i}), {access("A", {i, j + 1})});
      b.loop("k", j + 2, N, [&](const E& k) {
        b.statement("r_red", access("tmp", {j, i}),
                    {access("tmp", {j, i}), access("A", {i, k}), access("A", {k, j})});
      });
    });
    b.loop("i", 0, N, [&](const E& i) {
      b.statement("r_scale", access("tmp", {j, i}), {access("tmp", {j, i}), access("tau", {j})});
    });
    b.loop("i", 0, N, [&](const E& i) {
      b.statement("r_col", access("A", {i, j + 1}), {access("A", {i, j + 1}), access("tmp", {j, i})});
    });
    b.loop("i", 0, N, [&](const E& i) {
      b.loop("k", j + 2, N, [&](const E& k) {
        b.statement("r_upd", access("A", {i, k}),
                    {access("A", {i, k}), access("tmp", {j, i}), access("A", {k, j})});
      });
    });
  });
  b.output("A");
  b.output("tau");
  return b.build();
}

}  // namespace

AffineKernel builtin_kernel(std::string_view name) {
  if (name == "mgs") return make_mgs();
  if (name == "hh_a2v") return make_a2v();
  if (name == "hh_v2q") return make_v2q();
  if (name == "gehd2") return make_gehd2();
  throw KernelError("unknown kernel id '" + std::string(name) + "'");
}

std::vector<std::string> builtin_kernel_names() { return {"mgs", "hh_a2v", "hh_v2q", "gehd2"}; }

}  // namespace iolb
