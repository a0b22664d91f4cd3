#include "iolb/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace iolb;

namespace {

struct Common {
  std::string kernel;
  std::optional<std::int64_t> M, N, S;
  bool json = false;
  std::string out;
};

void add_kernel(CLI::App* cmd, Common& c) {
  cmd->add_option("kernel_id", c.kernel, "mgs, hh_a2v, hh_v2q, gehd2 (gebd2 for bound)");
  cmd->add_option("--kernel", c.kernel, "kernel id");
}

void add_sizes(CLI::App* cmd, Common& c) {
  cmd->add_option("-M", c.M, "rows");
  cmd->add_option("-N", c.N, "columns");
  cmd->add_option("-S", c.S, "cache size");
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw std::runtime_error("cannot write " + c.out);
  f << text;
}

Binding sizes(const Common& c, const AffineKernel* kernel) {
  Binding b;
  auto need = [&](const char* name, const std::optional<std::int64_t>& v) {
    if (kernel && !kernel->has_parameter(name)) return;
    if (!v) throw std::invalid_argument(std::string("-") + name + " is required");
    b[name] = *v;
  };
  need("M", c.M);
  need("N", c.N);
  if (c.S) b["S"] = *c.S;
  return b;
}

std::string binding_text(const Binding& b) {
  std::string s;
  for (const auto& [k, v] : b) s += (s.empty() ? "" : " ") + k + "=" + std::to_string(v);
  return s;
}

std::string value_text(const BoundValue& v) {
  if (!v.applicable) return "n/a (" + v.reason + ")";
  std::string s = v.exact ? to_string(*v.exact) + " ~ " + to_decimal(*v.exact)
                          : "~ " + to_decimal(v.enclosure.lo, 10) + " (irrational)";
  if (v.split_value) s += " at split " + std::to_string(*v.split_value);
  return s;
}

int cmd_bound(const Common& c, bool symbolic) {
  bool catalog_only = c.kernel == "gebd2";
  std::optional<CatalogEntry> cat;
  auto names = catalog_names();
  if (std::find(names.begin(), names.end(), c.kernel) != names.end()) cat = catalog(c.kernel);

  Json j;
  std::ostringstream text;
  j["kernel"] = c.kernel;
  std::optional<Binding> binding;
  if (catalog_only) {
    if (!cat) throw KernelError("unknown kernel " + c.kernel);
    if (c.M && c.N && c.S) binding = Binding{{"M", *c.M}, {"N", *c.N}, {"S", *c.S}};
    j["note"] = "catalog only: no kernel model or CDAG";
    text << "kernel " << c.kernel << ": catalog only (no kernel model or CDAG)\n";
  } else {
    AffineKernel kernel = builtin_kernel(c.kernel);
    if (c.S && (!kernel.has_parameter("M") || c.M) && c.N) binding = sizes(c, &kernel);
    else if (!symbolic) throw std::invalid_argument("-M/-N/-S are required unless --symbolic is given");
    Derivation d = derive(kernel);
    text << "kernel " << c.kernel;
    if (binding) {
      j["binding"] = to_json(*binding);
      text << "  " << binding_text(*binding);
    }
    text << "\n";
    auto line = [&](const DerivedBound& b, const char* indent) {
      text << indent << to_string(b.regime) << " " << b.statement << ": ";
      if (symbolic || !binding) text << "Q >= " << b.q.normalized_string() << (binding ? "  = " : "");
      if (binding) text << value_text(evaluate_bound(b, *binding));
      text << "\n";
    };
    const std::string stmt = d.primary_bound().statement;
    text << "  primary statement " << stmt << ":\n";
    j["primary"] = Json::array();
    for (Regime r : {Regime::classical, Regime::general, Regime::small_cache}) {
      if (const DerivedBound* b = d.find(stmt, r)) {
        j["primary"].push_back(to_json(*b, binding ? &*binding : nullptr));
        line(*b, "    ");
      }
    }
    text << "  all statements:\n";
    j["bounds"] = Json::array();
    for (const auto* list : {&d.classical, &d.hourglass}) {
      for (const auto& b : *list) {
        j["bounds"].push_back(to_json(b, binding ? &*binding : nullptr));
        line(b, "    ");
      }
    }
    if (binding) {
      auto h = best_hourglass(d, *binding);
      auto cl = best_classical(d, *binding);
      j["best_hourglass"] = h.bound ? to_json(h.value) : Json(nullptr);
      j["best_classical"] = cl.bound ? to_json(cl.value) : Json(nullptr);
      text << "  best hourglass over statements: " << (h.bound ? value_text(h.value) : "none") << "\n";
      text << "  best classical over statements: " << (cl.bound ? value_text(cl.value) : "none") << "\n";
    }
  }
  if (cat) {
    Json cj;
    auto row = [&](const char* name, const BoundExpr& e) {
      Json r;
      r["expression"] = e.normalized_string();
      text << "  catalog " << name << ": " << e.normalized_string();
      if (binding) {
        BoundValue v;
        try {
          Valuation val = valuation_from(*binding);
          v.enclosure = enclose(e, val);
          v.applicable = true;
          if (v.enclosure.is_point()) v.exact = v.enclosure.lo;
        } catch (const std::exception& ex) {
          v.reason = ex.what();
        }
        r["value_at_binding"] = to_json(v);
        text << "  = " << value_text(v);
      }
      text << "\n";
      cj[name] = r;
    };
    row("old_bound", cat->old_bound);
    row("new_bound", cat->new_bound);
    row("old_leading", cat->old_leading);
    row("new_leading", cat->new_leading);
    if (cat->upper) row("upper", *cat->upper);
    j["catalog"] = cj;
  }
  emit(c, c.json ? j.dump(2) + "\n" : text.str());
  return 0;
}

int cmd_simulate(const Common& c, const std::string& schedule, std::optional<std::int64_t> block,
                 const std::string& policy, const std::string& dump) {
  AffineKernel kernel = builtin_kernel(c.kernel);
  Binding b = sizes(c, &kernel);
  if (!c.S) throw std::invalid_argument("-S is required");
  Simulation s = simulate(c.kernel, b, parse_schedule_kind(schedule), block, parse_policy(policy));
  if (!dump.empty()) {
    std::ofstream f(dump);
    if (!f) throw std::runtime_error("cannot write " + dump);
    f << dump_schedule(s.order);
  }
  if (c.json) {
    emit(c, to_json(s).dump(2) + "\n");
    return 0;
  }
  std::ostringstream t;
  t << "kernel " << c.kernel << "  " << binding_text(b) << "  schedule " << s.schedule_id << "  policy "
    << to_string(s.trace.policy) << "\n";
  t << "  loads " << s.trace.loads << "  stores " << s.trace.stores << "  peak_red " << s.trace.peak_red << "\n";
  if (s.hourglass.bound) t << "  hourglass bound: " << value_text(s.hourglass.value) << "\n";
  if (s.classical.bound) t << "  classical bound: " << value_text(s.classical.value) << "\n";
  t << "  ratio loads/best bound: " << (s.ratio ? to_decimal(*s.ratio) : std::string("n/a")) << "\n";
  emit(c, t.str());
  return 0;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    for (std::string part; std::getline(ss, part, ',');)
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

int cmd_sweep(const Common& c, const std::vector<std::string>& ms, const std::vector<std::string>& ns,
              const std::vector<std::string>& ss, const std::string& policy, unsigned threads) {
  AffineKernel kernel = builtin_kernel(c.kernel);
  bool has_m = kernel.has_parameter("M");
  GridSpec grid;
  for (const auto& m : split_list(ms.empty() ? std::vector<std::string>{"8,16,24,32"} : ms))
    grid.M.push_back(evaluate_grid_expr(m, {}));
  grid.N = split_list(!ns.empty() ? ns : std::vector<std::string>{has_m ? "M/2,M" : "8,16,24,32"});
  grid.S = split_list(!ss.empty() ? ss : std::vector<std::string>{has_m ? "2M+1,4M,8M" : "2N+1,4N,8N"});
  auto rows = sweep(c.kernel, grid, parse_policy(policy), threads);
  if (c.json) {
    Json j = Json::array();
    for (const auto& r : rows) {
      Json o;
      o["binding"] = to_json(r.binding);
      o["B"] = r.block ? Json(*r.block) : Json(nullptr);
      o["classical_bound"] = r.classical ? to_json(r.classical->lo) : Json(nullptr);
      o["hourglass_bound"] = r.hourglass ? to_json(r.hourglass->lo) : Json(nullptr);
      o["loads_reference"] = r.loads_reference ? Json(*r.loads_reference) : Json(nullptr);
      o["loads_tiled"] = r.loads_tiled ? Json(*r.loads_tiled) : Json(nullptr);
      o["ratio"] = r.ratio ? to_json(*r.ratio) : Json(nullptr);
      o["error"] = r.error;
      j.push_back(o);
    }
    emit(c, j.dump(2) + "\n");
  } else {
    emit(c, sweep_csv(rows));
  }
  return 0;
}

int cmd_detect(const Common& c) {
  AffineKernel kernel = builtin_kernel(c.kernel);
  Json j;
  j["kernel"] = c.kernel;
  j["reports"] = Json::array();
  for (const auto& r : detect_all(kernel)) {
    Json e = to_json(r);
    if (r.split_recommended()) {
      std::string split = kernel.has_parameter("M") ? "P" : "M";
      auto [lo, hi] = split_temporal(kernel, r.statement, split);
      Json frags = Json::array();
      for (const auto* f : {&lo, &hi}) {
        Json fj;
        fj["kernel"] = f->name();
        auto fr = detect(*f, r.statement);
        fj["report"] = fr ? to_json(*fr) : Json(nullptr);
        frags.push_back(fj);
      }
      e["split"] = {{"parameter", split}, {"fragments", frags}};
    }
    j["reports"].push_back(e);
  }
  emit(c, j.dump(2) + "\n");
  return 0;
}

int cmd_verify_sampling(const Common& c, std::optional<std::size_t> K, std::size_t samples, std::uint64_t seed) {
  AffineKernel kernel = builtin_kernel(c.kernel);
  Binding b = sizes(c, &kernel);
  std::size_t k = K ? *K : static_cast<std::size_t>(2 * (b.contains("M") ? b.at("M") : b.at("N")));
  SamplingReport r = verify_sampling(kernel, b, k, samples, seed);
  if (c.json) {
    emit(c, to_json(r).dump(2) + "\n");
  } else {
    std::ostringstream t;
    t << "kernel " << c.kernel << "  " << binding_text(b) << "  K=" << k << "  samples " << samples << "  seed "
      << seed << "\n";
    t << "  bound |E cap " << r.statement << "| <= K^2/" << r.W << " + 2K = " << to_string(r.bound) << "\n";
    t << "  max |E cap " << r.statement << "| " << r.max_count << "  max |E| " << r.max_total << "  max ratio "
      << to_decimal(r.max_ratio) << "\n";
    t << "  " << (r.passed() ? "PASS" : "FAIL") << " (" << r.violations << " violations)\n";
    emit(c, t.str());
  }
  return r.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hourglass-pattern I/O lower bounds, pebble simulation and verification"};
  app.require_subcommand(1);

  Common c;
  auto common = [&](CLI::App* cmd) {
    add_kernel(cmd, c);
    cmd->add_flag("--json", c.json, "JSON output");
    cmd->add_option("--out", c.out, "write output to a file");
  };

  bool symbolic = false;
  auto* bound = app.add_subcommand("bound", "derive and evaluate lower bounds");
  common(bound);
  add_sizes(bound, c);
  bound->add_flag("--symbolic", symbolic, "print normalized expressions");

  std::string schedule = "reference", policy = "belady";
  std::optional<std::int64_t> block;
  std::uint64_t seed = 0;
  auto* sim = app.add_subcommand("simulate", "run the pebble game on a schedule");
  common(sim);
  add_sizes(sim, c);
  sim->add_option("--schedule", schedule, "reference or tiled")->check(CLI::IsMember({"reference", "tiled"}));
  sim->add_option("--block", block, "tile width B");
  sim->add_option("--policy", policy, "lru or belady")->check(CLI::IsMember({"lru", "belady"}));
  std::string dump;
  sim->add_option("--dump-schedule", dump, "write the schedule, one node id per line");

  std::vector<std::string> ms, ns, ss;
  unsigned threads = 0;
  auto* sw = app.add_subcommand("sweep", "grid of bounds and simulated loads as CSV");
  common(sw);
  sw->add_option("-M", ms, "comma-separated values of M");
  sw->add_option("-N", ns, "comma-separated values or forms in M, e.g. M/2,M");
  sw->add_option("-S", ss, "comma-separated forms in M and N, e.g. 2M+1,4M,8M");
  sw->add_option("--policy", policy, "lru or belady")->check(CLI::IsMember({"lru", "belady"}));
  sw->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* det = app.add_subcommand("detect", "hourglass detection report");
  common(det);

  std::optional<std::size_t> K;
  std::size_t samples = 2000;
  auto* vs = app.add_subcommand("verify-sampling", "sample convex K-bounded sets and check the set-size bound");
  common(vs);
  add_sizes(vs, c);
  vs->add_option("-K", K, "inset budget (default 2M)");
  vs->add_option("--samples", samples, "number of sampled sets");
  vs->add_option("--seed", seed, "random seed");

  CLI11_PARSE(app, argc, argv);
  try {
    if (c.kernel.empty()) throw std::invalid_argument("a kernel id is required");
    if (*bound) return cmd_bound(c, symbolic);
    if (*sim) return cmd_simulate(c, schedule, block, policy, dump);
    if (*sw) return cmd_sweep(c, ms, ns, ss, policy, threads);
    if (*det) return cmd_detect(c);
    if (*vs) return cmd_verify_sampling(c, K, samples, seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
