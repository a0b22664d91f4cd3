#include "iolb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <limits>
#include <sstream>
#include <thread>

namespace iolb {

namespace {

Json big(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(v);
  return to_string(v);
}

Binding problem_sizes(const AffineKernel& kernel, const Binding& binding) {
  Binding out;
  for (const auto& p : kernel.parameters()) {
    if (p.role != ParamRole::problem_size) continue;
    auto it = binding.find(p.name);
    if (it == binding.end()) throw std::invalid_argument("missing parameter " + p.name);
    out[p.name] = it->second;
  }
  return out;
}

std::optional<Rational> ratio_over(std::uint64_t loads, const BestBound& h, const BestBound& c) {
  Rational lo = 0;
  if (h.bound && h.value.applicable) lo = h.value.enclosure.lo;
  if (c.bound && c.value.applicable) lo = std::max(lo, c.value.enclosure.lo);
  if (lo <= 0) return std::nullopt;
  return Rational(static_cast<std::int64_t>(loads)) / lo;
}

std::int64_t tiled_block(const Binding& binding) {
  std::int64_t B = default_block(binding);
  return std::min(B, binding.at("N"));
}

}  // namespace

Json to_json(const Binding& b) {
  Json j = Json::object();
  for (const auto& [k, v] : b) j[k] = v;
  return j;
}

Json to_json(const Rational& r) { return {{"num", big(numerator_of(r))}, {"den", big(denominator_of(r))}}; }

Json to_json(const HourglassReport& r) {
  Json j;
  j["statement"] = r.statement;
  j["temporal"] = r.temporal;
  j["broadcast"] = r.broadcast;
  j["neutral"] = r.neutral;
  j["width"] = r.width ? Json(r.width->normalized_string()) : Json(nullptr);
  j["step_width"] = r.step_width.normalized_string();
  j["width_min"] = r.width_min.normalized_string();
  j["split_recommended"] = r.split_recommended();
  return j;
}

Json to_json(const BoundValue& v) {
  Json j;
  j["applicable"] = v.applicable;
  if (!v.applicable) {
    j["reason"] = v.reason;
    return j;
  }
  j["value"] = v.exact ? to_json(*v.exact) : Json(nullptr);
  j["enclosure"] = {{"lo", to_json(v.enclosure.lo)}, {"hi", to_json(v.enclosure.hi)}};
  j["decimal"] = to_decimal(v.enclosure.lo);
  if (v.split_value) j["split_value"] = *v.split_value;
  return j;
}

Json to_json(const DerivedBound& b, const Binding* binding) {
  Json j;
  j["kernel"] = b.kernel;
  j["statement"] = b.statement;
  j["regime"] = to_string(b.regime);
  j["convention"] = to_string(b.convention);
  j["expression"] = b.q.normalized_string();
  j["node_count"] = b.node_count.normalized_string();
  j["emax"] = b.emax.normalized_string();
  if (b.split) j["split"] = *b.split;
  if (!b.notes.empty()) j["notes"] = b.notes;
  if (binding) j["value_at_binding"] = to_json(evaluate_bound(b, *binding));
  return j;
}

Json to_json(const SamplingReport& r) {
  Json j;
  j["kernel"] = r.kernel;
  j["binding"] = to_json(r.binding);
  j["statement"] = r.statement;
  j["K"] = r.K;
  j["W"] = r.W;
  j["bound"] = to_json(r.bound);
  j["samples"] = r.samples;
  j["violations"] = r.violations;
  j["max_count"] = r.max_count;
  j["max_total"] = r.max_total;
  j["max_ratio"] = to_decimal(r.max_ratio);
  j["passed"] = r.passed();
  return j;
}

std::string to_string(ScheduleKind k) { return k == ScheduleKind::reference ? "reference" : "tiled"; }

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "reference") return ScheduleKind::reference;
  if (name == "tiled") return ScheduleKind::tiled;
  throw std::invalid_argument("unknown schedule " + std::string(name));
}

Simulation simulate(const std::string& kernel_id, const Binding& binding, ScheduleKind schedule,
                    std::optional<std::int64_t> block, Policy policy, const Derivation* derivation) {
  AffineKernel kernel = builtin_kernel(kernel_id);
  std::optional<Derivation> own;
  if (!derivation) derivation = &own.emplace(derive(kernel));
  auto S = binding.find("S");
  if (S == binding.end() || S->second < 1) throw std::invalid_argument("cache size S must be given and positive");

  Simulation out;
  out.kernel = kernel_id;
  out.binding = binding;
  Cdag g = Cdag::instantiate(kernel, problem_sizes(kernel, binding));
  Schedule& order = out.order;
  if (schedule == ScheduleKind::reference) {
    order = reference_schedule(g);
    out.schedule_id = "reference";
  } else {
    if (!has_tiled_schedule(kernel_id)) throw ScheduleError("no tiled schedule for " + kernel_id);
    out.block = block ? *block : tiled_block(binding);
    order = tiled_schedule(g, *out.block);
    out.schedule_id = "tiled-B" + std::to_string(*out.block);
  }
  out.trace = run(g, order, static_cast<std::size_t>(S->second), policy);
  out.hourglass = best_hourglass(*derivation, binding);
  out.classical = best_classical(*derivation, binding);
  out.ratio = ratio_over(out.trace.loads, out.hourglass, out.classical);
  return out;
}

Json to_json(const Simulation& s) {
  Json j;
  j["kernel"] = s.kernel;
  j["binding"] = to_json(s.binding);
  j["schedule_id"] = s.schedule_id;
  j["policy"] = to_string(s.trace.policy);
  j["S"] = s.trace.S;
  j["loads"] = s.trace.loads;
  j["stores"] = s.trace.stores;
  j["peak_red"] = s.trace.peak_red;
  auto bound = [&](const BestBound& b) {
    if (!b.bound) return Json(nullptr);
    Json e = to_json(b.value);
    e["statement"] = b.bound->statement;
    e["regime"] = to_string(b.bound->regime);
    return e;
  };
  j["hourglass_bound"] = bound(s.hourglass);
  j["classical_bound"] = bound(s.classical);
  j["ratio"] = s.ratio ? Json(to_decimal(*s.ratio)) : Json(nullptr);
  return j;
}

std::int64_t evaluate_grid_expr(std::string_view expr, const Binding& known) {
  std::string s;
  for (char c : expr)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw std::invalid_argument("empty grid entry");
  auto fail = [&] { return std::invalid_argument("bad grid entry '" + std::string(expr) + "'"); };
  std::size_t pos = 0;
  auto number = [&](std::int64_t& out) {
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) return false;
    out = std::stoll(s.substr(start, pos - start));
    return true;
  };
  Rational total = 0;
  while (pos < s.size()) {
    int sign = 1;
    if (s[pos] == '+' || s[pos] == '-') {
      sign = s[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (pos != 0) {
      throw fail();
    }
    Rational term = 1;
    std::int64_t c = 0;
    bool has_number = number(c);
    if (has_number) term = c;
    if (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) {
      std::size_t start = pos;
      while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
      auto it = known.find(s.substr(start, pos - start));
      if (it == known.end()) throw std::invalid_argument("unknown symbol in grid entry '" + std::string(expr) + "'");
      term *= it->second;
    } else if (!has_number) {
      throw fail();
    }
    if (pos < s.size() && s[pos] == '/') {
      ++pos;
      std::int64_t d = 0;
      if (!number(d) || d == 0) throw fail();
      term /= d;
    }
    total += sign * term;
  }
  if (!is_integer(total)) throw std::invalid_argument("grid entry '" + std::string(expr) + "' is not an integer");
  return static_cast<std::int64_t>(numerator_of(total));
}

std::vector<Binding> expand_grid(const GridSpec& grid, bool has_m) {
  std::vector<Binding> out;
  auto with_n = [&](Binding b) {
    for (const auto& n : grid.N) {
      Binding bn = b;
      bn["N"] = evaluate_grid_expr(n, b);
      for (const auto& s : grid.S) {
        Binding bs = bn;
        bs["S"] = evaluate_grid_expr(s, bn);
        out.push_back(bs);
      }
    }
  };
  if (has_m) {
    for (auto m : grid.M) with_n({{"M", m}});
  } else {
    with_n({});
  }
  return out;
}

SweepRow sweep_row(const std::string& kernel_id, const Derivation& d, const Binding& binding, Policy policy) {
  SweepRow row;
  row.binding = binding;
  std::vector<std::string> errors;
  try {
    BestBound h = best_hourglass(d, binding);
    BestBound c = best_classical(d, binding);
    if (h.bound) row.hourglass = h.value.enclosure;
    if (c.bound) row.classical = c.value.enclosure;
    auto ref = simulate(kernel_id, binding, ScheduleKind::reference, std::nullopt, policy, &d);
    row.loads_reference = ref.trace.loads;
    std::uint64_t best_loads = ref.trace.loads;
    if (has_tiled_schedule(kernel_id)) {
      try {
        auto t = simulate(kernel_id, binding, ScheduleKind::tiled, std::nullopt, policy, &d);
        row.block = t.block;
        row.loads_tiled = t.trace.loads;
        best_loads = t.trace.loads;
      } catch (const ScheduleError& e) {
        errors.push_back(std::string("tiled: ") + e.what());
      }
    }
    if (row.hourglass && row.hourglass->lo > 0)
      row.ratio = Rational(static_cast<std::int64_t>(best_loads)) / row.hourglass->lo;
  } catch (const std::exception& e) {
    errors.push_back(e.what());
  }
  for (const auto& e : errors) row.error += (row.error.empty() ? "" : "; ") + e;
  return row;
}

std::vector<SweepRow> sweep(const std::string& kernel_id, const GridSpec& grid, Policy policy, unsigned threads) {
  AffineKernel kernel = builtin_kernel(kernel_id);
  Derivation d = derive(kernel);
  auto bindings = expand_grid(grid, kernel.has_parameter("M"));
  std::vector<SweepRow> rows(bindings.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, bindings.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < bindings.size(); i = next++) rows[i] = sweep_row(kernel_id, d, bindings[i], policy);
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  pool.clear();
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "M,N,S,B,classical_bound,hourglass_bound,loads_reference,loads_tiled,ratio,"
         "classical_bound_num,classical_bound_den,hourglass_bound_num,hourglass_bound_den,ratio_num,ratio_den,error\n";
  auto opt_int = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
  auto decimal = [](const std::optional<Rational>& r) { return r ? to_decimal(*r) : std::string(); };
  auto exact = [](const std::optional<Rational>& r) {
    return r ? to_string(numerator_of(*r)) + "," + to_string(denominator_of(*r)) : std::string(",");
  };
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& r : rows) {
    auto get = [&](const char* k) {
      auto it = r.binding.find(k);
      return it == r.binding.end() ? std::string() : std::to_string(it->second);
    };
    std::optional<Rational> c, h;
    if (r.classical) c = r.classical->lo;
    if (r.hourglass) h = r.hourglass->lo;
    out << get("M") << ',' << get("N") << ',' << get("S") << ',' << opt_int(r.block) << ',' << decimal(c) << ','
        << decimal(h) << ',' << opt_int(r.loads_reference) << ',' << opt_int(r.loads_tiled) << ','
        << decimal(r.ratio) << ',' << exact(c) << ',' << exact(h) << ',' << exact(r.ratio) << ',' << quote(r.error)
        << '\n';
  }
  return out.str();
}

}  // namespace iolb
