#include "iolb/schedules.hpp"

#include <algorithm>
#include <map>

namespace iolb {

Schedule reference_schedule(const Cdag& g) {
  Schedule s;
  s.reserve(g.computation_count());
  for (NodeId v = static_cast<NodeId>(g.input_count()); v < g.size(); ++v) s.push_back(v);
  return s;
}

std::int64_t default_block(const Binding& binding) {
  std::int64_t M = binding.at("M"), S = binding.at("S");
  if (S <= 2 * M) throw ScheduleError("tiling needs S > 2M (S = " + std::to_string(S) + ", M = " + std::to_string(M) + ")");
  return S / M - 1;
}

namespace {

// Instances of each statement grouped by their leading coordinates.
class Emitter {
 public:
  explicit Emitter(const Cdag& g) : g_(g) {}

  void emit(std::string_view label, std::initializer_list<std::int64_t> prefix) {
    int s = g_.kernel().statement_index(label);
    auto& groups = index(s, prefix.size());
    auto it = groups.find(std::vector<std::int64_t>(prefix));
    if (it == groups.end()) return;
    out.insert(out.end(), it->second.begin(), it->second.end());
  }

  Schedule out;

 private:
  using Groups = std::map<std::vector<std::int64_t>, std::vector<NodeId>>;

  Groups& index(int s, std::size_t len) {
    auto key = std::make_pair(s, len);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Groups groups;
    for (NodeId v : g_.instances_of(s)) {
      auto c = g_.coordinates(v);
      groups[std::vector<std::int64_t>(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(len))].push_back(v);
    }
    return cache_.emplace(key, std::move(groups)).first->second;
  }

  const Cdag& g_;
  std::map<std::pair<int, std::size_t>, Groups> cache_;
};

std::int64_t check_block(const Cdag& g, std::string_view kernel, std::int64_t B) {
  if (g.kernel().name() != kernel)
    throw ScheduleError("expected a " + std::string(kernel) + " CDAG, got " + g.kernel().name());
  std::int64_t N = g.binding().at("N");
  if (B < 1 || B > std::max<std::int64_t>(N, 1))
    throw ScheduleError("block size " + std::to_string(B) + " outside [1, " + std::to_string(N) + "]");
  return N;
}

Schedule finish(const Cdag& g, Emitter& e) {
  if (!is_valid_schedule(g, e.out)) throw ScheduleError("generated order is not a valid schedule");
  return std::move(e.out);
}

}  // namespace

Schedule tiled_mgs_schedule(const Cdag& g, std::int64_t B) {
  const std::int64_t N = check_block(g, "mgs", B);
  Emitter e(g);
  auto project = [&](std::int64_t k, std::int64_t j) {
    e.emit("r_init", {k, j});
    e.emit("SR", {k, j});
    e.emit("SU", {k, j});
  };
  for (std::int64_t j0 = 0; j0 < N; j0 += B) {
    const std::int64_t end = std::min(j0 + B, N);
    for (std::int64_t k = 0; k < j0; ++k)
      for (std::int64_t j = j0; j < end; ++j) project(k, j);
    for (std::int64_t j = j0; j < end; ++j) {
      for (std::int64_t k = j0; k < j; ++k) project(k, j);
      e.emit("nrm_init", {j});
      e.emit("nrm_acc", {j});
      e.emit("rdiag", {j});
      e.emit("qcol", {j});
    }
  }
  return finish(g, e);
}

Schedule tiled_a2v_schedule(const Cdag& g, std::int64_t B) {
  const std::int64_t N = check_block(g, "hh_a2v", B);
  if (g.binding().at("M") < N) throw ScheduleError("hh_a2v needs M >= N");
  Emitter e(g);
  auto reflect = [&](std::int64_t r, std::int64_t c) {
    for (const char* s : {"w_init", "SR", "w_scale", "row_upd", "SU"}) e.emit(s, {r, c});
  };
  for (std::int64_t k0 = 0; k0 < N; k0 += B) {
    const std::int64_t end = std::min(k0 + B, N);
    for (std::int64_t r = 0; r < k0; ++r)
      for (std::int64_t c = k0; c < end; ++c) reflect(r, c);
    for (std::int64_t c = k0; c < end; ++c) {
      for (std::int64_t r = k0; r < c; ++r) reflect(r, c);
      for (const char* s : {"n2_init", "n2_acc", "norma", "akk_shift", "tau", "scale", "akk_final"}) e.emit(s, {c});
    }
  }
  return finish(g, e);
}

Schedule tiled_schedule(const Cdag& g, std::int64_t B) {
  const auto& name = g.kernel().name();
  if (name == "mgs") return tiled_mgs_schedule(g, B);
  if (name == "hh_a2v") return tiled_a2v_schedule(g, B);
  throw ScheduleError("no tiled schedule for " + name);
}

bool has_tiled_schedule(std::string_view kernel) { return kernel == "mgs" || kernel == "hh_a2v"; }

std::string dump_schedule(const Schedule& s) {
  std::string out;
  for (NodeId v : s) out += std::to_string(v) + "\n";
  return out;
}

}  // namespace iolb
