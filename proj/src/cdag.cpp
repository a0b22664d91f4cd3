#include "iolb/cdag.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_set>

namespace iolb {

namespace {

constexpr std::size_t max_rank = 3;
constexpr std::int64_t coord_limit = 1 << 16;
constexpr NodeId input_flag = 0x80000000u;

std::uint64_t pack(std::uint64_t tag, std::span<const std::int64_t> values, const std::string& what) {
  if (values.size() > max_rank) throw CdagError(what + ": more than 3 coordinates are not supported");
  if (tag >= 256) throw CdagError(what + ": too many statements or arrays");
  std::uint64_t key = tag;
  for (std::int64_t v : values) {
    if (v < 0 || v >= coord_limit) throw CdagError(what + ": coordinate " + std::to_string(v) + " out of range");
    key = (key << 16) | static_cast<std::uint64_t>(v);
  }
  return (key << (16 * (max_rank - values.size()))) | (static_cast<std::uint64_t>(values.size()) << 60);
}

struct CompiledAccess {
  std::uint32_t array;
  std::vector<LinearForm> subscripts;
};

}  // namespace

Cdag Cdag::instantiate(const AffineKernel& kernel, const Binding& binding, std::size_t node_ceiling) {
  Cdag g;
  g.kernel_ = kernel;
  g.binding_ = binding;

  std::uint64_t computations = kernel.total_instances(binding);
  if (computations > node_ceiling || computations >= input_flag)
    throw CdagError("node ceiling exceeded: " + std::to_string(computations) + " statement instances");

  std::map<std::string, std::uint32_t, std::less<>> array_ids;
  auto array_id = [&](const std::string& name) {
    auto [it, inserted] = array_ids.emplace(name, static_cast<std::uint32_t>(g.arrays_.size()));
    if (inserted) g.arrays_.push_back(name);
    return it->second;
  };
  std::vector<std::vector<CompiledAccess>> reads(kernel.statements().size());
  std::vector<CompiledAccess> writes;
  for (std::size_t s = 0; s < kernel.statements().size(); ++s) {
    const Statement& st = kernel.statements()[s];
    auto compile = [&](const ArrayAccess& a) {
      CompiledAccess c{array_id(a.array), {}};
      for (const auto& e : a.subscripts)
        c.subscripts.push_back(compile_form(e, st.domain, st.domain.depth(), binding));
      return c;
    };
    for (const auto& r : st.reads) reads[s].push_back(compile(r));
    writes.push_back(compile(st.write));
  }

  std::unordered_map<std::uint64_t, NodeId> last_writer;
  last_writer.reserve(static_cast<std::size_t>(computations));
  std::vector<std::int32_t> comp_stmt;
  std::vector<std::int32_t> comp_coords;
  std::vector<std::int32_t> input_array;
  std::vector<std::int32_t> input_coords;
  std::vector<std::uint32_t> pred_offset{0};
  std::vector<NodeId> preds;  // computation index or input_flag | input index
  comp_stmt.reserve(static_cast<std::size_t>(computations));

  std::vector<std::int64_t> sub;
  auto element_key = [&](const CompiledAccess& a, std::span<const std::int64_t> iv) {
    sub.clear();
    for (const auto& f : a.subscripts) sub.push_back(f(iv));
    return pack(a.array, sub, "array " + g.arrays_[a.array]);
  };

  kernel.for_each_instance(binding, [&](int s, std::span<const std::int64_t> iv) {
    auto c = static_cast<NodeId>(comp_stmt.size());
    std::size_t first = preds.size();
    for (const auto& r : reads[static_cast<std::size_t>(s)]) {
      std::uint64_t key = element_key(r, iv);
      NodeId src;
      auto it = last_writer.find(key);
      if (it != last_writer.end()) {
        src = it->second;
      } else {
        auto [in, inserted] = g.input_index_.emplace(key, static_cast<NodeId>(input_array.size()));
        if (inserted) {
          input_array.push_back(static_cast<std::int32_t>(r.array));
          for (std::int64_t v : sub) input_coords.push_back(static_cast<std::int32_t>(v));
          input_coords.resize(input_array.size() * max_rank, -1);
        }
        src = input_flag | in->second;
      }
      if (std::find(preds.begin() + static_cast<std::ptrdiff_t>(first), preds.end(), src) == preds.end())
        preds.push_back(src);
    }
    pred_offset.push_back(static_cast<std::uint32_t>(preds.size()));
    last_writer[element_key(writes[static_cast<std::size_t>(s)], iv)] = c;
    g.instance_index_.emplace(pack(static_cast<std::uint64_t>(s), iv, "statement"), c);
    comp_stmt.push_back(s);
    for (std::size_t d = 0; d < max_rank; ++d)
      comp_coords.push_back(d < iv.size() ? static_cast<std::int32_t>(iv[d]) : -1);
  });

  const std::size_t ni = input_array.size(), nc = comp_stmt.size(), n = ni + nc;
  if (n > node_ceiling) throw CdagError("node ceiling exceeded: " + std::to_string(n) + " nodes");
  g.inputs_ = ni;
  auto final_id = [&](NodeId raw) { return (raw & input_flag) ? (raw & ~input_flag) : static_cast<NodeId>(ni + raw); };
  for (auto& [key, id] : g.instance_index_) id = static_cast<NodeId>(ni + id);

  g.statement_.resize(n);
  g.coord_offset_.resize(n + 1);
  g.coords_.reserve(n * max_rank);
  auto push_coords = [&](const std::int32_t* c) {
    for (std::size_t d = 0; d < max_rank && c[d] >= 0; ++d) g.coords_.push_back(c[d]);
  };
  for (std::size_t v = 0; v < ni; ++v) {
    g.statement_[v] = -1 - input_array[v];
    g.coord_offset_[v] = static_cast<std::uint32_t>(g.coords_.size());
    push_coords(&input_coords[v * max_rank]);
  }
  for (std::size_t c = 0; c < nc; ++c) {
    g.statement_[ni + c] = comp_stmt[c];
    g.coord_offset_[ni + c] = static_cast<std::uint32_t>(g.coords_.size());
    push_coords(&comp_coords[c * max_rank]);
  }
  g.coord_offset_[n] = static_cast<std::uint32_t>(g.coords_.size());

  g.pred_offset_.assign(n + 1, 0);
  for (std::size_t c = 0; c < nc; ++c) g.pred_offset_[ni + c + 1] = pred_offset[c + 1] - pred_offset[c];
  for (std::size_t v = 0; v < n; ++v) g.pred_offset_[v + 1] += g.pred_offset_[v];
  g.pred_.resize(preds.size());
  std::vector<std::uint32_t> out_degree(n, 0);
  for (std::size_t c = 0; c < nc; ++c) {
    NodeId self = static_cast<NodeId>(ni + c);
    std::uint32_t at = g.pred_offset_[self];
    for (std::uint32_t e = pred_offset[c]; e < pred_offset[c + 1]; ++e) {
      NodeId p = final_id(preds[e]);
      if (p >= self) throw CdagError("dependence against program order at " + g.label(self));
      g.pred_[at++] = p;
      ++out_degree[p];
    }
    std::sort(g.pred_.begin() + g.pred_offset_[self], g.pred_.begin() + at);
  }
  g.succ_offset_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) g.succ_offset_[v + 1] = g.succ_offset_[v] + out_degree[v];
  g.succ_.resize(preds.size());
  std::vector<std::uint32_t> fill(g.succ_offset_.begin(), g.succ_offset_.end() - 1);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId p : g.predecessors(v)) g.succ_[fill[p]++] = v;

  g.output_flag_.assign(n, false);
  for (const auto& [key, c] : last_writer) {
    auto array = static_cast<std::uint32_t>((key >> 48) & 0xffu);
    if (kernel.is_output(g.arrays_[array])) {
      NodeId id = static_cast<NodeId>(ni + c);
      g.output_flag_[id] = true;
      g.outputs_.push_back(id);
    }
  }
  std::sort(g.outputs_.begin(), g.outputs_.end());
  return g;
}

std::span<const NodeId> Cdag::successors(NodeId n) const {
  return {succ_.data() + succ_offset_[n], succ_offset_[n + 1] - succ_offset_[n]};
}

std::span<const NodeId> Cdag::predecessors(NodeId n) const {
  return {pred_.data() + pred_offset_[n], pred_offset_[n + 1] - pred_offset_[n]};
}

std::span<const std::int32_t> Cdag::coordinates(NodeId n) const {
  return {coords_.data() + coord_offset_[n], coord_offset_[n + 1] - coord_offset_[n]};
}

const std::string& Cdag::input_array(NodeId n) const {
  if (!is_input(n)) throw CdagError("node " + std::to_string(n) + " is not an input");
  return arrays_[static_cast<std::size_t>(-1 - statement_[n])];
}

bool Cdag::is_output(NodeId n) const { return output_flag_[n]; }

std::optional<NodeId> Cdag::find(int statement, std::span<const std::int64_t> iv) const {
  if (statement < 0 || iv.size() > max_rank) return std::nullopt;
  for (std::int64_t v : iv)
    if (v < 0 || v >= coord_limit) return std::nullopt;
  auto it = instance_index_.find(pack(static_cast<std::uint64_t>(statement), iv, "statement"));
  if (it == instance_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> Cdag::find(std::string_view label, std::initializer_list<std::int64_t> iv) const {
  return find(kernel_.statement_index(label), std::span<const std::int64_t>(iv.begin(), iv.size()));
}

std::optional<NodeId> Cdag::find_input(std::string_view array, std::initializer_list<std::int64_t> subscripts) const {
  auto a = std::find(arrays_.begin(), arrays_.end(), array);
  if (a == arrays_.end()) return std::nullopt;
  for (std::int64_t v : subscripts)
    if (v < 0 || v >= coord_limit) return std::nullopt;
  std::span<const std::int64_t> s(subscripts.begin(), subscripts.size());
  auto it = input_index_.find(pack(static_cast<std::uint64_t>(a - arrays_.begin()), s, "array"));
  if (it == input_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> Cdag::instances_of(int statement) const {
  std::vector<NodeId> out;
  for (NodeId v = static_cast<NodeId>(inputs_); v < size(); ++v)
    if (statement_[v] == statement) out.push_back(v);
  return out;
}

std::string Cdag::label(NodeId n) const {
  std::string s;
  auto c = coordinates(n);
  if (is_input(n)) {
    s = input_array(n);
    for (auto v : c) s += "[" + std::to_string(v) + "]";
    return s;
  }
  s = kernel_.statements()[static_cast<std::size_t>(statement_[n])].label + "[";
  for (std::size_t d = 0; d < c.size(); ++d) s += (d ? "," : "") + std::to_string(c[d]);
  return s + "]";
}

std::string Cdag::to_dot() const {
  if (size() > 2000) throw CdagError("DOT output is limited to 2000 nodes");
  std::ostringstream os;
  os << "digraph \"" << kernel_.name() << "\" {\n";
  for (NodeId v = 0; v < size(); ++v) {
    os << "  n" << v << " [label=\"" << label(v) << "\"";
    if (is_input(v)) os << ", shape=box";
    if (is_output(v)) os << ", peripheries=2";
    os << "];\n";
  }
  for (NodeId v = 0; v < size(); ++v)
    for (NodeId s : successors(v)) os << "  n" << v << " -> n" << s << ";\n";
  os << "}\n";
  return os.str();
}

std::vector<NodeId> inset(const Cdag& g, std::span<const NodeId> E) {
  std::vector<NodeId> members(E.begin(), E.end());
  std::sort(members.begin(), members.end());
  std::vector<NodeId> out;
  for (NodeId q : members)
    for (NodeId p : g.predecessors(q))
      if (!std::binary_search(members.begin(), members.end(), p)) out.push_back(p);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool is_convex(const Cdag& g, std::span<const NodeId> E) {
  if (E.size() <= 1) return true;
  std::vector<NodeId> members(E.begin(), E.end());
  std::sort(members.begin(), members.end());
  const NodeId last = members.back();
  auto in_e = [&](NodeId v) { return std::binary_search(members.begin(), members.end(), v); };
  std::unordered_set<NodeId> seen;
  std::deque<NodeId> frontier;
  for (NodeId p : members)
    for (NodeId s : g.successors(p))
      if (s < last && !in_e(s) && seen.insert(s).second) frontier.push_back(s);
  while (!frontier.empty()) {
    NodeId v = frontier.front();
    frontier.pop_front();
    for (NodeId s : g.successors(v)) {
      if (s > last) continue;
      if (in_e(s)) return false;
      if (seen.insert(s).second) frontier.push_back(s);
    }
  }
  return true;
}

bool is_valid_schedule(const Cdag& g, std::span<const NodeId> order) {
  if (order.size() != g.computation_count()) return false;
  std::vector<std::uint32_t> position(g.size(), UINT32_MAX);
  for (std::uint32_t t = 0; t < order.size(); ++t) {
    NodeId v = order[t];
    if (v >= g.size() || g.is_input(v) || position[v] != UINT32_MAX) return false;
    position[v] = t;
  }
  for (std::uint32_t t = 0; t < order.size(); ++t)
    for (NodeId p : g.predecessors(order[t]))
      if (!g.is_input(p) && position[p] >= t) return false;
  return true;
}

}  // namespace iolb
