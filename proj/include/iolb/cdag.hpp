#pragma once

#include "iolb/kernel.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace iolb {

using NodeId = std::uint32_t;

class CdagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t default_node_ceiling = 10'000'000;

// Instantiated computation graph. Inputs come first, then statement instances in program order,
// so node ids form a topological order.
class Cdag {
 public:
  static Cdag instantiate(const AffineKernel& kernel, const Binding& binding,
                          std::size_t node_ceiling = default_node_ceiling);

  const AffineKernel& kernel() const { return kernel_; }
  const Binding& binding() const { return binding_; }

  std::size_t size() const { return statement_.size(); }
  std::size_t input_count() const { return inputs_; }
  std::size_t computation_count() const { return size() - inputs_; }
  std::size_t edge_count() const { return succ_.size(); }
  bool is_input(NodeId n) const { return n < inputs_; }

  std::span<const NodeId> successors(NodeId n) const;
  std::span<const NodeId> predecessors(NodeId n) const;
  // Iteration vector of a computation, element subscripts of an input.
  std::span<const std::int32_t> coordinates(NodeId n) const;
  // Statement index, or -1 for inputs.
  int statement_of(NodeId n) const { return statement_[n]; }
  const std::string& input_array(NodeId n) const;
  const std::vector<NodeId>& outputs() const { return outputs_; }
  bool is_output(NodeId n) const;

  std::optional<NodeId> find(int statement, std::span<const std::int64_t> iv) const;
  std::optional<NodeId> find(std::string_view label, std::initializer_list<std::int64_t> iv) const;
  std::optional<NodeId> find_input(std::string_view array, std::initializer_list<std::int64_t> subscripts) const;
  // Nodes of one statement in program order.
  std::vector<NodeId> instances_of(int statement) const;

  std::string label(NodeId n) const;
  // Graphviz rendering; refuses graphs above 2000 nodes.
  std::string to_dot() const;

 private:
  AffineKernel kernel_;
  Binding binding_;
  std::size_t inputs_ = 0;
  std::vector<std::int32_t> statement_;  // -1 - array index for inputs
  std::vector<std::uint32_t> coord_offset_;
  std::vector<std::int32_t> coords_;
  std::vector<std::uint32_t> succ_offset_, pred_offset_;
  std::vector<NodeId> succ_, pred_;
  std::vector<NodeId> outputs_;
  std::vector<bool> output_flag_;
  std::vector<std::string> arrays_;
  std::unordered_map<std::uint64_t, NodeId> instance_index_;
  std::unordered_map<std::uint64_t, NodeId> input_index_;
};

// Predecessors of E lying outside E, sorted.
std::vector<NodeId> inset(const Cdag& g, std::span<const NodeId> E);
// True iff no path between two members of E leaves E.
bool is_convex(const Cdag& g, std::span<const NodeId> E);
// True iff the ids respect every edge of g and list each computation exactly once.
bool is_valid_schedule(const Cdag& g, std::span<const NodeId> order);

}  // namespace iolb
