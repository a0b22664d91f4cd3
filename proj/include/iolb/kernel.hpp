#pragma once

#include "iolb/affine.hpp"
#include "iolb/rational.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace iolb {

enum class ParamRole { problem_size, cache_size, block_size, split };

struct Parameter {
  std::string name;
  ParamRole role = ParamRole::problem_size;
};

// Iterates [lower, upper); a descending loop visits the same set from the top.
struct Loop {
  int id = -1;
  std::string index;
  AffineExpr lower;
  AffineExpr upper;
  bool descending = false;
};

struct IterationDomain {
  std::vector<Loop> loops;

  std::size_t depth() const { return loops.size(); }
  std::vector<std::string> indices() const;
  // Position of `index` in the nest, or -1.
  int position(std::string_view index) const;
};

struct ArrayAccess {
  std::string array;
  std::vector<AffineExpr> subscripts;

  std::string to_string() const;
  friend bool operator==(const ArrayAccess&, const ArrayAccess&) = default;
};

struct Statement {
  std::string label;
  IterationDomain domain;
  std::vector<ArrayAccess> reads;
  ArrayAccess write;
};

// Loop tree in program order; a leaf holds a statement index.
struct BodyNode {
  int statement = -1;
  int loop = -1;
  std::vector<BodyNode> body;
};

class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AffineKernel {
 public:
  const std::string& name() const { return name_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  const std::vector<Statement>& statements() const { return statements_; }
  const std::vector<std::string>& outputs() const { return outputs_; }
  const std::vector<BodyNode>& body() const { return body_; }
  const std::vector<Loop>& loops() const { return loops_; }

  bool has_parameter(std::string_view name) const;
  int statement_index(std::string_view label) const;  // throws KernelError
  const Statement& statement(std::string_view label) const;
  bool is_output(std::string_view array) const;

  // Visits every statement instance in sequential program order.
  void for_each_instance(const Binding& binding,
                         const std::function<void(int, std::span<const std::int64_t>)>& visit) const;
  std::vector<std::vector<std::int64_t>> enumerate_instances(std::string_view label,
                                                             const Binding& binding) const;
  std::uint64_t instance_count(int statement, const Binding& binding) const;
  std::uint64_t total_instances(const Binding& binding) const;

  // Copy with loop `loop_id` restricted to [lower, upper) and `added` appended to the parameters.
  AffineKernel with_loop_range(int loop_id, const AffineExpr& lower, const AffineExpr& upper,
                               const Parameter& added, std::string new_name) const;

  std::string to_string() const;

 private:
  friend class KernelBuilder;
  void validate() const;

  std::string name_;
  std::vector<Parameter> params_;
  std::vector<Statement> statements_;
  std::vector<std::string> outputs_;
  std::vector<BodyNode> body_;
  std::vector<Loop> loops_;
};

ArrayAccess access(std::string array, std::vector<AffineExpr> subscripts);

// Affine form over the positions of an iteration vector, parameters folded in.
struct LinearForm {
  std::int64_t constant = 0;
  std::vector<std::pair<int, std::int64_t>> terms;

  std::int64_t operator()(std::span<const std::int64_t> iv) const {
    std::int64_t v = constant;
    for (auto [pos, c] : terms) v += c * iv[static_cast<std::size_t>(pos)];
    return v;
  }
};

// Resolves symbols against the first `depth` loops of `domain`, then `binding`.
LinearForm compile_form(const AffineExpr& e, const IterationDomain& domain, std::size_t depth,
                        const Binding& binding);

class KernelBuilder {
 public:
  explicit KernelBuilder(std::string name);

  AffineExpr parameter(const std::string& name, ParamRole role = ParamRole::problem_size);
  void loop(const std::string& index, const AffineExpr& lower, const AffineExpr& upper,
            const std::function<void(const AffineExpr&)>& body);
  void loop_down(const std::string& index, const AffineExpr& lower, const AffineExpr& upper,
                 const std::function<void(const AffineExpr&)>& body);
  void statement(const std::string& label, ArrayAccess write, std::vector<ArrayAccess> reads);
  void output(const std::string& array);
  AffineKernel build();

 private:
  void open_loop(const std::string& index, const AffineExpr& lower, const AffineExpr& upper,
                 bool descending, const std::function<void(const AffineExpr&)>& body);
  std::vector<BodyNode>& current_body();

  AffineKernel kernel_;
  std::vector<int> stack_;          // open loop ids
  std::vector<std::size_t> path_;   // child positions from the root to the open loop
};

// Built-in kernels: mgs, hh_a2v, hh_v2q, gehd2. Throws KernelError on unknown ids.
AffineKernel builtin_kernel(std::string_view name);
std::vector<std::string> builtin_kernel_names();

}  // namespace iolb
