#include "iolb/kernel.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace iolb {

std::vector<std::string> IterationDomain::indices() const {
  std::vector<std::string> out;
  out.reserve(loops.size());
  for (const auto& l : loops) out.push_back(l.index);
  return out;
}

int IterationDomain::position(std::string_view index) const {
  for (std::size_t d = loops.size(); d-- > 0;)
    if (loops[d].index == index) return static_cast<int>(d);
  return -1;
}

std::string ArrayAccess::to_string() const {
  std::string s = array;
  for (const auto& e : subscripts) s += "[" + e.to_string() + "]";
  return s;
}

ArrayAccess access(std::string array, std::vector<AffineExpr> subscripts) {
  return ArrayAccess{std::move(array), std::move(subscripts)};
}

LinearForm compile_form(const AffineExpr& e, const IterationDomain& domain, std::size_t depth,
                        const Binding& binding) {
  LinearForm f;
  f.constant = e.constant();
  for (const auto& [name, coeff] : e.terms()) {
    int pos = -1;
    for (std::size_t d = depth; d-- > 0;)
      if (domain.loops[d].index == name) {
        pos = static_cast<int>(d);
        break;
      }
    if (pos >= 0) {
      f.terms.emplace_back(pos, coeff);
      continue;
    }
    auto it = binding.find(name);
    if (it == binding.end()) throw KernelError("unbound parameter '" + name + "'");
    f.constant += coeff * it->second;
  }
  return f;
}

bool AffineKernel::has_parameter(std::string_view name) const {
  return std::any_of(params_.begin(), params_.end(), [&](const Parameter& p) { return p.name == name; });
}

int AffineKernel::statement_index(std::string_view label) const {
  for (std::size_t s = 0; s < statements_.size(); ++s)
    if (statements_[s].label == label) return static_cast<int>(s);
  throw KernelError("kernel '" + name_ + "' has no statement '" + std::string(label) + "'");
}

const Statement& AffineKernel::statement(std::string_view label) const {
  return statements_[static_cast<std::size_t>(statement_index(label))];
}

bool AffineKernel::is_output(std::string_view array) const {
  return std::find(outputs_.begin(), outputs_.end(), array) != outputs_.end();
}

namespace {

struct Walker {
  const AffineKernel& kernel;
  const Binding& binding;
  const std::function<void(int, std::span<const std::int64_t>)>& visit;
  std::vector<std::int64_t> iv;
  std::vector<std::pair<LinearForm, LinearForm>> bounds;  // by loop id

  void prepare() {
    bounds.resize(kernel.loops().size());
    std::vector<bool> done(kernel.loops().size(), false);
    for (const auto& st : kernel.statements())
      for (std::size_t d = 0; d < st.domain.depth(); ++d) {
        const Loop& l = st.domain.loops[d];
        auto id = static_cast<std::size_t>(l.id);
        if (done[id]) continue;
        bounds[id] = {compile_form(l.lower, st.domain, d, binding),
                      compile_form(l.upper, st.domain, d, binding)};
        done[id] = true;
      }
    // loops without statements never run a body, bounds stay zero
  }

  void run(const std::vector<BodyNode>& nodes) {
    for (const auto& n : nodes) {
      if (n.statement >= 0) {
        visit(n.statement, std::span<const std::int64_t>(iv));
        continue;
      }
      const Loop& l = kernel.loops()[static_cast<std::size_t>(n.loop)];
      const auto& [lf, uf] = bounds[static_cast<std::size_t>(n.loop)];
      std::int64_t lo = lf(iv), hi = uf(iv);
      iv.push_back(0);
      if (l.descending) {
        for (std::int64_t v = hi - 1; v >= lo; --v) {
          iv.back() = v;
          run(n.body);
        }
      } else {
        for (std::int64_t v = lo; v < hi; ++v) {
          iv.back() = v;
          run(n.body);
        }
      }
      iv.pop_back();
    }
  }
};

}  // namespace

void AffineKernel::for_each_instance(
    const Binding& binding, const std::function<void(int, std::span<const std::int64_t>)>& visit) const {
  for (const auto& p : params_)
    if (p.role == ParamRole::problem_size || p.role == ParamRole::split) {
      auto it = binding.find(p.name);
      if (it == binding.end()) throw KernelError("unbound parameter '" + p.name + "'");
    }
  Walker w{*this, binding, visit, {}, {}};
  w.prepare();
  w.run(body_);
}

std::vector<std::vector<std::int64_t>> AffineKernel::enumerate_instances(std::string_view label,
                                                                         const Binding& binding) const {
  int target = statement_index(label);
  std::vector<std::vector<std::int64_t>> out;
  for_each_instance(binding, [&](int s, std::span<const std::int64_t> iv) {
    if (s == target) out.emplace_back(iv.begin(), iv.end());
  });
  return out;
}

std::uint64_t AffineKernel::instance_count(int statement, const Binding& binding) const {
  std::uint64_t n = 0;
  for_each_instance(binding, [&](int s, std::span<const std::int64_t>) { n += (s == statement); });
  return n;
}

std::uint64_t AffineKernel::total_instances(const Binding& binding) const {
  std::uint64_t n = 0;
  for_each_instance(binding, [&](int, std::span<const std::int64_t>) { ++n; });
  return n;
}

AffineKernel AffineKernel::with_loop_range(int loop_id, const AffineExpr& lower, const AffineExpr& upper,
                                           const Parameter& added, std::string new_name) const {
  if (loop_id < 0 || static_cast<std::size_t>(loop_id) >= loops_.size())
    throw KernelError("no loop with id " + std::to_string(loop_id));
  if (has_parameter(added.name)) throw KernelError("parameter '" + added.name + "' already exists");
  AffineKernel out = *this;
  out.name_ = std::move(new_name);
  out.params_.push_back(added);
  auto id = static_cast<std::size_t>(loop_id);
  out.loops_[id].lower = lower;
  out.loops_[id].upper = upper;
  for (auto& st : out.statements_)
    for (auto& l : st.domain.loops)
      if (l.id == loop_id) {
        l.lower = lower;
        l.upper = upper;
      }
  out.validate();
  return out;
}

void AffineKernel::validate() const {
  std::set<std::string, std::less<>> pnames;
  for (const auto& p : params_)
    if (!pnames.insert(p.name).second) throw KernelError("duplicate parameter '" + p.name + "'");
  std::set<std::string, std::less<>> labels;
  for (const auto& st : statements_) {
    if (!labels.insert(st.label).second) throw KernelError("duplicate statement label '" + st.label + "'");
    const auto& loops = st.domain.loops;
    auto allowed = [&](const AffineExpr& e, std::size_t depth, const std::string& what) {
      for (const auto& [name, c] : e.terms()) {
        bool ok = pnames.count(name) > 0;
        for (std::size_t d = 0; d < depth && !ok; ++d) ok = loops[d].index == name;
        if (!ok)
          throw KernelError("statement '" + st.label + "': " + what + " references '" + name +
                            "' outside its scope");
      }
    };
    for (std::size_t d = 0; d < loops.size(); ++d) {
      for (std::size_t e = 0; e < d; ++e)
        if (loops[e].index == loops[d].index)
          throw KernelError("statement '" + st.label + "': loop index '" + loops[d].index + "' shadowed");
      allowed(loops[d].lower, d, "lower bound of " + loops[d].index);
      allowed(loops[d].upper, d, "upper bound of " + loops[d].index);
    }
    for (const auto& r : st.reads)
      for (const auto& e : r.subscripts) allowed(e, loops.size(), "subscript of " + r.array);
    for (const auto& e : st.write.subscripts) allowed(e, loops.size(), "subscript of " + st.write.array);
  }
}

std::string AffineKernel::to_string() const {
  std::ostringstream os;
  os << "kernel " << name_ << "(";
  for (std::size_t p = 0; p < params_.size(); ++p) os << (p ? ", " : "") << params_[p].name;
  os << ")\n";
  std::function<void(const std::vector<BodyNode>&, int)> dump = [&](const std::vector<BodyNode>& nodes,
                                                                    int indent) {
    for (const auto& n : nodes) {
      os << std::string(static_cast<std::size_t>(indent) * 2, ' ');
      if (n.statement >= 0) {
        const Statement& st = statements_[static_cast<std::size_t>(n.statement)];
        os << st.label << ": " << st.write.to_string() << " <- ";
        for (std::size_t r = 0; r < st.reads.size(); ++r) os << (r ? ", " : "") << st.reads[r].to_string();
        os << "\n";
        continue;
      }
      const Loop& l = loops_[static_cast<std::size_t>(n.loop)];
      os << "for " << l.index << " in [" << l.lower.to_string() << ", " << l.upper.to_string() << ")"
         << (l.descending ? " descending" : "") << "\n";
      dump(n.body, indent + 1);
    }
  };
  dump(body_, 1);
  return os.str();
}

KernelBuilder::KernelBuilder(std::string name) { kernel_.name_ = std::move(name); }

AffineExpr KernelBuilder::parameter(const std::string& name, ParamRole role) {
  kernel_.params_.push_back(Parameter{name, role});
  return AffineExpr::symbol(name);
}

std::vector<BodyNode>& KernelBuilder::current_body() {
  std::vector<BodyNode>* body = &kernel_.body_;
  for (std::size_t pos : path_) body = &(*body)[pos].body;
  return *body;
}

void KernelBuilder::open_loop(const std::string& index, const AffineExpr& lower, const AffineExpr& upper,
                              bool descending, const std::function<void(const AffineExpr&)>& body) {
  int id = static_cast<int>(kernel_.loops_.size());
  kernel_.loops_.push_back(Loop{id, index, lower, upper, descending});
  auto& nodes = current_body();
  nodes.push_back(BodyNode{-1, id, {}});
  path_.push_back(nodes.size() - 1);
  stack_.push_back(id);
  body(AffineExpr::symbol(index));
  stack_.pop_back();
  path_.pop_back();
}

void KernelBuilder::loop(const std::string& index, const AffineExpr& lower, const AffineExpr& upper,
                         const std::function<void(const AffineExpr&)>& body) {
  open_loop(index, lower, upper, false, body);
}

void KernelBuilder::loop_down(const std::string& index, const AffineExpr& lower, const AffineExpr& upper,
                              const std::function<void(const AffineExpr&)>& body) {
  open_loop(index, lower, upper, true, body);
}

void KernelBuilder::statement(const std::string& label, ArrayAccess write, std::vector<ArrayAccess> reads) {
  Statement st;
  st.label = label;
  for (int id : stack_) st.domain.loops.push_back(kernel_.loops_[static_cast<std::size_t>(id)]);
  st.write = std::move(write);
  st.reads = std::move(reads);
  int index = static_cast<int>(kernel_.statements_.size());
  kernel_.statements_.push_back(std::move(st));
  current_body().push_back(BodyNode{index, -1, {}});
}

void KernelBuilder::output(const std::string& array) { kernel_.outputs_.push_back(array); }

AffineKernel KernelBuilder::build() {
  if (!stack_.empty()) throw KernelError("unterminated loop in kernel '" + kernel_.name_ + "'");
  kernel_.validate();
  return kernel_;
}

}  // namespace iolb
