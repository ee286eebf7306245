#include "fluxq/engine.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fluxq/document.hpp"
#include "fluxq/error.hpp"

namespace fluxq {

// ---- plan ---------------------------------------------------------------------

/// Condition answered by a tap instead of buffered data: exists($n/steps)
/// or some($n/steps) op literal, for every occurrence of a tree node n.
struct FlagSpec {
  std::vector<std::string> steps;
  bool exists = false;
  RelOp op = RelOp::Eq;
  std::string literal;
  bool operator==(const FlagSpec&) const = default;
};

struct VarPlan {
  std::string var;
  std::string element;
  BufferTree tree;
  /// Flags per tree node; node 0 holds the flags of the scope itself.
  std::vector<std::vector<FlagSpec>> node_flags;

  bool tracked() const {
    if (!tree.empty()) return true;
    for (const auto& f : node_flags) {
      if (!f.empty()) return true;
    }
    return false;
  }
};

/// Where the flag of a Compare/Exists atom lives, per tree node of the
/// variable it reads. Nodes without an entry are answered from the buffer.
struct AtomPlan {
  std::map<int, int> flag_of_node;
};

struct PsInfo {
  const ContentModel* model = nullptr;
  std::vector<PastTable> tables;
  std::vector<int> table_handler;
  std::vector<std::set<std::string>> deps;
  std::vector<bool> outputs_self;
  std::vector<bool> dead;
};

struct SimpleInfo {
  std::vector<XPtr> pre;
  XPtr core;  // `{$x}` or `if c then {$x}`, streamed; may be null
  std::vector<XPtr> post;
};

struct PlanData {
  FPtr query;
  const Schema* schema = nullptr;
  EngineOptions options;
  std::map<std::string, VarPlan> vars;
  std::map<std::string, BufferTree> trees;
  std::map<const FluxExpr*, PsInfo> ps;
  std::map<const FluxExpr*, SimpleInfo> simple;
  std::map<const Condition*, AtomPlan> atoms;
};

namespace {

std::string path_text(const std::vector<std::string>& steps) {
  std::string s;
  for (const auto& st : steps) s += (s.empty() ? "" : "/") + st;
  return s.empty() ? "." : s;
}

std::string to_string(const FlagSpec& f) {
  if (f.exists) return "exists " + path_text(f.steps);
  return path_text(f.steps) + " " + fluxq::to_string(f.op) + " '" + f.literal + "'";
}

class Planner {
 public:
  explicit Planner(PlanData& d) : d_(d) {}

  void plan(const FluxExpr& f, const std::string& var) {
    if (f.kind == FluxExpr::Kind::Simple) {
      plan_simple(f, var);
      return;
    }
    if (f.var != var) {
      throw SafetyError("process-stream over " + f.var + " inside the scope of " + var);
    }
    const VarPlan& vp = d_.vars.at(var);
    PsInfo info;
    info.model = var == kRootVar ? &d_.schema->document() : &d_.schema->model(vp.element);
    const auto& symb = info.model->symbols();
    for (std::size_t j = 0; j < f.handlers.size(); ++j) {
      const Handler& h = f.handlers[j];
      std::set<std::string> deps;
      bool self = false;
      bool dead = false;
      if (h.kind == Handler::Kind::OnFirst) {
        deps = dependencies(var, *h.body);
        path_out_steps(*h.body, var, deps);
        self = outputs_var(*h.body, var);
        info.table_handler.push_back(static_cast<int>(j));
        info.tables.push_back(make_past_table(info.model->automaton, effective_past(h, symb)));
        Bindings b;
        bind_free(*h.body, b);
        walk(*h.body, b, true);
      } else if (!symb.count(h.symbol)) {
        dead = true;
      } else {
        plan(*h.flux, h.var);
      }
      info.deps.push_back(std::move(deps));
      info.outputs_self.push_back(self);
      info.dead.push_back(dead);
    }
    d_.ps.emplace(&f, std::move(info));
  }

 private:
  // variable -> (plan of the buffer it lives in, tree node)
  using Bindings = std::map<std::string, std::pair<VarPlan*, int>>;

  static void path_out_steps(const XQuery& e, const std::string& var, std::set<std::string>& out) {
    if (e.kind == XQuery::Kind::PathOut && e.var == var && !e.path.empty()) out.insert(e.path[0]);
    for (const auto& it : e.items) path_out_steps(*it, var, out);
    if (e.body) path_out_steps(*e.body, var, out);
  }

  void bind_free(const XQuery& e, Bindings& b) {
    for (const auto& v : free_vars(e)) {
      auto it = d_.vars.find(v);
      if (it == d_.vars.end()) throw SafetyError("variable " + v + " is not bound by a handler");
      b[v] = {&it->second, 0};
    }
  }

  void plan_simple(const FluxExpr& f, const std::string& var) {
    SimpleInfo info;
    auto items = seq_items(f.simple);
    int core = -1;
    if (is_simple(*f.simple)) {
      for (std::size_t i = 0; i < items.size(); ++i) {
        const XQuery& it = *items[i];
        const XQuery& c = it.kind == XQuery::Kind::If ? *it.body : it;
        if (c.kind == XQuery::Kind::VarOut) core = static_cast<int>(i);
      }
    }
    if (core >= 0) {
      const XQuery& it = *items[core];
      const std::string& u = it.kind == XQuery::Kind::If ? it.body->var : it.var;
      if (u != var) throw SafetyError("simple expression outputs " + u + " inside the scope of " + var);
    }
    Bindings b;
    bind_free(*f.simple, b);
    for (std::size_t i = 0; i < items.size(); ++i) {
      int k = static_cast<int>(i);
      if (k < core) {
        info.pre.push_back(items[i]);
        walk(*items[i], b, true);
      } else if (k == core) {
        info.core = items[i];
        if (items[i]->kind == XQuery::Kind::If) plan_condition(*items[i]->cond, b);
      } else {
        info.post.push_back(items[i]);
        walk(*items[i], b, true);
      }
    }
    d_.simple.emplace(&f, std::move(info));
  }

  static int locate(const VarPlan& vp, int node, const std::vector<std::string>& steps) {
    if (node < 0) return -1;
    auto full = vp.tree.path_of(node);
    full.insert(full.end(), steps.begin(), steps.end());
    return vp.tree.find(full);
  }

  static std::string describe(const VarPlan& vp, int node, const std::vector<std::string>& steps) {
    auto p = vp.tree.path_of(node);
    p.insert(p.end(), steps.begin(), steps.end());
    return vp.var + "/" + path_text(p);
  }

  void require_covered(const VarPlan& vp, int node, const std::vector<std::string>& steps,
                       const char* what) {
    int t = locate(vp, node, steps);
    if (t < 0 || !vp.tree.covered(t)) {
      throw BufferMiss(std::string(what) + " " + describe(vp, node, steps) + " is not buffered");
    }
  }

  void walk(const XQuery& e, Bindings& b, bool buffered) {
    using K = XQuery::Kind;
    switch (e.kind) {
      case K::Empty:
      case K::Str:
        return;
      case K::Seq:
        for (const auto& it : e.items) walk(*it, b, buffered);
        return;
      case K::VarOut: {
        auto [vp, n] = b.at(e.var);
        if (buffered) require_covered(*vp, n, {}, "output of");
        return;
      }
      case K::PathOut: {
        auto [vp, n] = b.at(e.var);
        require_covered(*vp, n, e.path, "output of");
        return;
      }
      case K::For:
      case K::ForWhere: {
        auto [vp, n] = b.at(e.source);
        int c = locate(*vp, n, e.path);
        if (c < 0) throw BufferMiss("loop path " + describe(*vp, n, e.path) + " is not buffered");
        auto saved = b.find(e.var) == b.end() ? std::optional<std::pair<VarPlan*, int>>{}
                                              : std::optional{b[e.var]};
        b[e.var] = {vp, c};
        if (e.kind == K::ForWhere) plan_condition(*e.cond, b);
        walk(*e.body, b, buffered);
        if (saved) b[e.var] = *saved; else b.erase(e.var);
        return;
      }
      case K::If:
        plan_condition(*e.cond, b);
        walk(*e.body, b, buffered);
        return;
    }
  }

  void plan_condition(const Condition& c, Bindings& b) {
    using K = Condition::Kind;
    switch (c.kind) {
      case K::True:
        return;
      case K::And:
      case K::Or:
      case K::Not:
        for (const auto& ch : c.children) plan_condition(*ch, b);
        return;
      case K::Join: {
        auto [lp, ln] = b.at(c.lhs.var);
        auto [rp, rn] = b.at(c.rhs.var);
        require_covered(*lp, ln, c.lhs.steps, "join operand");
        require_covered(*rp, rn, c.rhs.steps, "join operand");
        return;
      }
      case K::Exists:
      case K::Compare: {
        auto [vp, n] = b.at(c.lhs.var);
        int t = locate(*vp, n, c.lhs.steps);
        bool data = c.kind == K::Exists ? t >= 0 : (t >= 0 && vp->tree.covered(t));
        if (data) return;
        FlagSpec spec{c.lhs.steps, c.kind == K::Exists, c.op, c.literal};
        auto& flags = vp->node_flags[n];
        int k = 0;
        while (k < static_cast<int>(flags.size()) && !(flags[k] == spec)) ++k;
        if (k == static_cast<int>(flags.size())) flags.push_back(spec);
        d_.atoms[&c].flag_of_node[n] = k;
        return;
      }
    }
  }

  PlanData& d_;
};

}  // namespace

ExecutionPlan::ExecutionPlan(FPtr query, const Schema& schema, EngineOptions options)
    : data_(std::make_unique<PlanData>()) {
  PlanData& d = *data_;
  d.query = std::move(query);
  d.schema = &schema;
  d.options = options;
  auto violations = check_safety(*d.query, schema, options.allow_dead_handlers);
  if (!violations.empty()) {
    std::string msg = "unsafe query:";
    for (const auto& v : violations) {
      msg += "\n  " + std::string(to_string(v.kind)) + " at " + v.location + ": " + v.detail;
    }
    throw SafetyError(msg);
  }
  d.trees = buffer_trees(*d.query);
  for (const auto& [var, element] : handler_var_elements(*d.query)) {
    VarPlan vp;
    vp.var = var;
    vp.element = element;
    auto it = d.trees.find(var);
    vp.tree = it == d.trees.end() ? BufferTree(var) : it->second;
    vp.node_flags.resize(vp.tree.size());
    d.vars.emplace(var, std::move(vp));
  }
  Planner(d).plan(*d.query, kRootVar);
}

ExecutionPlan::~ExecutionPlan() = default;
ExecutionPlan::ExecutionPlan(ExecutionPlan&&) noexcept = default;
ExecutionPlan& ExecutionPlan::operator=(ExecutionPlan&&) noexcept = default;

const FluxExpr& ExecutionPlan::query() const { return *data_->query; }
const Schema& ExecutionPlan::schema() const { return *data_->schema; }
const std::map<std::string, BufferTree>& ExecutionPlan::trees() const { return data_->trees; }

std::string ExecutionPlan::dump() const {
  std::ostringstream os;
  for (const auto& [var, vp] : data_->vars) {
    if (!vp.tracked()) continue;
    std::function<void(int, int)> rec = [&](int i, int depth) {
      const auto& n = vp.tree.node(i);
      if (i == 0) {
        os << var << " (" << vp.element << ")";
      } else {
        os << std::string(2 * depth, ' ') << n.tag;
      }
      if (n.marked) os << " *";
      for (const auto& f : vp.node_flags[i]) os << " [" << to_string(f) << "]";
      os << "\n";
      for (const auto& [tag, c] : n.children) rec(c, depth + 1);
    };
    rec(0, 0);
  }
  return os.str();
}

// ---- stats --------------------------------------------------------------------

const BufferRecord* RunStats::find(const std::string& var) const {
  for (const auto& b : buffers) {
    if (b.var == var) return &b;
  }
  return nullptr;
}

std::string RunStats::to_json_lines() const {
  std::string out;
  for (const auto& b : buffers) {
    nlohmann::json j{{"var", b.var},       {"events_hwm", b.events_hwm},
                     {"bytes_hwm", b.bytes_hwm}, {"fills", b.fills},
                     {"frees", b.frees},         {"appended", b.appended}};
    out += j.dump() + "\n";
  }
  nlohmann::json t{{"totals", true},
                   {"total_events_hwm", total_events_hwm},
                   {"total_bytes_hwm", total_bytes_hwm},
                   {"fills", fills},
                   {"frees", frees},
                   {"input_events", input_events},
                   {"output_bytes", output_bytes},
                   {"elapsed_seconds", elapsed_seconds}};
  out += t.dump() + "\n";
  return out;
}

// ---- runtime ------------------------------------------------------------------

namespace {

constexpr std::size_t kFlushBytes = 64 * 1024;

std::size_t event_bytes(Event::Kind k, const std::string& name) {
  switch (k) {
    case Event::Kind::Start: return name.size() + 2;
    case Event::Kind::End: return name.size() + 3;
    default: return name.size();
  }
}

class Runtime;

struct BufEvent {
  Event::Kind kind;
  bool full = false;     // Start inside or at a marked node
  long match = -1;       // partner Start/End
  int node = -1;         // tree node of an unmarked-region Start, -1 inside copies
  long flag_base = -1;   // first node flag of this occurrence
  std::string name;
};

/// Buffer and taps of one bound variable while its element is read.
class Scope {
 public:
  Scope(Runtime& rt, const VarPlan* plan, std::string var, std::string tag);

  const VarPlan* plan() const { return plan_; }
  const std::string& var() const { return var_; }
  const std::string& tag() const { return tag_; }
  const std::vector<BufEvent>& events() const { return events_; }
  bool root_full() const { return plan_ && plan_->tree.root().marked; }
  char root_flag(int k) const { return root_flags_[k]; }
  char node_flag(long base, int k) const { return flags_[base + k]; }

  void start(const std::string& tag);
  void text(const std::string& s);
  void end();
  /// Settles taps that are still open at the end of the element.
  void finish();
  std::size_t live_events() const { return events_.size(); }
  std::size_t live_bytes() const { return bytes_; }

 private:
  enum class Mode { Node, Copy, Ignore };
  struct Frame {
    Mode mode;
    int node;
    long start;
  };
  struct Tap {
    const FlagSpec* spec;
    bool root;
    long slot;
    int anchor;
    bool done = false;
    bool collecting = false;
    int collect_depth = 0;
    std::string value;
  };

  long append(Event::Kind k, const std::string& name, bool full, int node);
  void set_flag(const Tap& t);
  bool matches(const Tap& t) const;
  void settle(Tap& t);

  Runtime& rt_;
  const VarPlan* plan_;
  std::string var_;
  std::string tag_;
  std::vector<BufEvent> events_;
  std::vector<char> flags_;
  std::vector<char> root_flags_;
  std::size_t bytes_ = 0;
  std::vector<Frame> frames_;
  std::vector<Tap> taps_;
  std::vector<std::string> path_;
  int depth_ = 0;
  BufferRecord* rec_ = nullptr;

  friend class Runtime;
};

struct NodeRef {
  const Scope* scope;
  long idx;  // -1: the scope's own element
};

class Processor {
 public:
  virtual ~Processor() = default;
  virtual void open() = 0;
  virtual void start(const std::string& tag) = 0;
  virtual void text(const std::string& s) = 0;
  virtual void end(const std::string& tag) = 0;
  virtual void close() = 0;
};

class Runtime {
 public:
  Runtime(const PlanData& plan, std::ostream& out) : plan_(plan), out_(out) {}

  std::unique_ptr<Processor> make_processor(const FluxExpr& f, const std::string& var,
                                            const std::string& tag);

  Scope* open_scope(const std::string& var, const std::string& tag);
  void close_scope(Scope* s);

  void feed_scopes(const Event& e, std::size_t base) {
    for (std::size_t i = base; i < scopes_.size(); ++i) {
      Scope& s = *scopes_[i];
      switch (e.kind) {
        case Event::Kind::Start: s.start(e.name); break;
        case Event::Kind::Text: s.text(e.name); break;
        case Event::Kind::End: s.end(); break;
        case Event::Kind::FirstPast: break;
      }
    }
  }
  static void dispatch(Processor& p, const Event& e) {
    switch (e.kind) {
      case Event::Kind::Start: p.start(e.name); break;
      case Event::Kind::Text: p.text(e.name); break;
      case Event::Kind::End: p.end(e.name); break;
      case Event::Kind::FirstPast: break;
    }
  }
  void replay(const Handler& h, const std::string& tag, const std::vector<Event>& events) {
    std::size_t base = scopes_.size();
    auto p = make_processor(*h.flux, h.var, tag);
    p->open();
    for (const auto& e : events) {
      feed_scopes(e, base);
      dispatch(*p, e);
    }
    p->close();
  }

  // output
  void emit(std::string_view s) {
    buf_ += s;
    if (buf_.size() >= kFlushBytes) flush();
  }
  void emit_text(std::string_view s) {
    std::size_t before = buf_.size();
    append_escaped(buf_, s);
    (void)before;
    if (buf_.size() >= kFlushBytes) flush();
  }
  void flush() {
    out_bytes_ += buf_.size();
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
  }

  // evaluation over buffers
  void eval(const XQuery& e);
  bool holds(const Condition& c);

  // accounting
  BufferRecord& record(const std::string& name) {
    auto it = records_.find(name);
    if (it == records_.end()) {
      it = records_.emplace(name, BufferRecord{}).first;
      it->second.var = name;
    }
    return it->second;
  }
  void grow(BufferRecord* rec, std::size_t own_events, std::size_t own_bytes, std::size_t bytes) {
    live_events_ += 1;
    live_bytes_ += bytes;
    if (rec) {
      rec->appended += 1;
      rec->events_hwm = std::max(rec->events_hwm, own_events);
      rec->bytes_hwm = std::max(rec->bytes_hwm, own_bytes);
    }
    stats_.total_events_hwm = std::max(stats_.total_events_hwm, live_events_);
    stats_.total_bytes_hwm = std::max(stats_.total_bytes_hwm, live_bytes_);
  }
  void shrink(std::size_t events, std::size_t bytes) {
    live_events_ -= events;
    live_bytes_ -= bytes;
  }

  RunStats finish_stats() {
    for (auto& [name, r] : records_) stats_.buffers.push_back(r);
    for (const auto& r : stats_.buffers) {
      stats_.fills += r.fills;
      stats_.frees += r.frees;
    }
    stats_.output_bytes = out_bytes_;
    return stats_;
  }

  const PlanData& plan() const { return plan_; }
  RunStats& stats() { return stats_; }

 private:
  NodeRef resolve(const std::string& var) const;
  void select(NodeRef from, const std::vector<std::string>& steps, std::size_t i,
              std::vector<NodeRef>& out) const;
  template <typename F>
  void for_children(NodeRef n, F&& f) const;
  std::string value_of(NodeRef n) const;
  void output(NodeRef n);
  bool atom(const Condition& c);

  const PlanData& plan_;
  std::ostream& out_;
  std::string buf_;
  std::size_t out_bytes_ = 0;
  std::vector<std::unique_ptr<Scope>> scopes_;
  std::map<std::string, std::vector<const Scope*>> env_;
  std::vector<std::pair<const std::string*, NodeRef>> loop_;
  std::map<std::string, BufferRecord> records_;
  std::size_t live_events_ = 0;
  std::size_t live_bytes_ = 0;
  RunStats stats_;
};

// ---- scope --------------------------------------------------------------------

Scope::Scope(Runtime& rt, const VarPlan* plan, std::string var, std::string tag)
    : rt_(rt), plan_(plan), var_(std::move(var)), tag_(std::move(tag)) {
  if (!plan_) {
    frames_.push_back({Mode::Ignore, -1, -1});
    return;
  }
  frames_.push_back({plan_->tree.root().marked ? Mode::Copy : Mode::Node, 0, -1});
  const auto& rf = plan_->node_flags[0];
  root_flags_.assign(rf.size(), 0);
  for (std::size_t k = 0; k < rf.size(); ++k) {
    Tap t{&rf[k], true, static_cast<long>(k), 0, false, false, 0, {}};
    if (rf[k].steps.empty()) t.collecting = true;
    taps_.push_back(std::move(t));
  }
}

long Scope::append(Event::Kind k, const std::string& name, bool full, int node) {
  BufEvent e{k, full, -1, node, -1, name};
  std::size_t b = event_bytes(k, name);
  events_.push_back(std::move(e));
  bytes_ += b;
  rt_.grow(rec_, events_.size(), bytes_, b);
  return static_cast<long>(events_.size()) - 1;
}

void Scope::set_flag(const Tap& t) {
  if (t.root) {
    root_flags_[t.slot] = 1;
  } else {
    flags_[t.slot] = 1;
  }
}

bool Scope::matches(const Tap& t) const {
  const auto& steps = t.spec->steps;
  if (depth_ - t.anchor != static_cast<int>(steps.size())) return false;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (path_[t.anchor + i] != steps[i]) return false;
  }
  return true;
}

void Scope::settle(Tap& t) {
  t.collecting = false;
  if (compare_values(t.value, t.spec->op, t.spec->literal)) {
    set_flag(t);
    t.done = true;
  }
  t.value.clear();
}

void Scope::start(const std::string& tag) {
  ++depth_;
  path_.push_back(tag);
  for (auto& t : taps_) {
    if (t.done || t.collecting || !matches(t)) continue;
    if (t.spec->exists) {
      set_flag(t);
      t.done = true;
    } else {
      t.collecting = true;
      t.collect_depth = depth_;
    }
  }
  const Frame top = frames_.back();
  switch (top.mode) {
    case Mode::Ignore:
      frames_.push_back({Mode::Ignore, -1, -1});
      return;
    case Mode::Copy:
      frames_.push_back({Mode::Copy, -1, append(Event::Kind::Start, tag, true, -1)});
      return;
    case Mode::Node: {
      int c = plan_->tree.child(top.node, tag);
      if (c < 0) {
        frames_.push_back({Mode::Ignore, -1, -1});
        return;
      }
      bool marked = plan_->tree.node(c).marked;
      long idx = append(Event::Kind::Start, tag, marked, c);
      const auto& nf = plan_->node_flags[c];
      if (!nf.empty()) {
        long base = static_cast<long>(flags_.size());
        events_[idx].flag_base = base;
        flags_.resize(flags_.size() + nf.size(), 0);
        for (std::size_t k = 0; k < nf.size(); ++k) {
          Tap t{&nf[k], false, base + static_cast<long>(k), depth_, false, false, 0, {}};
          if (nf[k].steps.empty()) {
            if (nf[k].exists) {
              flags_[t.slot] = 1;
              t.done = true;
            } else {
              t.collecting = true;
              t.collect_depth = depth_;
            }
          }
          taps_.push_back(std::move(t));
        }
      }
      frames_.push_back({marked ? Mode::Copy : Mode::Node, c, idx});
      return;
    }
  }
}

void Scope::text(const std::string& s) {
  for (auto& t : taps_) {
    if (t.collecting) t.value += s;
  }
  if (frames_.back().mode == Mode::Copy) append(Event::Kind::Text, s, true, -1);
}

void Scope::end() {
  if (depth_ == 0) return;  // the scope's own end tag
  for (auto& t : taps_) {
    if (t.collecting && t.collect_depth == depth_) settle(t);
  }
  while (!taps_.empty() && !taps_.back().root && taps_.back().anchor == depth_) taps_.pop_back();
  Frame f = frames_.back();
  frames_.pop_back();
  if (f.start >= 0) {
    long idx = append(Event::Kind::End, path_.back(), f.mode == Mode::Copy, -1);
    events_[f.start].match = idx;
    events_[idx].match = f.start;
  }
  path_.pop_back();
  --depth_;
}

void Scope::finish() {
  for (auto& t : taps_) {
    if (t.collecting) settle(t);
  }
}

// ---- processors ---------------------------------------------------------------

class SimpleProcessor : public Processor {
 public:
  SimpleProcessor(Runtime& rt, const SimpleInfo& info, std::string var, std::string tag)
      : rt_(rt), info_(info), var_(std::move(var)), tag_(std::move(tag)) {}

  void open() override {
    scope_ = rt_.open_scope(var_, tag_);
    for (const auto& e : info_.pre) rt_.eval(*e);
    if (info_.core) {
      streaming_ = info_.core->kind != XQuery::Kind::If || rt_.holds(*info_.core->cond);
    }
    if (streaming_ && tag_ != Schema::kDocument) rt_.emit("<" + tag_ + ">");
  }
  void start(const std::string& tag) override {
    if (streaming_) rt_.emit("<" + tag + ">");
  }
  void text(const std::string& s) override {
    if (streaming_) rt_.emit_text(s);
  }
  void end(const std::string& tag) override {
    if (streaming_) rt_.emit("</" + tag + ">");
  }
  void close() override {
    if (streaming_ && tag_ != Schema::kDocument) rt_.emit("</" + tag_ + ">");
    scope_->finish();
    for (const auto& e : info_.post) rt_.eval(*e);
    rt_.close_scope(scope_);
  }

 private:
  Runtime& rt_;
  const SimpleInfo& info_;
  std::string var_;
  std::string tag_;
  Scope* scope_ = nullptr;
  bool streaming_ = false;
};

class PsProcessor : public Processor {
 public:
  PsProcessor(Runtime& rt, const FluxExpr& f, const PsInfo& info, std::string tag)
      : rt_(rt), f_(f), info_(info), tag_(std::move(tag)) {
    handler_table_.assign(f_.handlers.size(), -1);
    for (std::size_t t = 0; t < info_.table_handler.size(); ++t) {
      handler_table_[info_.table_handler[t]] = static_cast<int>(t);
    }
    fired_.assign(f_.handlers.size(), false);
  }

  void open() override {
    scope_ = rt_.open_scope(f_.var, tag_);
    rt_.emit(f_.prefix);
    std::vector<int> now;
    vs_ = validator_start(info_.model->automaton, info_.tables, now);
    if (info_.model->text_only) return;  // character data is not in yet
    for (int t : now) fire(info_.table_handler[t]);
  }

  void start(const std::string& tag) override {
    if (depth_ == 0) {
      depth_ = 1;
      child_start(tag);
      return;
    }
    ++depth_;
    if (child_) child_->start(tag);
    if (recording_) record(Event::start(tag));
  }
  void text(const std::string& s) override {
    if (depth_ == 0) return;
    if (child_) child_->text(s);
    if (recording_) record(Event::text(s));
  }
  void end(const std::string& tag) override {
    if (depth_ == 1) {
      depth_ = 0;
      child_end();
      return;
    }
    --depth_;
    if (child_) child_->end(tag);
    if (recording_) record(Event::end(tag));
  }

  void close() override {
    scope_->finish();
    for (std::size_t j = 0; j < f_.handlers.size(); ++j) {
      if (f_.handlers[j].kind == Handler::Kind::OnFirst && !fired_[j]) fire(static_cast<int>(j));
    }
    rt_.emit(f_.suffix);
    rt_.close_scope(scope_);
  }

 private:
  bool needs_child(int j, const std::string& tag) const {
    const Handler& h = f_.handlers[j];
    if (h.kind == Handler::Kind::On) return true;
    return info_.outputs_self[j] || info_.deps[j].count(tag) > 0;
  }

  void fire(int j) {
    fired_[j] = true;
    rt_.eval(*f_.handlers[j].body);
  }

  void child_start(const std::string& tag) {
    auto newly = validator_step(vs_, info_.model->automaton, info_.tables, tag);
    std::set<int> first;
    for (int t : newly) first.insert(info_.table_handler[t]);
    std::vector<int> list;
    for (std::size_t j = 0; j < f_.handlers.size(); ++j) {
      const Handler& h = f_.handlers[j];
      if (h.kind == Handler::Kind::OnFirst ? first.count(static_cast<int>(j)) > 0
                                           : (!info_.dead[j] && h.symbol == tag)) {
        list.push_back(static_cast<int>(j));
      }
    }
    std::size_t k = 0;
    while (k < list.size() && !needs_child(list[k], tag)) fire(list[k++]);
    if (k == list.size()) return;
    child_tag_ = tag;
    const Handler& h = f_.handlers[list[k]];
    if (h.kind == Handler::Kind::On) {
      child_ = rt_.make_processor(*h.flux, h.var, tag);
      child_->open();
      ++k;
    }
    deferred_.assign(list.begin() + static_cast<long>(k), list.end());
    for (int j : deferred_) {
      if (f_.handlers[j].kind == Handler::Kind::On) {
        recording_ = true;
        rec_ = &rt_.record("replay:" + f_.handlers[j].var);
        rec_->fills += 1;
        break;
      }
    }
  }

  void child_end() {
    if (child_) {
      child_->close();
      child_.reset();
    }
    auto deferred = std::move(deferred_);
    deferred_.clear();
    for (int j : deferred) {
      const Handler& h = f_.handlers[j];
      if (h.kind == Handler::Kind::OnFirst) {
        fire(j);
      } else {
        rt_.replay(h, child_tag_, recorded_);
      }
    }
    if (recording_) {
      rt_.shrink(recorded_.size(), recorded_bytes_);
      rec_->frees += 1;
      recorded_.clear();
      recorded_bytes_ = 0;
      recording_ = false;
    }
  }

  void record(Event e) {
    std::size_t b = event_bytes(e.kind, e.name);
    recorded_.push_back(std::move(e));
    recorded_bytes_ += b;
    rt_.grow(rec_, recorded_.size(), recorded_bytes_, b);
  }

  Runtime& rt_;
  const FluxExpr& f_;
  const PsInfo& info_;
  std::string tag_;
  Scope* scope_ = nullptr;
  ValidatorState vs_;
  std::vector<int> handler_table_;
  std::vector<bool> fired_;
  int depth_ = 0;
  std::unique_ptr<Processor> child_;
  std::string child_tag_;
  std::vector<int> deferred_;
  bool recording_ = false;
  std::vector<Event> recorded_;
  std::size_t recorded_bytes_ = 0;
  BufferRecord* rec_ = nullptr;
};

std::unique_ptr<Processor> Runtime::make_processor(const FluxExpr& f, const std::string& var,
                                                  const std::string& tag) {
  if (f.kind == FluxExpr::Kind::Ps) {
    return std::make_unique<PsProcessor>(*this, f, plan_.ps.at(&f), tag);
  }
  return std::make_unique<SimpleProcessor>(*this, plan_.simple.at(&f), var, tag);
}

Scope* Runtime::open_scope(const std::string& var, const std::string& tag) {
  auto it = plan_.vars.find(var);
  const VarPlan* vp = it != plan_.vars.end() && it->second.tracked() ? &it->second : nullptr;
  auto s = std::make_unique<Scope>(*this, vp, var, tag);
  if (vp) {
    s->rec_ = &record(var);
    s->rec_->fills += 1;
  }
  Scope* raw = s.get();
  scopes_.push_back(std::move(s));
  env_[var].push_back(raw);
  return raw;
}

void Runtime::close_scope(Scope* s) {
  if (scopes_.empty() || scopes_.back().get() != s) {
    throw std::logic_error("scopes closed out of order");
  }
  shrink(s->live_events(), s->live_bytes());
  if (s->rec_) s->rec_->frees += 1;
  env_[s->var()].pop_back();
  scopes_.pop_back();
}

// ---- evaluation over buffers --------------------------------------------------

NodeRef Runtime::resolve(const std::string& var) const {
  for (auto it = loop_.rbegin(); it != loop_.rend(); ++it) {
    if (*it->first == var) return it->second;
  }
  auto it = env_.find(var);
  if (it == env_.end() || it->second.empty()) throw std::logic_error("unbound variable " + var);
  return {it->second.back(), -1};
}

template <typename F>
void Runtime::for_children(NodeRef n, F&& f) const {
  const auto& ev = n.scope->events();
  long i = n.idx + 1;
  long stop = n.idx < 0 ? static_cast<long>(ev.size()) : ev[n.idx].match;
  if (stop < 0) throw BufferMiss("element " + ev[n.idx].name + " read before its end");
  while (i < stop) {
    const BufEvent& e = ev[i];
    if (e.kind == Event::Kind::Start) {
      if (e.match < 0) return;  // still being read
      f(NodeRef{n.scope, i});
      i = e.match + 1;
    } else {
      ++i;
    }
  }
}

void Runtime::select(NodeRef from, const std::vector<std::string>& steps, std::size_t i,
                     std::vector<NodeRef>& out) const {
  if (i == steps.size()) {
    out.push_back(from);
    return;
  }
  for_children(from, [&](NodeRef c) {
    if (c.scope->events()[c.idx].name == steps[i]) select(c, steps, i + 1, out);
  });
}

std::string Runtime::value_of(NodeRef n) const {
  const auto& ev = n.scope->events();
  bool full = n.idx < 0 ? n.scope->root_full() : ev[n.idx].full;
  if (!full) throw BufferMiss("value of an unbuffered node below " + n.scope->var());
  long i = n.idx + 1;
  long stop = n.idx < 0 ? static_cast<long>(ev.size()) : ev[n.idx].match;
  std::string s;
  for (; i < stop; ++i) {
    if (ev[i].kind == Event::Kind::Text) s += ev[i].name;
  }
  return s;
}

void Runtime::output(NodeRef n) {
  const auto& ev = n.scope->events();
  bool full = n.idx < 0 ? n.scope->root_full() : ev[n.idx].full;
  if (!full) throw BufferMiss("output of an unbuffered node below " + n.scope->var());
  long i = n.idx;
  long stop = n.idx < 0 ? static_cast<long>(ev.size()) : ev[n.idx].match + 1;
  bool doc = n.idx < 0 && n.scope->tag() == Schema::kDocument;
  if (n.idx < 0) {
    if (!doc) emit("<" + n.scope->tag() + ">");
    i = 0;
  }
  for (; i < stop; ++i) {
    const BufEvent& e = ev[i];
    switch (e.kind) {
      case Event::Kind::Start: emit("<" + e.name + ">"); break;
      case Event::Kind::End: emit("</" + e.name + ">"); break;
      case Event::Kind::Text: emit_text(e.name); break;
      case Event::Kind::FirstPast: break;
    }
  }
  if (n.idx < 0 && !doc) emit("</" + n.scope->tag() + ">");
}

bool Runtime::atom(const Condition& c) {
  NodeRef ref = resolve(c.lhs.var);
  auto ap = plan_.atoms.find(&c);
  if (ap != plan_.atoms.end()) {
    int node = ref.idx < 0 ? 0 : ref.scope->events()[ref.idx].node;
    auto it = ap->second.flag_of_node.find(node);
    if (it != ap->second.flag_of_node.end()) {
      return ref.idx < 0 ? ref.scope->root_flag(it->second) != 0
                         : ref.scope->node_flag(ref.scope->events()[ref.idx].flag_base, it->second) != 0;
    }
  }
  std::vector<NodeRef> nodes;
  select(ref, c.lhs.steps, 0, nodes);
  if (c.kind == Condition::Kind::Exists) return !nodes.empty();
  for (const auto& n : nodes) {
    if (compare_values(value_of(n), c.op, c.literal)) return true;
  }
  return false;
}

bool Runtime::holds(const Condition& c) {
  using K = Condition::Kind;
  switch (c.kind) {
    case K::True: return true;
    case K::And:
      for (const auto& ch : c.children) {
        if (!holds(*ch)) return false;
      }
      return true;
    case K::Or:
      for (const auto& ch : c.children) {
        if (holds(*ch)) return true;
      }
      return false;
    case K::Not: return !holds(*c.children[0]);
    case K::Exists:
    case K::Compare: return atom(c);
    case K::Join: {
      std::vector<NodeRef> left;
      std::vector<NodeRef> right;
      select(resolve(c.lhs.var), c.lhs.steps, 0, left);
      select(resolve(c.rhs.var), c.rhs.steps, 0, right);
      std::vector<std::string> rv;
      for (const auto& r : right) rv.push_back(value_of(r));
      for (const auto& l : left) {
        std::string lv = value_of(l);
        for (const auto& r : rv) {
          if (compare_values(lv, c.op, r)) return true;
        }
      }
      return false;
    }
  }
  return false;
}

void Runtime::eval(const XQuery& e) {
  using K = XQuery::Kind;
  switch (e.kind) {
    case K::Empty: return;
    case K::Str: emit(e.text); return;
    case K::Seq:
      for (const auto& it : e.items) eval(*it);
      return;
    case K::VarOut: output(resolve(e.var)); return;
    case K::PathOut: {
      std::vector<NodeRef> nodes;
      select(resolve(e.var), e.path, 0, nodes);
      for (const auto& n : nodes) output(n);
      return;
    }
    case K::For:
    case K::ForWhere: {
      std::vector<NodeRef> nodes;
      select(resolve(e.source), e.path, 0, nodes);
      for (const auto& n : nodes) {
        loop_.emplace_back(&e.var, n);
        if (e.kind == K::For || holds(*e.cond)) eval(*e.body);
        loop_.pop_back();
      }
      return;
    }
    case K::If:
      if (holds(*e.cond)) eval(*e.body);
      return;
  }
}

}  // namespace

// ---- driver -------------------------------------------------------------------

RunStats run(const ExecutionPlan& plan, EventSource& events, std::ostream& out) {
  auto t0 = std::chrono::steady_clock::now();
  Runtime rt(plan.data(), out);
  StreamValidator validator(plan.schema());
  auto root = rt.make_processor(plan.query(), kRootVar, Schema::kDocument);
  root->open();
  Event e;
  std::size_t n = 0;
  while (events.next(e)) {
    switch (e.kind) {
      case Event::Kind::Start: validator.start(e.name); break;
      case Event::Kind::Text: validator.text(e.name); break;
      case Event::Kind::End: validator.end(e.name); break;
      case Event::Kind::FirstPast: continue;
    }
    ++n;
    rt.feed_scopes(e, 0);
    Runtime::dispatch(*root, e);
  }
  validator.finish();
  root->close();
  rt.flush();
  out.flush();
  RunStats stats = rt.finish_stats();
  stats.input_events = n;
  stats.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return stats;
}

RunStats run(const ExecutionPlan& plan, std::istream& xml, std::ostream& out) {
  XmlReader reader(xml);
  return run(plan, reader, out);
}

std::string run_to_string(const ExecutionPlan& plan, std::string_view xml, RunStats* stats) {
  XmlReader reader(xml);
  std::ostringstream os;
  RunStats s = run(plan, reader, os);
  if (stats) *stats = std::move(s);
  return os.str();
}

}  // namespace fluxq
