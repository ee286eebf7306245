#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fluxq {

inline constexpr const char* kRootVar = "$ROOT";

/// `$x/a1/.../an`. Variables keep their leading `$`. `steps` is non-empty
/// everywhere except in VarOut-like contexts.
struct VarPath {
  std::string var;
  std::vector<std::string> steps;

  bool operator==(const VarPath&) const = default;
  auto operator<=>(const VarPath&) const = default;
};

enum class RelOp { Eq, Lt, Le, Gt, Ge };

const char* to_string(RelOp op);

struct Condition;
using CondPtr = std::shared_ptr<const Condition>;

struct Condition {
  enum class Kind { True, And, Or, Not, Compare, Exists, Join };

  Kind kind = Kind::True;
  RelOp op = RelOp::Eq;
  VarPath lhs;           // Compare, Exists, Join
  VarPath rhs;           // Join
  std::string literal;   // Compare
  std::vector<CondPtr> children;  // And, Or (>= 2), Not (1)

  static CondPtr truth();
  static CondPtr conj(CondPtr a, CondPtr b);
  static CondPtr disj(CondPtr a, CondPtr b);
  static CondPtr negate(CondPtr a);
  static CondPtr compare(VarPath p, RelOp op, std::string literal);
  static CondPtr exists(VarPath p);
  static CondPtr join(VarPath l, RelOp op, VarPath r);
};

struct XQuery;
using XPtr = std::shared_ptr<const XQuery>;

/// XQuery- expression. Nodes are immutable and may be shared.
struct XQuery {
  enum class Kind { Empty, Str, Seq, For, ForWhere, PathOut, VarOut, If };

  Kind kind = Kind::Empty;
  std::string text;                // Str
  std::vector<XPtr> items;         // Seq, >= 2 items, no Seq/Empty items
  std::string var;                 // For/ForWhere: bound; PathOut/VarOut: output
  std::string source;              // For/ForWhere
  std::vector<std::string> path;   // For/ForWhere/PathOut, non-empty
  CondPtr cond;                    // ForWhere, If
  XPtr body;                       // For, ForWhere, If

  static XPtr empty();
  static XPtr str(std::string text);
  /// Flattens nested sequences, drops Empty, collapses singletons.
  static XPtr seq(std::vector<XPtr> items);
  static XPtr for_(std::string var, std::string source, std::vector<std::string> path, XPtr body);
  static XPtr for_where(std::string var, std::string source, std::vector<std::string> path,
                       CondPtr cond, XPtr body);
  static XPtr path_out(std::string var, std::vector<std::string> path);
  static XPtr var_out(std::string var);
  static XPtr if_(CondPtr cond, XPtr body);
};

/// Deep structural equality (variable names compared literally).
bool equal(const Condition& a, const Condition& b);
bool equal(const XQuery& a, const XQuery& b);

/// Renames bound variables to `$v1, $v2, ...` in binding order, so that two
/// expressions equal up to renaming of bound variables compare equal.
XPtr alpha_canonical(const XPtr& e);
bool alpha_equal(const XPtr& a, const XPtr& b);
/// Same, continuing a numbering and applying `env` to free occurrences.
XPtr alpha_canonical(const XPtr& e, const std::map<std::string, std::string>& env, int& counter);
CondPtr rename_vars(const CondPtr& c, const std::map<std::string, std::string>& env);

/// Items of a Seq, or the node itself as a one-element list (none for Empty).
std::vector<XPtr> seq_items(const XPtr& e);

// ---- analyses --------------------------------------------------------------

std::set<std::string> condition_vars(const Condition& c);
std::set<std::string> free_vars(const XQuery& e);

/// All `$x/pi` paths occurring in conditions of e.
std::set<VarPath> condition_paths(const XQuery& e);
void collect_condition_paths(const Condition& c, std::set<VarPath>& out);

/// First steps of condition paths rooted at y, plus first steps of for-loop
/// paths over y.
std::set<std::string> dependencies(const std::string& y, const XQuery& e);

/// Whether `{$x}` occurs in e.
bool outputs_var(const XQuery& e, const std::string& x);

/// Variable bound by the nearest binder enclosing `sub` (compared by node
/// identity), $ROOT if none. nullopt if `sub` does not occur in `q`.
std::optional<std::string> parent_var(const XPtr& sub, const XPtr& q);

/// Number of nodes (expressions and conditions).
std::size_t size(const XQuery& e);

/// Bound variable names in binding order.
std::vector<std::string> binders(const XQuery& e);

// ---- concrete syntax -------------------------------------------------------

/// Parses XQuery- text. Literal markup between `{...}` blocks becomes Str
/// (trimmed; whitespace-only segments vanish). A backslash escapes the next
/// character, so `\{`, `\}`, `\$` and `\\` are literal. Leading `/`
/// abbreviates `$ROOT/`. Rebound variable names are renamed apart. With
/// `closed` false, variables other than $ROOT may occur free.
XPtr parse_xquery(const std::string& text, bool closed = true);

/// Parses a condition in isolation (no scope check).
CondPtr parse_condition(const std::string& text);

std::string to_string(const Condition& c);
/// Concrete syntax accepted by parse_xquery.
std::string to_string(const XQuery& e);
std::string to_string(const VarPath& p);

/// Escapes a literal string for embedding in concrete syntax.
std::string escape_literal_text(const std::string& s);

}  // namespace fluxq
