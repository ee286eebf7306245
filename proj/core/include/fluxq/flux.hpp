#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fluxq/schema.hpp"
#include "fluxq/xquery.hpp"

namespace fluxq {

struct FluxExpr;
using FPtr = std::shared_ptr<const FluxExpr>;

struct Handler {
  enum class Kind { OnFirst, On };

  Kind kind = Kind::OnFirst;
  /// on-first: `past(*)` is kept symbolic until a schema is bound.
  bool past_all = false;
  std::set<std::string> past;
  XPtr body;
  /// on: `on symbol as var return flux`.
  std::string symbol;
  std::string var;
  FPtr flux;

  static Handler on_first(std::set<std::string> past, XPtr body);
  static Handler on_first_all(XPtr body);
  static Handler on(std::string symbol, std::string var, FPtr flux);
};

/// Either a simple XQuery- expression or `s {ps $var: handlers} s'`.
struct FluxExpr {
  enum class Kind { Simple, Ps };

  Kind kind = Kind::Simple;
  XPtr simple;
  std::string prefix;
  std::string var;
  std::vector<Handler> handlers;
  std::string suffix;

  static FPtr make_simple(XPtr e);
  static FPtr ps(std::string var, std::vector<Handler> handlers, std::string prefix = {},
                 std::string suffix = {});
};

/// `alpha beta gamma` with alpha, gamma strings or guarded strings and beta
/// empty, `{$u}` or a guarded `{$u}` whose variable is not tested in alpha
/// or beta.
bool is_simple(const XQuery& e);

struct MaximalSubexpr {
  XPtr expr;
  /// Innermost enclosing process-stream variable ($ROOT at top level).
  std::string ps_var;
  /// Variables bound by enclosing on-handlers, outermost first.
  std::vector<std::string> handler_vars;
  /// Human-readable location, e.g. `ps $ROOT/on bib/ps $bib/on-first#2`.
  std::string location;
  /// Handler kind that holds this expression: on-first body, or the simple
  /// body of an on-handler, or the whole (simple) query.
  enum class Holder { OnFirst, OnBody, Query } holder = Holder::Query;
};

std::vector<MaximalSubexpr> maximal_xquery_subexprs(const FluxExpr& q);

std::set<std::string> hsymb(const std::vector<Handler>& handlers);

std::set<std::string> free_vars(const FluxExpr& q);

/// The on-first set with `past(*)` expanded against the symbols of `var_symbols`.
std::set<std::string> effective_past(const Handler& h, const std::set<std::string>& var_symbols);

struct SafetyViolation {
  enum class Kind { DependencyNotPast, SubtreeOutputUnsafe, OnHandlerOrder, OnHandlerForeignVar };
  Kind kind;
  std::string location;
  std::string detail;
};

const char* to_string(SafetyViolation::Kind k);

/// Checks both safety conditions for every process-stream subexpression.
/// Throws UnknownElement when an on-handler names a symbol outside
/// symb($y), unless `allow_dead_handlers`, in which case such handlers
/// (which can never fire) are skipped.
std::vector<SafetyViolation> check_safety(const FluxExpr& q, const Schema& schema,
                                          bool allow_dead_handlers = false);

/// Element name bound to each variable of q that is bound by an on-handler
/// ($ROOT maps to the document node).
std::map<std::string, std::string> handler_var_elements(const FluxExpr& q);

bool equal(const FluxExpr& a, const FluxExpr& b);
/// Renames every bound variable in binding order.
FPtr alpha_canonical(const FPtr& q);
bool alpha_equal(const FPtr& a, const FPtr& b);

/// `{ps $y: h1; h2}`; literal `;` inside handler bodies is escaped.
std::string to_string(const FluxExpr& q);
/// Accepts `ps` and `process-stream`.
FPtr parse_flux(const std::string& text);

}  // namespace fluxq
