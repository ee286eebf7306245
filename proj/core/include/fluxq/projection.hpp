#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fluxq/flux.hpp"
#include "fluxq/xquery.hpp"

namespace fluxq {

/// Why a path has to be kept in a buffer.
enum class PathKind { Structural, OutputSubtree, JoinOperand };

const char* to_string(PathKind k);

/// `$var/steps`, steps possibly empty (the node of `$var` itself).
struct BufferPath {
  std::string var;
  std::vector<std::string> steps;
  PathKind kind = PathKind::Structural;

  auto operator<=>(const BufferPath&) const = default;
  bool operator==(const BufferPath&) const = default;
};

std::string to_string(const BufferPath& p);

/// Pi($r, alpha): the paths below $r that evaluating alpha reads from a
/// buffer. Constant comparisons and exists-tests contribute nothing; they
/// are answered by flags.
std::set<BufferPath> buffer_paths(const std::string& r, const XQuery& alpha);

/// Pi($r) over every maximal XQuery- subexpression of q. The simple body
/// of an on-handler is streamed, so its `{$x}` is not a buffered output;
/// only join operands in its conditions are.
std::set<BufferPath> buffer_paths(const std::string& r, const FluxExpr& q);

/// Variables free in some maximal XQuery- subexpression of q.
std::set<std::string> buffered_vars(const FluxExpr& q);

/// Pruned, marked prefix tree of one variable's buffered paths.
class BufferTree {
 public:
  struct Node {
    std::string tag;  // empty for the root
    int parent = -1;
    std::map<std::string, int> children;
    bool marked = false;
  };

  BufferTree() = default;
  explicit BufferTree(std::string var) : var_(std::move(var)) { nodes_.push_back(Node{}); }

  const std::string& var() const { return var_; }
  const Node& node(int i) const { return nodes_[i]; }
  const Node& root() const { return nodes_[0]; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.size() == 1 && !nodes_[0].marked; }

  /// Child of `parent` with `tag`, or -1.
  int child(int parent, const std::string& tag) const;
  /// Node reached by following `steps` from the root, or -1 when the walk
  /// leaves the tree. A walk entering a marked node stops there and
  /// returns it (everything below is buffered whole).
  int find(const std::vector<std::string>& steps) const;
  /// Whether the node or one of its ancestors is marked.
  bool covered(int i) const;
  std::vector<std::string> path_of(int i) const;

  /// Indented text form, one node per line, `*` after marked nodes.
  std::string dump() const;

 private:
  friend BufferTree build_buffer_tree(const std::string& r, const std::set<BufferPath>& paths);
  int add_child(int parent, const std::string& tag);

  std::string var_;
  std::vector<Node> nodes_;
};

/// Merges the paths into a prefix tree, marks the ends of join and output
/// paths, and drops everything strictly below a marked node.
BufferTree build_buffer_tree(const std::string& r, const std::set<BufferPath>& paths);

/// Buffer trees of every variable in buffered_vars(q) with at least one
/// buffered path.
std::map<std::string, BufferTree> buffer_trees(const FluxExpr& q);

}  // namespace fluxq
