//===--- ir.h - Shared IR meta-model ----------------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// The language-neutral IR that both front-ends instantiate: an AST of typed
/// nodes connected by role-labelled edges, plus a flat symbol table.
///
/// Nodes are immutable once built and shared through shared_ptr<const>, so
/// passes that rewrite a tree copy only the spine they touch.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_IR_H
#define IRCLONE_IR_H

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irclone {

enum class NodeKind {
  CompUnit,
  Func,
  Block,
  Compstmt,
  Exprstmt,
  Ifthen,
  Whilestmt,
  Forstmt,
  Returnstmt,
  Binary,
  Unary,
  Call,
  Ident,
  Literal,
  Operator,
  Decl,
  Label,
};

inline constexpr std::size_t NumNodeKinds = 17;

/// Edge labels. `Op` attaches the Operator leaf of a Binary or Unary node and
/// renders as "Operator".
enum class Role {
  HasDirective,
  HasStmt,
  HasExpr,
  CondExpr,
  ThenStmt,
  ElseStmt,
  InitStmt,
  IncrStmt,
  BodyStmt,
  BExpr1,
  BExpr2,
  UExpr,
  LhsExpr,
  RhsExpr,
  LiName,
  LiParam,
  ReturnExpr,
  Op,
};

inline constexpr std::size_t NumRoles = 18;

enum class Language { C, Cobol };

enum class SymbolCategory { Variable, Function, Label, Constant };

/// Name used for the kind in SBT and JSON output (Func renders as Func_name).
std::string_view kindName(NodeKind K);
std::optional<NodeKind> kindFromName(std::string_view Name);
/// Name as it appears in the IR JSON "kind" field.
std::string_view kindJsonName(NodeKind K);
std::optional<NodeKind> kindFromJsonName(std::string_view Name);

std::string_view roleName(Role R);
std::optional<Role> roleFromName(std::string_view Name);

std::string_view languageName(Language L);
std::optional<Language> languageFromName(std::string_view Name);

std::string_view categoryName(SymbolCategory C);
std::optional<SymbolCategory> categoryFromName(std::string_view Name);

/// Ident, Literal and Operator carry a value and never have children.
constexpr bool isLeafKind(NodeKind K) {
  return K == NodeKind::Ident || K == NodeKind::Literal ||
         K == NodeKind::Operator;
}

constexpr bool isExprKind(NodeKind K) {
  return K == NodeKind::Binary || K == NodeKind::Unary ||
         K == NodeKind::Call || K == NodeKind::Ident ||
         K == NodeKind::Literal;
}

constexpr bool isStmtKind(NodeKind K) {
  return K == NodeKind::Block || K == NodeKind::Compstmt ||
         K == NodeKind::Exprstmt || K == NodeKind::Ifthen ||
         K == NodeKind::Whilestmt || K == NodeKind::Forstmt ||
         K == NodeKind::Returnstmt || K == NodeKind::Decl ||
         K == NodeKind::Label;
}

class AstNode;
using NodePtr = std::shared_ptr<const AstNode>;

struct Edge {
  Role role;
  NodePtr node;
};

class AstNode {
public:
  static NodePtr leaf(NodeKind Kind, std::string Value);
  static NodePtr branch(NodeKind Kind, std::vector<Edge> Children = {});

  NodeKind kind() const { return Kind; }
  bool isLeaf() const { return isLeafKind(Kind); }
  /// Empty for non-leaf nodes.
  const std::string &value() const { return Value; }
  const std::vector<Edge> &children() const { return Children; }

  std::size_t size() const;
  std::size_t depth() const;

  /// Copy of this node with a different value (leaf kinds only).
  NodePtr withValue(std::string NewValue) const;
  NodePtr withChildren(std::vector<Edge> NewChildren) const;

private:
  AstNode(NodeKind Kind, std::string Value, std::vector<Edge> Children)
      : Kind(Kind), Value(std::move(Value)), Children(std::move(Children)) {}

  NodeKind Kind;
  std::string Value;
  std::vector<Edge> Children;
};

/// Deep structural equality.
bool structurallyEqual(const AstNode &A, const AstNode &B);

struct Symbol {
  int id = 0;
  std::string name;
  SymbolCategory category = SymbolCategory::Variable;

  friend bool operator==(const Symbol &, const Symbol &) = default;
};

/// Builds a symbol table with unique ids and unique (name, category) pairs.
class SymbolTable {
public:
  /// Returns the id of the existing or newly added symbol.
  int intern(std::string_view Name, SymbolCategory Category);
  const Symbol *find(std::string_view Name, SymbolCategory Category) const;
  const std::vector<Symbol> &symbols() const { return Symbols; }
  std::vector<Symbol> take() && { return std::move(Symbols); }

private:
  std::vector<Symbol> Symbols;
};

struct CompilationUnit {
  NodePtr root;
  std::vector<Symbol> symbols;
  Language language = Language::C;
  std::string sourceId;
};

/// Renders a variable name the way Ident leaves spell it: "Var[x]".
std::string varRendering(std::string_view Name);
/// Inverse of varRendering; nullopt when the value is not of that form.
std::optional<std::string> varName(std::string_view IdentValue);

/// Symbol an Ident leaf refers to. Var[...] values refer to variables; bare
/// names (call targets under LI_name) refer to functions.
struct SymbolRef {
  std::string name;
  SymbolCategory category;
};
SymbolRef referencedSymbol(const AstNode &Ident);

struct Violation {
  /// Slash-separated path of kinds and roles from the root,
  /// e.g. "CompUnit/has_directive/Func_name".
  std::string path;
  std::string rule;

  friend bool operator==(const Violation &, const Violation &) = default;
};

std::vector<Violation> validate(const CompilationUnit &CU);
std::vector<Violation> validateTree(const AstNode &Root);

/// Whether `Child` may hang off `Parent` under `R`.
bool schemaAllows(NodeKind Parent, Role R, NodeKind Child);

std::map<NodeKind, std::size_t> nodeCensus(const AstNode &Root);
inline std::map<NodeKind, std::size_t> nodeCensus(const CompilationUnit &CU) {
  return nodeCensus(*CU.root);
}

//===----------------------------------------------------------------------===//
// Operator spellings
//===----------------------------------------------------------------------===//

enum class OperatorArity { Unary, Binary };

/// Spelled-out name for a source operator token, e.g. ">=" ->
/// "Greater Than Equals". Unary operators use distinct names ("address of",
/// "Unary Minus", "Post Increment").
std::optional<std::string_view> operatorName(std::string_view Symbol,
                                             OperatorArity Arity);
/// Source token for a spelled-out operator name, if it has one.
std::optional<std::string_view> operatorSymbol(std::string_view Name);

} // namespace irclone

#endif // IRCLONE_IR_H
