//===--- ir.cpp - Shared IR meta-model --------------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/ir.h"

#include <algorithm>
#include <array>
#include <cassert>
#include <set>
#include <stdexcept>
#include <utility>

namespace irclone {

namespace {

struct KindInfo {
  NodeKind kind;
  std::string_view sbt;
  std::string_view json;
};

constexpr std::array<KindInfo, NumNodeKinds> Kinds{{
    {NodeKind::CompUnit, "CompUnit", "CompUnit"},
    {NodeKind::Func, "Func_name", "Func"},
    {NodeKind::Block, "Block", "Block"},
    {NodeKind::Compstmt, "Compstmt", "Compstmt"},
    {NodeKind::Exprstmt, "Exprstmt", "Exprstmt"},
    {NodeKind::Ifthen, "Ifthen", "Ifthen"},
    {NodeKind::Whilestmt, "Whilestmt", "Whilestmt"},
    {NodeKind::Forstmt, "Forstmt", "Forstmt"},
    {NodeKind::Returnstmt, "Returnstmt", "Returnstmt"},
    {NodeKind::Binary, "Binary", "Binary"},
    {NodeKind::Unary, "Unary", "Unary"},
    {NodeKind::Call, "Call", "Call"},
    {NodeKind::Ident, "Ident", "Ident"},
    {NodeKind::Literal, "Literal", "Literal"},
    {NodeKind::Operator, "Operator", "Operator"},
    {NodeKind::Decl, "Decl", "Decl"},
    {NodeKind::Label, "Label", "Label"},
}};

constexpr std::array<std::pair<Role, std::string_view>, NumRoles> Roles{{
    {Role::HasDirective, "has_directive"},
    {Role::HasStmt, "has_stmt"},
    {Role::HasExpr, "has_expr"},
    {Role::CondExpr, "cond_expr"},
    {Role::ThenStmt, "then_stmt"},
    {Role::ElseStmt, "else_stmt"},
    {Role::InitStmt, "init_stmt"},
    {Role::IncrStmt, "incr_stmt"},
    {Role::BodyStmt, "body_stmt"},
    {Role::BExpr1, "B_expr1"},
    {Role::BExpr2, "B_expr2"},
    {Role::UExpr, "U_expr"},
    {Role::LhsExpr, "LHS_expr"},
    {Role::RhsExpr, "RHS_expr"},
    {Role::LiName, "LI_name"},
    {Role::LiParam, "LI_param"},
    {Role::ReturnExpr, "return_expr"},
    {Role::Op, "Operator"},
}};

//===----------------------------------------------------------------------===//
// Schema
//===----------------------------------------------------------------------===//

enum class ChildClass { Expr, Stmt, Exact };

struct SchemaRow {
  NodeKind parent;
  Role role;
  ChildClass cls;
  NodeKind exact; // only for ChildClass::Exact
  unsigned min;
  unsigned max; // 0 = unbounded
};

constexpr NodeKind Any = NodeKind::CompUnit;

// (parent, role) -> permitted children and multiplicity.
constexpr SchemaRow Schema[] = {
    {NodeKind::CompUnit, Role::HasDirective, ChildClass::Exact, NodeKind::Func,
     0, 0},
    {NodeKind::CompUnit, Role::HasStmt, ChildClass::Exact, NodeKind::Decl, 0,
     0},
    {NodeKind::Func, Role::HasStmt, ChildClass::Exact, NodeKind::Block, 1, 1},
    {NodeKind::Func, Role::HasStmt, ChildClass::Exact, NodeKind::Compstmt, 1,
     1},
    {NodeKind::Block, Role::HasStmt, ChildClass::Exact, NodeKind::Compstmt, 1,
     1},
    {NodeKind::Compstmt, Role::HasStmt, ChildClass::Stmt, Any, 0, 0},
    {NodeKind::Exprstmt, Role::HasExpr, ChildClass::Expr, Any, 1, 1},
    {NodeKind::Ifthen, Role::CondExpr, ChildClass::Expr, Any, 1, 1},
    {NodeKind::Ifthen, Role::ThenStmt, ChildClass::Stmt, Any, 1, 1},
    {NodeKind::Ifthen, Role::ElseStmt, ChildClass::Stmt, Any, 0, 1},
    {NodeKind::Whilestmt, Role::CondExpr, ChildClass::Expr, Any, 1, 1},
    {NodeKind::Whilestmt, Role::BodyStmt, ChildClass::Stmt, Any, 1, 1},
    {NodeKind::Forstmt, Role::InitStmt, ChildClass::Exact, NodeKind::Exprstmt,
     0, 1},
    {NodeKind::Forstmt, Role::InitStmt, ChildClass::Exact, NodeKind::Decl, 0,
     1},
    {NodeKind::Forstmt, Role::CondExpr, ChildClass::Expr, Any, 0, 1},
    {NodeKind::Forstmt, Role::IncrStmt, ChildClass::Exact, NodeKind::Exprstmt,
     0, 1},
    {NodeKind::Forstmt, Role::BodyStmt, ChildClass::Stmt, Any, 1, 1},
    {NodeKind::Returnstmt, Role::ReturnExpr, ChildClass::Expr, Any, 0, 1},
    {NodeKind::Binary, Role::Op, ChildClass::Exact, NodeKind::Operator, 1, 1},
    {NodeKind::Binary, Role::BExpr1, ChildClass::Expr, Any, 0, 1},
    {NodeKind::Binary, Role::BExpr2, ChildClass::Expr, Any, 0, 1},
    {NodeKind::Binary, Role::LhsExpr, ChildClass::Expr, Any, 0, 1},
    {NodeKind::Binary, Role::RhsExpr, ChildClass::Expr, Any, 0, 1},
    {NodeKind::Unary, Role::Op, ChildClass::Exact, NodeKind::Operator, 1, 1},
    {NodeKind::Unary, Role::UExpr, ChildClass::Expr, Any, 1, 1},
    {NodeKind::Call, Role::LiName, ChildClass::Exact, NodeKind::Ident, 1, 1},
    {NodeKind::Call, Role::LiParam, ChildClass::Expr, Any, 0, 0},
    {NodeKind::Decl, Role::LhsExpr, ChildClass::Exact, NodeKind::Ident, 1, 1},
    {NodeKind::Decl, Role::RhsExpr, ChildClass::Expr, Any, 0, 1},
    {NodeKind::Label, Role::LiName, ChildClass::Exact, NodeKind::Ident, 1, 1},
};

bool rowAccepts(const SchemaRow &Row, NodeKind Child) {
  switch (Row.cls) {
  case ChildClass::Expr:
    return isExprKind(Child);
  case ChildClass::Stmt:
    return isStmtKind(Child);
  case ChildClass::Exact:
    return Row.exact == Child;
  }
  return false;
}

class Validator {
public:
  explicit Validator(const std::vector<Symbol> *Symbols) : Symbols(Symbols) {}

  void visit(const AstNode &N, const std::string &Path,
             std::optional<Role> Incoming) {
    if (N.isLeaf()) {
      if (N.value().empty())
        report(Path, "leaf node without a value");
      if (!N.children().empty())
        report(Path, "leaf node with children");
      if (N.kind() == NodeKind::Ident)
        checkIdent(N, Path, Incoming);
      return;
    }
    if (!N.value().empty())
      report(Path, "non-leaf node carries a value");

    std::map<Role, unsigned> Counts;
    for (const Edge &E : N.children()) {
      std::string ChildPath = Path;
      ChildPath += '/';
      ChildPath += roleName(E.role);
      if (!E.node) {
        report(ChildPath, "null child");
        continue;
      }
      ChildPath += '/';
      ChildPath += kindName(E.node->kind());
      ++Counts[E.role];
      if (!schemaAllows(N.kind(), E.role, E.node->kind()))
        report(ChildPath, std::string("schema forbids (") +
                              std::string(kindName(N.kind())) + ", " +
                              std::string(roleName(E.role)) + ", " +
                              std::string(kindName(E.node->kind())) + ")");
      visit(*E.node, ChildPath, E.role);
    }
    checkMultiplicity(N, Path, Counts);
  }

  std::vector<Violation> take() && { return std::move(Out); }

private:
  void report(const std::string &Path, std::string Rule) {
    Out.push_back({Path, std::move(Rule)});
  }

  void checkMultiplicity(const AstNode &N, const std::string &Path,
                         const std::map<Role, unsigned> &Counts) {
    std::set<Role> Seen;
    for (const SchemaRow &Row : Schema) {
      if (Row.parent != N.kind() || !Seen.insert(Row.role).second)
        continue;
      auto It = Counts.find(Row.role);
      unsigned C = It == Counts.end() ? 0 : It->second;
      std::string R(roleName(Row.role));
      if (C < Row.min)
        report(Path, "missing required role " + R);
      if (Row.max != 0 && C > Row.max)
        report(Path, "role " + R + " occurs " + std::to_string(C) +
                         " times, at most " + std::to_string(Row.max) +
                         " allowed");
    }
    if (N.kind() == NodeKind::Binary) {
      bool Positional = Counts.count(Role::BExpr1) || Counts.count(Role::BExpr2);
      bool Assign = Counts.count(Role::LhsExpr) || Counts.count(Role::RhsExpr);
      if (Positional && Assign)
        report(Path, "Binary mixes B_expr and LHS/RHS operands");
      else if (Positional &&
               !(Counts.count(Role::BExpr1) && Counts.count(Role::BExpr2)))
        report(Path, "Binary needs both B_expr1 and B_expr2");
      else if (Assign &&
               !(Counts.count(Role::LhsExpr) && Counts.count(Role::RhsExpr)))
        report(Path, "Binary needs both LHS_expr and RHS_expr");
      else if (!Positional && !Assign)
        report(Path, "Binary without operands");
    }
  }

  void checkIdent(const AstNode &N, const std::string &Path,
                  std::optional<Role> Incoming) {
    bool IsVar = varName(N.value()).has_value();
    bool UnderName = Incoming == Role::LiName;
    if (UnderName && IsVar)
      report(Path, "LI_name identifier must be a bare name");
    if (!UnderName && !IsVar)
      report(Path, "identifier outside LI_name must be rendered as Var[...]");
    if (!Symbols)
      return;
    SymbolRef Ref = referencedSymbol(N);
    auto Matches = std::count_if(
        Symbols->begin(), Symbols->end(), [&](const Symbol &S) {
          return S.name == Ref.name &&
                 (S.category == Ref.category ||
                  (Ref.category == SymbolCategory::Function &&
                   S.category == SymbolCategory::Label));
        });
    if (Matches != 1)
      report(Path, "identifier '" + Ref.name + "' resolves to " +
                       std::to_string(Matches) + " symbols");
  }

  const std::vector<Symbol> *Symbols;
  std::vector<Violation> Out;
};

void checkSymbols(const std::vector<Symbol> &Symbols,
                  std::vector<Violation> &Out) {
  std::set<int> Ids;
  std::set<std::pair<std::string, SymbolCategory>> Keys;
  for (const Symbol &S : Symbols) {
    if (S.name.empty())
      Out.push_back({"symbols", "symbol " + std::to_string(S.id) +
                                    " has an empty name"});
    if (!Ids.insert(S.id).second)
      Out.push_back({"symbols", "duplicate symbol id " + std::to_string(S.id)});
    if (!Keys.insert({S.name, S.category}).second)
      Out.push_back({"symbols", "duplicate symbol " + S.name + " (" +
                                    std::string(categoryName(S.category)) +
                                    ")"});
  }
}

} // namespace

//===----------------------------------------------------------------------===//
// Names
//===----------------------------------------------------------------------===//

std::string_view kindName(NodeKind K) {
  return Kinds[static_cast<std::size_t>(K)].sbt;
}

std::optional<NodeKind> kindFromName(std::string_view Name) {
  for (const KindInfo &I : Kinds)
    if (I.sbt == Name)
      return I.kind;
  return std::nullopt;
}

std::string_view kindJsonName(NodeKind K) {
  return Kinds[static_cast<std::size_t>(K)].json;
}

std::optional<NodeKind> kindFromJsonName(std::string_view Name) {
  for (const KindInfo &I : Kinds)
    if (I.json == Name)
      return I.kind;
  return std::nullopt;
}

std::string_view roleName(Role R) {
  return Roles[static_cast<std::size_t>(R)].second;
}

std::optional<Role> roleFromName(std::string_view Name) {
  for (const auto &[R, N] : Roles)
    if (N == Name)
      return R;
  return std::nullopt;
}

std::string_view languageName(Language L) {
  return L == Language::C ? "C" : "COBOL";
}

std::optional<Language> languageFromName(std::string_view Name) {
  if (Name == "C")
    return Language::C;
  if (Name == "COBOL")
    return Language::Cobol;
  return std::nullopt;
}

std::string_view categoryName(SymbolCategory C) {
  switch (C) {
  case SymbolCategory::Variable:
    return "variable";
  case SymbolCategory::Function:
    return "function";
  case SymbolCategory::Label:
    return "label";
  case SymbolCategory::Constant:
    return "constant";
  }
  return "variable";
}

std::optional<SymbolCategory> categoryFromName(std::string_view Name) {
  for (SymbolCategory C :
       {SymbolCategory::Variable, SymbolCategory::Function,
        SymbolCategory::Label, SymbolCategory::Constant})
    if (categoryName(C) == Name)
      return C;
  return std::nullopt;
}

//===----------------------------------------------------------------------===//
// AstNode
//===----------------------------------------------------------------------===//

NodePtr AstNode::leaf(NodeKind Kind, std::string Value) {
  if (!isLeafKind(Kind))
    throw std::invalid_argument("AstNode::leaf: " +
                                std::string(kindName(Kind)) +
                                " is not a leaf kind");
  return NodePtr(new AstNode(Kind, std::move(Value), {}));
}

NodePtr AstNode::branch(NodeKind Kind, std::vector<Edge> Children) {
  if (isLeafKind(Kind))
    throw std::invalid_argument("AstNode::branch: " +
                                std::string(kindName(Kind)) +
                                " is a leaf kind");
  for (const Edge &E : Children)
    if (!E.node)
      throw std::invalid_argument("AstNode::branch: null child");
  return NodePtr(new AstNode(Kind, {}, std::move(Children)));
}

std::size_t AstNode::size() const {
  std::size_t N = 1;
  for (const Edge &E : Children)
    N += E.node->size();
  return N;
}

std::size_t AstNode::depth() const {
  std::size_t D = 0;
  for (const Edge &E : Children)
    D = std::max(D, E.node->depth());
  return D + 1;
}

NodePtr AstNode::withValue(std::string NewValue) const {
  return leaf(Kind, std::move(NewValue));
}

NodePtr AstNode::withChildren(std::vector<Edge> NewChildren) const {
  return branch(Kind, std::move(NewChildren));
}

bool structurallyEqual(const AstNode &A, const AstNode &B) {
  if (A.kind() != B.kind() || A.value() != B.value() ||
      A.children().size() != B.children().size())
    return false;
  for (std::size_t I = 0; I < A.children().size(); ++I) {
    const Edge &EA = A.children()[I];
    const Edge &EB = B.children()[I];
    if (EA.role != EB.role || !structurallyEqual(*EA.node, *EB.node))
      return false;
  }
  return true;
}

int SymbolTable::intern(std::string_view Name, SymbolCategory Category) {
  if (const Symbol *S = find(Name, Category))
    return S->id;
  int Id = static_cast<int>(Symbols.size()) + 1;
  Symbols.push_back({Id, std::string(Name), Category});
  return Id;
}

const Symbol *SymbolTable::find(std::string_view Name,
                                SymbolCategory Category) const {
  for (const Symbol &S : Symbols)
    if (S.name == Name && S.category == Category)
      return &S;
  return nullptr;
}

std::string varRendering(std::string_view Name) {
  std::string Out = "Var[";
  Out += Name;
  Out += ']';
  return Out;
}

std::optional<std::string> varName(std::string_view IdentValue) {
  if (IdentValue.size() < 6 || IdentValue.substr(0, 4) != "Var[" ||
      IdentValue.back() != ']')
    return std::nullopt;
  return std::string(IdentValue.substr(4, IdentValue.size() - 5));
}

SymbolRef referencedSymbol(const AstNode &Ident) {
  assert(Ident.kind() == NodeKind::Ident);
  if (auto Name = varName(Ident.value()))
    return {std::move(*Name), SymbolCategory::Variable};
  return {Ident.value(), SymbolCategory::Function};
}

//===----------------------------------------------------------------------===//
// Validation and census
//===----------------------------------------------------------------------===//

bool schemaAllows(NodeKind Parent, Role R, NodeKind Child) {
  for (const SchemaRow &Row : Schema)
    if (Row.parent == Parent && Row.role == R && rowAccepts(Row, Child))
      return true;
  return false;
}

std::vector<Violation> validateTree(const AstNode &Root) {
  Validator V(nullptr);
  V.visit(Root, std::string(kindName(Root.kind())), std::nullopt);
  return std::move(V).take();
}

std::vector<Violation> validate(const CompilationUnit &CU) {
  if (!CU.root)
    return {{"", "compilation unit has no root"}};
  std::vector<Violation> Out;
  if (CU.root->kind() != NodeKind::CompUnit)
    Out.push_back({std::string(kindName(CU.root->kind())),
                   "root must be CompUnit"});
  checkSymbols(CU.symbols, Out);
  Validator V(&CU.symbols);
  V.visit(*CU.root, std::string(kindName(CU.root->kind())), std::nullopt);
  for (Violation &X : std::move(V).take())
    Out.push_back(std::move(X));
  return Out;
}

std::map<NodeKind, std::size_t> nodeCensus(const AstNode &Root) {
  std::map<NodeKind, std::size_t> Census;
  std::vector<const AstNode *> Work{&Root};
  while (!Work.empty()) {
    const AstNode *N = Work.back();
    Work.pop_back();
    ++Census[N->kind()];
    for (const Edge &E : N->children())
      Work.push_back(E.node.get());
  }
  return Census;
}

//===----------------------------------------------------------------------===//
// Operators
//===----------------------------------------------------------------------===//

namespace {

struct OperatorSpelling {
  std::string_view symbol;
  OperatorArity arity;
  std::string_view name;
};

// Unary postfix forms use the "post" prefix as their lookup key.
constexpr OperatorSpelling Operators[] = {
    {"=", OperatorArity::Binary, "="},
    {"+", OperatorArity::Binary, "Plus"},
    {"-", OperatorArity::Binary, "Minus"},
    {"*", OperatorArity::Binary, "Multiply"},
    {"/", OperatorArity::Binary, "Divide"},
    {"%", OperatorArity::Binary, "Modulo"},
    {"**", OperatorArity::Binary, "Power"},
    {"==", OperatorArity::Binary, "Equals"},
    {"!=", OperatorArity::Binary, "Not Equals"},
    {"<", OperatorArity::Binary, "Less Than"},
    {"<=", OperatorArity::Binary, "Less Than Equals"},
    {">", OperatorArity::Binary, "Greater Than"},
    {">=", OperatorArity::Binary, "Greater Than Equals"},
    {"&&", OperatorArity::Binary, "Logical And"},
    {"||", OperatorArity::Binary, "Logical Or"},
    {"[]", OperatorArity::Binary, "Array Index"},
    {"&", OperatorArity::Unary, "address of"},
    {"-", OperatorArity::Unary, "Unary Minus"},
    {"+", OperatorArity::Unary, "Unary Plus"},
    {"!", OperatorArity::Unary, "Logical Not"},
    {"++", OperatorArity::Unary, "Pre Increment"},
    {"--", OperatorArity::Unary, "Pre Decrement"},
    {"post++", OperatorArity::Unary, "Post Increment"},
    {"post--", OperatorArity::Unary, "Post Decrement"},
    {"(", OperatorArity::Unary, "("},
};

} // namespace

std::optional<std::string_view> operatorName(std::string_view Symbol,
                                             OperatorArity Arity) {
  for (const OperatorSpelling &O : Operators)
    if (O.symbol == Symbol && O.arity == Arity)
      return O.name;
  return std::nullopt;
}

std::optional<std::string_view> operatorSymbol(std::string_view Name) {
  for (const OperatorSpelling &O : Operators) {
    if (O.name != Name)
      continue;
    std::string_view S = O.symbol;
    if (S.substr(0, 4) == "post")
      S.remove_prefix(4);
    return S;
  }
  return std::nullopt;
}

} // namespace irclone
