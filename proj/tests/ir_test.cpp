//===--- ir_test.cpp - IR core tests ----------------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/ir.h"
#include "test_util.h"

#include <gtest/gtest.h>

using namespace irclone;

namespace {

NodePtr lit(const std::string &V) { return AstNode::leaf(NodeKind::Literal, V); }
NodePtr var(const std::string &V) {
  return AstNode::leaf(NodeKind::Ident, varRendering(V));
}
NodePtr op(const std::string &V) { return AstNode::leaf(NodeKind::Operator, V); }

NodePtr minimalUnit(std::vector<Edge> Body = {}) {
  NodePtr C = AstNode::branch(NodeKind::Compstmt, std::move(Body));
  NodePtr F = AstNode::branch(NodeKind::Func, {{Role::HasStmt, C}});
  return AstNode::branch(NodeKind::CompUnit, {{Role::HasDirective, F}});
}

bool hasRule(const std::vector<Violation> &V, const std::string &Needle) {
  for (const Violation &X : V)
    if (X.rule.find(Needle) != std::string::npos)
      return true;
  return false;
}

} // namespace

TEST(IrNames, KindAndRoleNamesRoundTrip) {
  for (std::size_t I = 0; I < NumNodeKinds; ++I) {
    auto K = static_cast<NodeKind>(I);
    EXPECT_EQ(kindFromName(kindName(K)), K);
    EXPECT_EQ(kindFromJsonName(kindJsonName(K)), K);
  }
  for (std::size_t I = 0; I < NumRoles; ++I) {
    auto R = static_cast<Role>(I);
    EXPECT_EQ(roleFromName(roleName(R)), R);
  }
  EXPECT_EQ(kindName(NodeKind::Func), "Func_name");
  EXPECT_EQ(kindJsonName(NodeKind::Func), "Func");
  EXPECT_EQ(roleName(Role::BExpr1), "B_expr1");
  EXPECT_EQ(roleName(Role::LiName), "LI_name");
  EXPECT_EQ(roleName(Role::Op), "Operator");
  EXPECT_FALSE(kindFromName("Nope"));
  EXPECT_FALSE(roleFromName("has-stmt"));
}

TEST(IrNames, LanguagesAndCategories) {
  EXPECT_EQ(languageName(Language::Cobol), "COBOL");
  EXPECT_EQ(languageFromName("C"), Language::C);
  EXPECT_FALSE(languageFromName("Fortran"));
  for (auto C : {SymbolCategory::Variable, SymbolCategory::Function,
                 SymbolCategory::Label, SymbolCategory::Constant})
    EXPECT_EQ(categoryFromName(categoryName(C)), C);
}

TEST(IrVar, RenderingAndExtraction) {
  EXPECT_EQ(varRendering("x"), "Var[x]");
  EXPECT_EQ(varName("Var[WS-COUNT]"), "WS-COUNT");
  EXPECT_FALSE(varName("x"));
  EXPECT_FALSE(varName("Var[x"));
  EXPECT_FALSE(varName("Var[]"));
}

TEST(IrNode, SizeDepthAndEquality) {
  NodePtr T = minimalUnit(
      {{Role::HasStmt,
        AstNode::branch(NodeKind::Returnstmt, {{Role::ReturnExpr, lit("0")}})}});
  EXPECT_EQ(T->size(), 5u);
  EXPECT_EQ(T->depth(), 5u);
  NodePtr U = minimalUnit(
      {{Role::HasStmt,
        AstNode::branch(NodeKind::Returnstmt, {{Role::ReturnExpr, lit("0")}})}});
  EXPECT_TRUE(structurallyEqual(*T, *U));
  NodePtr W = minimalUnit(
      {{Role::HasStmt,
        AstNode::branch(NodeKind::Returnstmt, {{Role::ReturnExpr, lit("1")}})}});
  EXPECT_FALSE(structurallyEqual(*T, *W));
}

TEST(IrNode, WithValueLeavesOriginalUntouched) {
  NodePtr A = lit("1");
  NodePtr B = A->withValue("2");
  EXPECT_EQ(A->value(), "1");
  EXPECT_EQ(B->value(), "2");
  EXPECT_EQ(B->kind(), NodeKind::Literal);
}

TEST(IrSymbols, InternIsIdempotentPerCategory) {
  SymbolTable T;
  int A = T.intern("x", SymbolCategory::Variable);
  int B = T.intern("x", SymbolCategory::Variable);
  int C = T.intern("x", SymbolCategory::Function);
  EXPECT_EQ(A, 1);
  EXPECT_EQ(A, B);
  EXPECT_NE(A, C);
  ASSERT_NE(T.find("x", SymbolCategory::Function), nullptr);
  EXPECT_EQ(T.find("x", SymbolCategory::Label), nullptr);
  EXPECT_EQ(T.symbols().size(), 2u);
}

TEST(IrValidate, MinimalUnitIsValid) {
  CompilationUnit CU{minimalUnit(), {}, Language::C, "m"};
  EXPECT_TRUE(validate(CU).empty());
}

TEST(IrValidate, SchemaViolationsAreReported) {
  // Exprstmt directly under CompUnit.
  NodePtr Bad = AstNode::branch(
      NodeKind::CompUnit,
      {{Role::HasStmt,
        AstNode::branch(NodeKind::Exprstmt, {{Role::HasExpr, lit("1")}})}});
  auto V = validateTree(*Bad);
  ASSERT_FALSE(V.empty());
  EXPECT_TRUE(hasRule(V, "schema forbids"));
}

TEST(IrValidate, MissingRequiredRole) {
  NodePtr If = AstNode::branch(NodeKind::Ifthen, {{Role::CondExpr, lit("1")}});
  auto V = validateTree(*minimalUnit({{Role::HasStmt, If}}));
  EXPECT_TRUE(hasRule(V, "missing required role then_stmt"));
}

TEST(IrValidate, BinaryOperandShapes) {
  NodePtr Mixed = AstNode::branch(NodeKind::Binary, {{Role::Op, op("Plus")},
                                                     {Role::BExpr1, lit("1")},
                                                     {Role::RhsExpr, lit("2")}});
  NodePtr Stmt =
      AstNode::branch(NodeKind::Exprstmt, {{Role::HasExpr, Mixed}});
  EXPECT_TRUE(hasRule(validateTree(*minimalUnit({{Role::HasStmt, Stmt}})),
                      "mixes"));
}

TEST(IrValidate, IdentifierRules) {
  NodePtr Call = AstNode::branch(
      NodeKind::Call, {{Role::LiName, var("f")}, {Role::LiParam, var("x")}});
  NodePtr Stmt = AstNode::branch(NodeKind::Exprstmt, {{Role::HasExpr, Call}});
  CompilationUnit CU{minimalUnit({{Role::HasStmt, Stmt}}),
                     {{1, "f", SymbolCategory::Function}},
                     Language::C,
                     "u"};
  auto V = validate(CU);
  EXPECT_TRUE(hasRule(V, "bare name"));
  EXPECT_TRUE(hasRule(V, "resolves to 0 symbols"));
}

TEST(IrValidate, DuplicateSymbols) {
  CompilationUnit CU{minimalUnit(),
                     {{1, "x", SymbolCategory::Variable},
                      {1, "x", SymbolCategory::Variable}},
                     Language::C,
                     "u"};
  auto V = validate(CU);
  EXPECT_TRUE(hasRule(V, "duplicate symbol id"));
  EXPECT_TRUE(hasRule(V, "duplicate symbol x"));
}

TEST(IrValidate, LeafWithoutValue) {
  NodePtr Stmt =
      AstNode::branch(NodeKind::Exprstmt, {{Role::HasExpr, lit("")}});
  EXPECT_TRUE(hasRule(validateTree(*minimalUnit({{Role::HasStmt, Stmt}})),
                      "without a value"));
}

TEST(IrSchema, AllowsTable) {
  EXPECT_TRUE(schemaAllows(NodeKind::Func, Role::HasStmt, NodeKind::Block));
  EXPECT_TRUE(schemaAllows(NodeKind::Func, Role::HasStmt, NodeKind::Compstmt));
  EXPECT_FALSE(schemaAllows(NodeKind::Func, Role::HasStmt, NodeKind::Ifthen));
  EXPECT_TRUE(schemaAllows(NodeKind::Compstmt, Role::HasStmt, NodeKind::Decl));
  EXPECT_FALSE(schemaAllows(NodeKind::Call, Role::LiName, NodeKind::Literal));
  EXPECT_TRUE(schemaAllows(NodeKind::Binary, Role::Op, NodeKind::Operator));
}

TEST(IrCensus, CountsEveryNode) {
  NodePtr T = minimalUnit(
      {{Role::HasStmt,
        AstNode::branch(NodeKind::Returnstmt, {{Role::ReturnExpr, lit("0")}})}});
  auto C = nodeCensus(*T);
  EXPECT_EQ(C[NodeKind::CompUnit], 1u);
  EXPECT_EQ(C[NodeKind::Literal], 1u);
  std::size_t Total = 0;
  for (const auto &[K, N] : C)
    Total += N;
  EXPECT_EQ(Total, T->size());
}

TEST(IrOperators, NamesAndSymbols) {
  EXPECT_EQ(operatorName(">=", OperatorArity::Binary), "Greater Than Equals");
  EXPECT_EQ(operatorName("&", OperatorArity::Unary), "address of");
  EXPECT_EQ(operatorName("-", OperatorArity::Unary),
            operatorName("-", OperatorArity::Unary));
  EXPECT_NE(operatorName("-", OperatorArity::Unary),
            operatorName("-", OperatorArity::Binary));
  EXPECT_EQ(operatorSymbol("Plus"), "+");
  EXPECT_FALSE(operatorName("@@", OperatorArity::Binary));
}

TEST(IrProperty, RandomTreesAreSchemaValid) {
  Rng G(7);
  for (int I = 0; I < 300; ++I) {
    NodePtr T = test::randomTree(G);
    auto V = validateTree(*T);
    ASSERT_TRUE(V.empty()) << V.front().path << ": " << V.front().rule;
  }
}
