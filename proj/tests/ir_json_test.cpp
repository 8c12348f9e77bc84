//===--- ir_json_test.cpp - IR serialization tests --------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/frontend.h"
#include "irclone/ir_json.h"
#include "irclone/support.h"
#include "test_util.h"

#include <gtest/gtest.h>

using namespace irclone;

TEST(IrJson, RandomTreesRoundTrip) {
  Rng G(11);
  for (int I = 0; I < 200; ++I) {
    NodePtr T = test::randomTree(G);
    NodePtr Back = nodeFromJson(nodeToJson(*T));
    ASSERT_TRUE(structurallyEqual(*T, *Back));
  }
}

TEST(IrJson, FixtureUnitsRoundTripTextually) {
  for (const auto &P : test::allFixtureSources()) {
    SourceFile Src{P.string(), readFile(P), true};
    ParseResult R = parseSource(Src, *languageFromPath(P));
    ASSERT_TRUE(R.ok()) << P;
    std::string Text = dumpUnit(*R.unit);
    CompilationUnit Back = parseUnit(Text);
    EXPECT_EQ(dumpUnit(Back), Text);
    EXPECT_EQ(Back.sourceId, R.unit->sourceId);
    EXPECT_EQ(Back.language, R.unit->language);
    EXPECT_EQ(Back.symbols, R.unit->symbols);
  }
}

TEST(IrJson, FieldNames) {
  CompilationUnit CU;
  CU.root = AstNode::branch(NodeKind::CompUnit);
  CU.sourceId = "s1";
  CU.language = Language::Cobol;
  CU.symbols = {{1, "X", SymbolCategory::Variable}};
  OrderedJson J = unitToJson(CU);
  EXPECT_EQ(J["source_id"], "s1");
  EXPECT_EQ(J["language"], "COBOL");
  EXPECT_EQ(J["symbols"][0]["category"], "variable");
  EXPECT_EQ(J["root"]["kind"], "CompUnit");
}

TEST(IrJson, MalformedInputIsRejected) {
  EXPECT_THROW(parseUnit("{"), IrJsonError);
  EXPECT_THROW(parseUnit(R"({"language":"C","source_id":"a","symbols":[],
                           "root":{"kind":"Bogus","children":[]}})"),
               IrJsonError);
  EXPECT_THROW(parseUnit(R"({"language":"Pascal","source_id":"a",
                           "symbols":[],"root":{"kind":"CompUnit",
                           "children":[]}})"),
               IrJsonError);
}
