//===--- normalize_test.cpp - Anonymization and mapping tests ---*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/frontend.h"
#include "irclone/normalize.h"
#include "irclone/sbt.h"
#include "test_util.h"

#include <gtest/gtest.h>

#include <set>

using namespace irclone;

namespace {

CompilationUnit parseC(const std::string &Text) {
  ParseResult R = irclone::parseC({"t.c", Text, true});
  EXPECT_TRUE(R.ok()) << (R.diagnostics.empty() ? "" : R.diagnostics[0].message);
  return *R.unit;
}

std::vector<CompilationUnit> fixtureUnits() {
  std::vector<CompilationUnit> Out;
  for (const auto &P : test::allFixtureSources()) {
    ParseResult R = parseSource({P.string(), readFile(P), true},
                                *languageFromPath(P));
    EXPECT_TRUE(R.ok()) << P;
    Out.push_back(*R.unit);
  }
  return Out;
}

void collectIdents(const AstNode &N, std::vector<std::string> &Out) {
  if (N.kind() == NodeKind::Ident)
    Out.push_back(N.value());
  for (const Edge &E : N.children())
    collectIdents(*E.node, Out);
}

/// Checks the ledger is a bijection and that the Ident rewrite is a
/// consistent renaming of the original occurrences.
void checkAnonymization(const CompilationUnit &CU) {
  auto [Anon, Ledger] = anonymize(CU);
  std::set<std::pair<std::string, SymbolCategory>> Originals;
  std::set<std::string> Generics;
  for (const RenamePair &P : Ledger.pairs) {
    ASSERT_TRUE(Originals.insert({P.original, P.category}).second);
    ASSERT_TRUE(Generics.insert(P.generic).second);
  }
  std::vector<std::string> Before, After;
  collectIdents(*CU.root, Before);
  collectIdents(*Anon.root, After);
  ASSERT_EQ(Before.size(), After.size());
  std::map<std::string, std::string> Fwd, Bwd;
  for (std::size_t I = 0; I < Before.size(); ++I) {
    auto [F, FNew] = Fwd.emplace(Before[I], After[I]);
    ASSERT_EQ(F->second, After[I]) << Before[I];
    auto [B, BNew] = Bwd.emplace(After[I], Before[I]);
    ASSERT_EQ(B->second, Before[I]) << After[I];
  }
  EXPECT_EQ(nodeCensus(CU), nodeCensus(Anon));
  EXPECT_TRUE(validate(Anon).empty());
}

const char *TwoFunctions = "int sq(int v) { return v * v; }\n"
                           "int main() { int a; int b; scanf(\"%d\", &a);\n"
                           "  b = sq(a); printf(\"%d\", b); return 0; }\n";

} // namespace

TEST(Anonymize, NumbersByFirstOccurrence) {
  CompilationUnit CU = parseC(TwoFunctions);
  auto [Anon, Ledger] = anonymize(CU);
  EXPECT_EQ(Ledger.genericFor("sq", SymbolCategory::Function), "FUNC1");
  EXPECT_EQ(Ledger.genericFor("v", SymbolCategory::Variable), "VAR1");
  EXPECT_EQ(Ledger.genericFor("a", SymbolCategory::Variable), "VAR2");
  EXPECT_EQ(Ledger.genericFor("b", SymbolCategory::Variable), "VAR3");
  EXPECT_FALSE(Ledger.genericFor("main", SymbolCategory::Function));
  EXPECT_FALSE(Ledger.genericFor("printf", SymbolCategory::Function));
  std::string S = render(linearize(*Anon.root));
  EXPECT_NE(S.find("(LI_name(FUNC1)FUNC1)LI_name"), std::string::npos);
  EXPECT_NE(S.find("Var[VAR2]"), std::string::npos);
  EXPECT_NE(S.find("(LI_name(printf)printf)LI_name"), std::string::npos);
  EXPECT_EQ(S.find("Var[a]"), std::string::npos);
}

TEST(Anonymize, SkipsNamesAlreadyTaken) {
  CompilationUnit CU =
      parseC("int main() { int x; int VAR1; x = 1; VAR1 = 2; return x; }");
  auto [Anon, Ledger] = anonymize(CU);
  EXPECT_EQ(Ledger.genericFor("x", SymbolCategory::Variable), "VAR2");
  EXPECT_EQ(Ledger.genericFor("VAR1", SymbolCategory::Variable), "VAR3");
  EXPECT_TRUE(validate(Anon).empty());
}

TEST(Anonymize, LedgerJson) {
  auto [Anon, Ledger] = anonymize(parseC(TwoFunctions));
  OrderedJson J = ledgerToJson(Ledger);
  ASSERT_TRUE(J.is_array());
  ASSERT_EQ(J.size(), Ledger.pairs.size());
  EXPECT_EQ(J[0]["original"], "v");
  EXPECT_EQ(J[0]["generic"], "VAR1");
  EXPECT_EQ(J[0]["category"], "variable");
}

TEST(AnonymizeProperty, FixturesAndGeneratedPrograms) {
  for (const CompilationUnit &CU : fixtureUnits())
    checkAnonymization(CU);
  Rng G(606);
  for (int I = 0; I < 200; ++I)
    checkAnonymization(parseC(test::randomCProgram(G)));
}

TEST(Mapping, DefaultTableHasAllSourceTokens) {
  const TokenMapping &M = defaultMapping();
  EXPECT_EQ(M.entries().size(), 16u);
  std::set<std::string> Sources;
  for (const MappingEntry &E : M.entries())
    for (const std::string &S : E.sources)
      Sources.insert(S);
  for (const char *Tok :
       {"scanf", "printf", "strtok", ",", "=", "strlen", "strcat", "qsort",
        "fread", "stdin", "stdout", "lsearch", "bsearch", "statistical", "%",
        "round", "+", "memset"})
    EXPECT_TRUE(Sources.count(Tok)) << Tok;
}

TEST(Mapping, Lookup) {
  const TokenMapping &M = defaultMapping();
  EXPECT_EQ(M.lookup("scanf", MappingContext::CallName), "ACCEPT");
  EXPECT_EQ(M.lookup("strlen", MappingContext::CallName), "LENGTH OF");
  EXPECT_EQ(M.lookup("stdout", MappingContext::StreamName), "CONSOLE");
  EXPECT_FALSE(M.lookup("scanf", MappingContext::Operator));
  EXPECT_FALSE(M.lookup("+", MappingContext::Operator));
  EXPECT_FALSE(M.lookup("puts", MappingContext::CallName));
}

TEST(Mapping, ExportedTextParsesBack) {
  TokenMapping M = TokenMapping::parse(defaultMappingText());
  ASSERT_EQ(M.entries().size(), defaultMapping().entries().size());
  for (std::size_t I = 0; I < M.entries().size(); ++I) {
    EXPECT_EQ(M.entries()[I].sources, defaultMapping().entries()[I].sources);
    EXPECT_EQ(M.entries()[I].targets, defaultMapping().entries()[I].targets);
    EXPECT_EQ(M.entries()[I].active, defaultMapping().entries()[I].active);
  }
}

TEST(Mapping, ParseErrorsNameTheLine) {
  auto ExpectLine = [](const std::string &Text, const std::string &Line) {
    try {
      TokenMapping::parse(Text);
      FAIL() << Text;
    } catch (const MappingError &E) {
      EXPECT_NE(std::string(E.what()).find(Line), std::string::npos)
          << E.what();
    }
  };
  ExpectLine("# c\nscanf\tACCEPT\n", "2");
  ExpectLine("scanf\tACCEPT\tweird_context\n", "1");
  ExpectLine("scanf\tACCEPT\tcall_name\nscanf\tREAD\tcall_name\n", "2");
  ExpectLine("scanf\tACCEPT\tcall_name\tmaybe\n", "1");
  EXPECT_NO_THROW(TokenMapping::parse(
      "scanf\tACCEPT\tcall_name\nscanf\tACCEPT\tcall_name\n"));
}

TEST(Mapping, AppliesToCallsStreamsAndOperators) {
  CompilationUnit CU = parseC(
      "int main() { int x; scanf(\"%d\", &x); x = x % 3;\n"
      "  fflush(stdout); printf(\"%d\", x); return 0; }");
  CompilationUnit M = applyMapping(CU, defaultMapping());
  std::string S = render(linearize(*M.root));
  EXPECT_NE(S.find("(LI_name(ACCEPT)ACCEPT)LI_name"), std::string::npos) << S;
  EXPECT_NE(S.find("(LI_name(DISPLAY)DISPLAY)LI_name"), std::string::npos);
  EXPECT_NE(S.find("(Operator(REM)REM)Operator"), std::string::npos) << S;
  EXPECT_NE(S.find("(LI_param(CONSOLE)CONSOLE)LI_param"), std::string::npos)
      << S;
  EXPECT_NE(S.find("(Operator(=)=)Operator"), std::string::npos);
  EXPECT_TRUE(validate(M).empty());
}

TEST(Mapping, MergesIntoExistingSymbol) {
  CompilationUnit CU =
      parseC("int ACCEPT(int a) { return a; }\n"
             "int main() { int x; scanf(\"%d\", &x); x = ACCEPT(x);\n"
             "  return x; }");
  CompilationUnit M = applyMapping(CU, defaultMapping());
  int Count = 0;
  for (const Symbol &S : M.symbols)
    Count += S.name == "ACCEPT";
  EXPECT_EQ(Count, 1);
  EXPECT_TRUE(validate(M).empty());
}

TEST(Mapping, CobolAndEmptyMappingAreIdentity) {
  for (const CompilationUnit &CU : fixtureUnits()) {
    if (CU.language == Language::Cobol) {
      EXPECT_EQ(render(linearize(*applyMapping(CU, defaultMapping()).root)),
                render(linearize(*CU.root)));
    }
    EXPECT_EQ(render(linearize(*applyMapping(CU, TokenMapping()).root)),
              render(linearize(*CU.root)));
  }
}

TEST(MappingProperty, IdempotentOnFixtures) {
  for (const CompilationUnit &CU : fixtureUnits()) {
    CompilationUnit Once = applyMapping(CU, defaultMapping());
    CompilationUnit Twice = applyMapping(Once, defaultMapping());
    EXPECT_EQ(render(linearize(*Once.root)), render(linearize(*Twice.root)))
        << CU.sourceId;
    EXPECT_EQ(Once.symbols, Twice.symbols) << CU.sourceId;
  }
}

TEST(Normalize, AnonymizeThenMap) {
  CompilationUnit CU = parseC(TwoFunctions);
  NormalizeOptions O;
  O.anonymize = true;
  O.mapping = &defaultMapping();
  RenameLedger L;
  CompilationUnit N = normalizeUnit(CU, O, &L);
  std::string S = render(linearize(*N.root));
  EXPECT_NE(S.find("(LI_name(ACCEPT)ACCEPT)LI_name"), std::string::npos);
  EXPECT_NE(S.find("(LI_name(FUNC1)FUNC1)LI_name"), std::string::npos);
  EXPECT_FALSE(L.pairs.empty());
}
