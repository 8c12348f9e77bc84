//===--- similarity_test.cpp - Embedding and ranking tests ------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/frontend.h"
#include "irclone/similarity.h"
#include "test_util.h"

#include <gtest/gtest.h>

#include <cmath>

using namespace irclone;

namespace {

SparseVector sv(std::vector<std::pair<std::uint64_t, double>> E) {
  SparseVector V{std::move(E)};
  V.canonicalize();
  return V;
}

SbtSequence seq(const std::string &Id, std::vector<SbtToken> Tokens) {
  SbtSequence S;
  S.sourceId = Id;
  S.tokens = std::move(Tokens);
  return S;
}

NodePtr retTree(const std::string &V) {
  return AstNode::branch(
      NodeKind::Returnstmt,
      {{Role::ReturnExpr, AstNode::leaf(NodeKind::Literal, V)}});
}

std::filesystem::path writeScript(const std::filesystem::path &Dir,
                                  const std::string &Name,
                                  const std::string &Body) {
  auto P = Dir / Name;
  writeFileAtomic(P, "#!/bin/sh\n" + Body);
  std::filesystem::permissions(P, std::filesystem::perms::owner_all);
  return P;
}

} // namespace

TEST(SparseVector, CanonicalizeMergesAndDropsZeros) {
  SparseVector V = sv({{5, 1.0}, {2, 2.0}, {5, -1.0}, {3, 0.0}, {2, 1.0}});
  ASSERT_EQ(V.entries.size(), 1u);
  EXPECT_EQ(V.entries[0].first, 2u);
  EXPECT_DOUBLE_EQ(V.entries[0].second, 3.0);
}

TEST(Cosine, HandComputed) {
  SparseVector A = sv({{1, 1.0}, {2, 2.0}});
  SparseVector B = sv({{2, 3.0}, {5, 4.0}});
  EXPECT_NEAR(cosine(A, B), 6.0 / (std::sqrt(5.0) * 5.0), 1e-12);
  EXPECT_NEAR(cosine(A, A), 1.0, 1e-12);
  EXPECT_EQ(cosine(A, SparseVector{}), 0.0);
  EXPECT_EQ(cosine(sv({{1, 1.0}}), sv({{2, 1.0}})), 0.0);
}

TEST(Tfidf, HandComputedWeights) {
  std::vector<SbtSequence> Corpus = {
      seq("d1", {{SbtTokenKind::Open, "X"}, {SbtTokenKind::Close, "X"}}),
      seq("d2", {{SbtTokenKind::Open, "X"},
                 {SbtTokenKind::Leaf, "y"},
                 {SbtTokenKind::Leaf, "y"},
                 {SbtTokenKind::Close, "X"}})};
  auto E = embedTfidf(Corpus);
  ASSERT_EQ(E.size(), 2u);
  EXPECT_EQ(E[1].id, "d2");
  // Shared terms have idf 1; "y" has idf 1 + ln(3/2) and tf 2.
  double Y = 2.0 * (1.0 + std::log(1.5));
  double Norm = std::sqrt(2.0 + Y * Y);
  ASSERT_EQ(E[1].vector.entries.size(), 3u);
  EXPECT_NEAR(E[1].vector.entries[0].second, 1.0 / Norm, 1e-12);
  EXPECT_NEAR(E[1].vector.entries[1].second, 1.0 / Norm, 1e-12);
  EXPECT_NEAR(E[1].vector.entries[2].second, Y / Norm, 1e-12);
  EXPECT_NEAR(cosine(E[0].vector, E[1].vector), 2.0 / (std::sqrt(2.0) * Norm),
              1e-12);
}

TEST(SubtreeHash, Signatures) {
  NodePtr T = retTree("0");
  EXPECT_EQ(subtreeSignature(*T, 1), "(Returnstmt)");
  EXPECT_EQ(subtreeSignature(*T, 2),
            "(Returnstmt[return_expr(Literal:0)])");
  EXPECT_EQ(subtreeSignature(*T, 5), subtreeSignature(*T, 2));
}

TEST(SubtreeHash, OneEntryPerSubtreeAndDepth) {
  SparseVector V = embedSubtreeHash(*retTree("0"), 3);
  ASSERT_EQ(V.entries.size(), 3u);
  for (const auto &[Dim, W] : V.entries) {
    EXPECT_LT(Dim, std::uint64_t(1) << 53);
    EXPECT_NEAR(W, 1.0 / std::sqrt(3.0), 1e-12);
  }
  EXPECT_THROW(embedSubtreeHash(*retTree("0"), 0), std::invalid_argument);
}

TEST(SubtreeHash, SimilarProgramsScoreHigher) {
  auto Embed = [](const std::string &Src) {
    ParseResult R = parseC({"t.c", Src, true});
    EXPECT_TRUE(R.ok());
    return embedSubtreeHash(*R.unit->root, 3);
  };
  SparseVector A = Embed("int main(){int a,b; scanf(\"%d %d\",&a,&b);"
                         "printf(\"%d\",a+b); return 0;}");
  SparseVector B = Embed("int main(){int x,y; scanf(\"%d %d\",&x,&y);"
                         "printf(\"%d\",x+y); return 0;}");
  SparseVector C = Embed("int main(){int i,s; s=0; for(i=0;i<9;i++) s=s*i;"
                         " while(s>3) s=s/2; return s;}");
  EXPECT_GT(cosine(A, B), cosine(A, C));
  EXPECT_NEAR(cosine(A, A), 1.0, 1e-12);
}

TEST(Rank, TiesBrokenByIdAndQueryExcluded) {
  std::vector<Embedding> G = {{"q", sv({{1, 1.0}})},
                              {"b", sv({{1, 1.0}})},
                              {"a", sv({{1, 1.0}})},
                              {"c", sv({{2, 1.0}})},
                              {"d", sv({{1, 1.0}, {2, 1.0}})}};
  RankResult R = rank("q", G[0].vector, G, 3);
  ASSERT_EQ(R.items.size(), 3u);
  EXPECT_EQ(R.items[0].id, "a");
  EXPECT_EQ(R.items[1].id, "b");
  EXPECT_EQ(R.items[2].id, "d");
  EXPECT_FALSE(R.truncated);

  RankResult All = rank("q", G[0].vector, G, 10);
  EXPECT_TRUE(All.truncated);
  ASSERT_EQ(All.items.size(), 4u);
  EXPECT_EQ(All.items.back().id, "c");
}

TEST(Rank, ZeroVectorsRankByIdOnly) {
  std::vector<Embedding> G = {{"z", {}}, {"m", {}}, {"a", {}}};
  RankResult R = rank("m", {}, G, 2);
  ASSERT_EQ(R.items.size(), 2u);
  EXPECT_EQ(R.items[0].id, "a");
  EXPECT_EQ(R.items[1].id, "z");
}

TEST(EmbeddingFile, RoundTripAndDenseForm) {
  std::vector<Embedding> E = {{"a", sv({{3, 0.5}, {9, -0.25}})}, {"b", {}}};
  auto Back = embeddingsFromJsonl(embeddingsToJsonl(E));
  ASSERT_EQ(Back.size(), 2u);
  EXPECT_EQ(Back[0].vector.entries, E[0].vector.entries);
  EXPECT_TRUE(Back[1].vector.entries.empty());

  auto Dense = embeddingsFromJsonl("{\"id\":\"x\",\"vector\":[0,2,0]}\n");
  ASSERT_EQ(Dense[0].vector.entries.size(), 1u);
  EXPECT_EQ(Dense[0].vector.entries[0].first, 1u);
}

TEST(EmbeddingFile, ErrorsNameTheLine) {
  try {
    embeddingsFromJsonl("{\"id\":\"a\",\"sparse\":[]}\n{\"id\":\"b\"}\n");
    FAIL();
  } catch (const std::runtime_error &E) {
    EXPECT_NE(std::string(E.what()).find("line 2"), std::string::npos);
  }
}

TEST(ExternalProtocol, ResponseValidation) {
  std::vector<std::string> Ids = {"a", "b"};
  auto Ok = parseExternalResponse(
      "{\"id\":\"b\",\"vector\":[1,0]}\n{\"id\":\"a\",\"vector\":[0,1]}\n",
      Ids);
  ASSERT_EQ(Ok.size(), 2u);
  EXPECT_EQ(Ok[0].id, "a");

  auto ExpectError = [&](const std::string &Resp, const std::string &Part) {
    try {
      parseExternalResponse(Resp, Ids);
      FAIL() << Resp;
    } catch (const ProtocolError &E) {
      EXPECT_NE(std::string(E.what()).find(Part), std::string::npos)
          << E.what();
    }
  };
  ExpectError("{\"id\":\"a\",\"vector\":[1]}\nnot json\n", "line 2");
  ExpectError("{\"id\":\"a\",\"vector\":[1]}\n{\"id\":\"b\",\"vector\":[1,2]}",
              "dimension");
  ExpectError("{\"id\":\"c\",\"vector\":[1]}", "unknown id");
  ExpectError("{\"id\":\"a\",\"vector\":[1]}\n{\"id\":\"a\",\"vector\":[1]}",
              "duplicate");
  ExpectError("{\"id\":\"a\",\"vector\":[1]}\n", "b");
  ExpectError("{\"id\":\"a\",\"vector\":[\"x\"]}", "non-numeric");
  ExpectError("{\"vector\":[1]}", "id");
}

TEST(ExternalProtocol, StubCommand) {
  auto Dir = test::makeTempDir("stub");
  auto Zero = writeScript(
      Dir, "zero.sh",
      "sed -E 's/^\\{\"source_id\":\"([^\"]*)\".*/"
      "{\"id\":\"\\1\",\"vector\":[0,0,0]}/'\n");
  std::vector<SbtSequence> Seqs = {
      seq("p1", {{SbtTokenKind::Open, "CompUnit"},
                 {SbtTokenKind::Close, "CompUnit"}}),
      seq("p2", {{SbtTokenKind::Open, "CompUnit"},
                 {SbtTokenKind::Close, "CompUnit"}})};
  auto E = embedExternal(Zero.string(), Seqs);
  ASSERT_EQ(E.size(), 2u);
  EXPECT_EQ(E[1].id, "p2");
  EXPECT_TRUE(E[0].vector.isZero());

  auto Failing = writeScript(Dir, "fail.sh", "cat >/dev/null\nexit 7\n");
  EXPECT_THROW(embedExternal(Failing.string(), Seqs), ProtocolError);
  auto Short = writeScript(Dir, "short.sh",
                           "head -n 1 | sed -E 's/^\\{\"source_id\":"
                           "\"([^\"]*)\".*/{\"id\":\"\\1\",\"vector\":[1]}/'\n");
  EXPECT_THROW(embedExternal(Short.string(), Seqs), ProtocolError);
  std::filesystem::remove_all(Dir);
}
