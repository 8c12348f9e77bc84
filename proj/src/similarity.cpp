//===--- similarity.cpp - Embedding backends and ranking --------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/similarity.h"
#include "irclone/support.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <unordered_map>

#include <sys/wait.h>
#include <unistd.h>

namespace irclone {

//===----------------------------------------------------------------------===//
// Sparse vectors
//===----------------------------------------------------------------------===//

double SparseVector::norm() const {
  double S = 0;
  for (const auto &[Dim, W] : entries)
    S += W * W;
  return std::sqrt(S);
}

void SparseVector::canonicalize() {
  std::sort(entries.begin(), entries.end(),
            [](const auto &A, const auto &B) { return A.first < B.first; });
  std::vector<std::pair<std::uint64_t, double>> Merged;
  for (const auto &E : entries) {
    if (!Merged.empty() && Merged.back().first == E.first)
      Merged.back().second += E.second;
    else
      Merged.push_back(E);
  }
  std::erase_if(Merged, [](const auto &E) { return E.second == 0.0; });
  entries = std::move(Merged);
}

void SparseVector::normalize() {
  double N = norm();
  if (N == 0.0)
    return;
  for (auto &E : entries)
    E.second /= N;
}

double cosine(const SparseVector &A, const SparseVector &B) {
  double NA = A.norm(), NB = B.norm();
  if (NA == 0.0 || NB == 0.0)
    return 0.0;
  double Dot = 0;
  auto I = A.entries.begin(), J = B.entries.begin();
  while (I != A.entries.end() && J != B.entries.end()) {
    if (I->first < J->first) {
      ++I;
    } else if (J->first < I->first) {
      ++J;
    } else {
      Dot += I->second * J->second;
      ++I;
      ++J;
    }
  }
  return Dot / (NA * NB);
}

//===----------------------------------------------------------------------===//
// TF-IDF
//===----------------------------------------------------------------------===//

namespace {

std::string termOf(const SbtToken &T) {
  switch (T.kind) {
  case SbtTokenKind::Open:
    return "(" + T.text;
  case SbtTokenKind::Close:
    return ")" + T.text;
  case SbtTokenKind::Leaf:
    return T.text;
  }
  return T.text;
}

} // namespace

std::vector<Embedding> embedTfidf(const std::vector<SbtSequence> &Corpus) {
  std::vector<std::map<std::string, double>> Tf(Corpus.size());
  std::map<std::string, std::size_t> Df;
  for (std::size_t D = 0; D < Corpus.size(); ++D) {
    for (const SbtToken &T : Corpus[D].tokens)
      Tf[D][termOf(T)] += 1.0;
    for (const auto &[Term, Count] : Tf[D])
      ++Df[Term];
  }
  std::map<std::string, std::uint64_t> Dim;
  for (const auto &[Term, Count] : Df)
    Dim.emplace(Term, Dim.size());

  double N = static_cast<double>(Corpus.size());
  std::vector<Embedding> Out;
  Out.reserve(Corpus.size());
  for (std::size_t D = 0; D < Corpus.size(); ++D) {
    Embedding E{Corpus[D].sourceId, {}};
    for (const auto &[Term, Count] : Tf[D]) {
      double Idf =
          std::log((N + 1.0) / (static_cast<double>(Df[Term]) + 1.0)) + 1.0;
      E.vector.entries.push_back({Dim[Term], Count * Idf});
    }
    E.vector.canonicalize();
    E.vector.normalize();
    Out.push_back(std::move(E));
  }
  return Out;
}

//===----------------------------------------------------------------------===//
// Subtree hashing
//===----------------------------------------------------------------------===//

std::string subtreeSignature(const AstNode &N, unsigned Depth) {
  if (N.isLeaf())
    return "(" + std::string(kindName(N.kind())) + ":" + N.value() + ")";
  std::string S = "(" + std::string(kindName(N.kind()));
  if (Depth > 1) {
    for (const Edge &E : N.children()) {
      S += '[';
      S += roleName(E.role);
      S += subtreeSignature(*E.node, Depth - 1);
      S += ']';
    }
  }
  S += ')';
  return S;
}

std::uint64_t subtreeDimension(std::string_view Signature) {
  return fnv1a64(Signature) & ((std::uint64_t(1) << 53) - 1);
}

namespace {

/// Returns the height of `N`; appends its signatures to `Out`.
unsigned collectSubtrees(const AstNode &N, unsigned Depth,
                         SparseVector &Out) {
  unsigned Height = 1;
  for (const Edge &E : N.children())
    Height = std::max(Height, 1 + collectSubtrees(*E.node, Depth, Out));
  for (unsigned K = 1; K <= std::min(Depth, Height); ++K)
    Out.entries.push_back({subtreeDimension(subtreeSignature(N, K)), 1.0});
  return Height;
}

} // namespace

SparseVector embedSubtreeHash(const AstNode &Root, unsigned Depth) {
  if (Depth == 0)
    throw std::invalid_argument("subtree depth must be at least 1");
  SparseVector V;
  collectSubtrees(Root, Depth, V);
  V.canonicalize();
  V.normalize();
  return V;
}

//===----------------------------------------------------------------------===//
// Ranking
//===----------------------------------------------------------------------===//

RankResult rank(const std::string &QueryId, const SparseVector &Query,
                const std::vector<Embedding> &Gallery, std::size_t R) {
  RankResult Result;
  Result.items.reserve(Gallery.size());
  for (const Embedding &E : Gallery)
    if (E.id != QueryId)
      Result.items.push_back({E.id, cosine(Query, E.vector)});
  auto Before = [](const RankedItem &A, const RankedItem &B) {
    if (A.score != B.score)
      return A.score > B.score;
    return A.id < B.id;
  };
  if (R >= Result.items.size()) {
    Result.truncated = R > Result.items.size();
    std::sort(Result.items.begin(), Result.items.end(), Before);
    return Result;
  }
  std::partial_sort(Result.items.begin(),
                    Result.items.begin() + static_cast<std::ptrdiff_t>(R),
                    Result.items.end(), Before);
  Result.items.resize(R);
  return Result;
}

//===----------------------------------------------------------------------===//
// External backend
//===----------------------------------------------------------------------===//

namespace {

std::string lineError(std::size_t Line, const std::string &Message) {
  return "response line " + std::to_string(Line) + ": " + Message;
}

class TempDir {
public:
  TempDir() {
    std::string Pattern =
        (std::filesystem::temp_directory_path() / "irclone-XXXXXX").string();
    if (!::mkdtemp(Pattern.data()))
      throw ProtocolError("cannot create a temporary directory");
    Path = Pattern;
  }
  ~TempDir() {
    std::error_code EC;
    std::filesystem::remove_all(Path, EC);
  }
  const std::filesystem::path &path() const { return Path; }

private:
  std::filesystem::path Path;
};

std::string shellQuote(const std::string &S) {
  std::string Out = "'";
  for (char C : S) {
    if (C == '\'')
      Out += "'\\''";
    else
      Out += C;
  }
  return Out + "'";
}

} // namespace

std::vector<Embedding>
parseExternalResponse(std::string_view Response,
                      const std::vector<std::string> &RequestedIds) {
  std::set<std::string, std::less<>> Wanted(RequestedIds.begin(),
                                            RequestedIds.end());
  std::unordered_map<std::string, Embedding> Got;
  std::optional<std::size_t> Dim;
  std::size_t LineNo = 0, Begin = 0;
  while (Begin < Response.size()) {
    std::size_t End = Response.find('\n', Begin);
    if (End == std::string_view::npos)
      End = Response.size();
    ++LineNo;
    std::string_view Line = Response.substr(Begin, End - Begin);
    Begin = End + 1;
    if (Line.find_first_not_of(" \t\r") == std::string_view::npos)
      continue;
    OrderedJson J;
    try {
      J = OrderedJson::parse(Line);
    } catch (const nlohmann::json::exception &) {
      throw ProtocolError(lineError(LineNo, "malformed JSON"));
    }
    if (!J.is_object() || !J.contains("id") || !J["id"].is_string())
      throw ProtocolError(lineError(LineNo, "missing string 'id'"));
    if (!J.contains("vector") || !J["vector"].is_array())
      throw ProtocolError(lineError(LineNo, "missing array 'vector'"));
    std::string Id = J["id"].get<std::string>();
    if (!Wanted.count(Id))
      throw ProtocolError(lineError(LineNo, "unknown id '" + Id + "'"));
    if (Got.count(Id))
      throw ProtocolError(lineError(LineNo, "duplicate id '" + Id + "'"));
    const OrderedJson &V = J["vector"];
    if (Dim && V.size() != *Dim)
      throw ProtocolError(lineError(
          LineNo, "dimension " + std::to_string(V.size()) +
                      " differs from " + std::to_string(*Dim)));
    Dim = V.size();
    Embedding E{Id, {}};
    for (std::size_t I = 0; I < V.size(); ++I) {
      if (!V[I].is_number())
        throw ProtocolError(lineError(LineNo, "non-numeric vector entry"));
      double W = V[I].get<double>();
      if (!std::isfinite(W))
        throw ProtocolError(lineError(LineNo, "non-finite vector entry"));
      E.vector.entries.push_back({I, W});
    }
    E.vector.canonicalize();
    Got.emplace(Id, std::move(E));
  }
  std::vector<std::string> Missing;
  for (const std::string &Id : RequestedIds)
    if (!Got.count(Id))
      Missing.push_back(Id);
  if (!Missing.empty()) {
    std::string List;
    for (std::size_t I = 0; I < Missing.size() && I < 10; ++I)
      List += (I ? ", " : "") + Missing[I];
    if (Missing.size() > 10)
      List += ", ...";
    throw ProtocolError("backend returned no vector for " +
                        std::to_string(Missing.size()) + " id(s): " + List);
  }
  std::vector<Embedding> Out;
  Out.reserve(RequestedIds.size());
  for (const std::string &Id : RequestedIds)
    Out.push_back(std::move(Got.at(Id)));
  return Out;
}

std::vector<Embedding> embedExternal(const std::string &Command,
                                     const std::vector<SbtSequence> &Seqs) {
  TempDir Dir;
  std::filesystem::path Req = Dir.path() / "request.jsonl";
  std::filesystem::path Resp = Dir.path() / "response.jsonl";
  std::string Body;
  std::vector<std::string> Ids;
  for (const SbtSequence &S : Seqs) {
    Body += sequenceToJson(S).dump();
    Body += '\n';
    Ids.push_back(S.sourceId);
  }
  writeFileAtomic(Req, Body);
  std::string Shell = "( " + Command + " ) < " + shellQuote(Req.string()) +
                      " > " + shellQuote(Resp.string());
  int Status = std::system(Shell.c_str());
  if (Status == -1)
    throw ProtocolError("cannot start backend command");
  if (!WIFEXITED(Status) || WEXITSTATUS(Status) != 0)
    throw ProtocolError("backend command failed with status " +
                        std::to_string(WIFEXITED(Status) ? WEXITSTATUS(Status)
                                                         : Status));
  return parseExternalResponse(readFile(Resp), Ids);
}

//===----------------------------------------------------------------------===//
// Embedding files
//===----------------------------------------------------------------------===//

std::string embeddingsToJsonl(const std::vector<Embedding> &E) {
  std::string Out;
  for (const Embedding &Emb : E) {
    OrderedJson J;
    J["id"] = Emb.id;
    OrderedJson Sparse = OrderedJson::array();
    for (const auto &[Dim, W] : Emb.vector.entries)
      Sparse.push_back(OrderedJson::array({Dim, W}));
    J["sparse"] = std::move(Sparse);
    Out += J.dump();
    Out += '\n';
  }
  return Out;
}

std::vector<Embedding> embeddingsFromJsonl(std::string_view Text) {
  std::vector<Embedding> Out;
  std::size_t LineNo = 0, Begin = 0;
  auto Fail = [&](const std::string &Message) {
    throw std::runtime_error("embedding line " + std::to_string(LineNo) +
                             ": " + Message);
  };
  while (Begin < Text.size()) {
    std::size_t End = Text.find('\n', Begin);
    if (End == std::string_view::npos)
      End = Text.size();
    ++LineNo;
    std::string_view Line = Text.substr(Begin, End - Begin);
    Begin = End + 1;
    if (Line.find_first_not_of(" \t\r") == std::string_view::npos)
      continue;
    OrderedJson J;
    try {
      J = OrderedJson::parse(Line);
    } catch (const nlohmann::json::exception &) {
      Fail("malformed JSON");
    }
    if (!J.is_object() || !J.contains("id") || !J["id"].is_string())
      Fail("missing string 'id'");
    Embedding E{J["id"].get<std::string>(), {}};
    try {
      if (J.contains("sparse")) {
        for (const OrderedJson &P : J["sparse"]) {
          if (!P.is_array() || P.size() != 2)
            Fail("sparse entries must be [dim, weight]");
          E.vector.entries.push_back(
              {P[0].get<std::uint64_t>(), P[1].get<double>()});
        }
      } else if (J.contains("vector")) {
        const OrderedJson &V = J["vector"];
        for (std::size_t I = 0; I < V.size(); ++I)
          E.vector.entries.push_back({I, V[I].get<double>()});
      } else {
        Fail("needs 'sparse' or 'vector'");
      }
    } catch (const nlohmann::json::exception &) {
      Fail("malformed vector");
    }
    for (const auto &[Dim, W] : E.vector.entries)
      if (!std::isfinite(W))
        Fail("non-finite weight");
    E.vector.canonicalize();
    Out.push_back(std::move(E));
  }
  return Out;
}

} // namespace irclone
