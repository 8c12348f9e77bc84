//===--- similarity.h - Embedding backends and ranking ----------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Sparse embeddings for linearized programs and cosine ranking.
///
/// Two deterministic backends are built in: TF-IDF over SBT tokens, and a
/// bag of hashed depth-bounded subtrees. A third backend delegates to an
/// external command speaking a JSONL protocol.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_SIMILARITY_H
#define IRCLONE_SIMILARITY_H

#include "irclone/ir.h"
#include "irclone/ir_json.h"
#include "irclone/sbt.h"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace irclone {

/// Sorted by dimension, no duplicate dimensions.
struct SparseVector {
  std::vector<std::pair<std::uint64_t, double>> entries;

  double norm() const;
  bool isZero() const { return norm() == 0.0; }
  /// Sorts, merges duplicate dimensions and drops zero weights.
  void canonicalize();
  void normalize();
};

struct Embedding {
  std::string id;
  SparseVector vector;
};

double cosine(const SparseVector &A, const SparseVector &B);

/// Term weight tf * (ln((N + 1) / (df + 1)) + 1); terms are the rendered
/// tokens "(name", ")name" and leaf values, and dimensions index the sorted
/// corpus vocabulary.
std::vector<Embedding> embedTfidf(const std::vector<SbtSequence> &Corpus);

/// Canonical text of `N` cut off below `Depth` levels.
std::string subtreeSignature(const AstNode &N, unsigned Depth);

/// Hash of a signature, reduced to 53 bits so it survives JSON doubles.
std::uint64_t subtreeDimension(std::string_view Signature);

/// Counts every subtree signature of depth 1..d rooted at every node, once
/// per distinct depth; L2-normalized.
SparseVector embedSubtreeHash(const AstNode &Root, unsigned Depth);

struct RankedItem {
  std::string id;
  double score;
};

struct RankResult {
  std::vector<RankedItem> items;
  /// Set when R exceeded the gallery size; `items` then holds everything.
  bool truncated = false;
};

/// Top `R` gallery entries by cosine with `Query`, ties by ascending id.
/// Gallery entries whose id equals `QueryId` are skipped.
RankResult rank(const std::string &QueryId, const SparseVector &Query,
                const std::vector<Embedding> &Gallery, std::size_t R);

class ProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Runs `Command` through /bin/sh with request JSONL on standard input and
/// reads response JSONL {"id", "vector"} from standard output. Throws
/// ProtocolError on a failed backend, malformed or non-finite lines, ragged
/// dimensions, or missing, duplicate or unknown ids.
std::vector<Embedding> embedExternal(const std::string &Command,
                                     const std::vector<SbtSequence> &Seqs);

/// Validates a response stream against the requested ids.
std::vector<Embedding>
parseExternalResponse(std::string_view Response,
                      const std::vector<std::string> &RequestedIds);

/// Embedding JSONL: sparse vectors as {"id", "sparse": [[dim, w], ...]}.
std::string embeddingsToJsonl(const std::vector<Embedding> &E);
/// Reads both the sparse and the dense {"id", "vector": [...]} forms.
std::vector<Embedding> embeddingsFromJsonl(std::string_view Text);

} // namespace irclone

#endif // IRCLONE_SIMILARITY_H
