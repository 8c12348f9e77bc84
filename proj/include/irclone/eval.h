//===--- eval.h - MAP@R evaluation ------------------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Mean average precision at R for clone retrieval, where every query has
/// exactly R relevant items (the other members of its problem description),
/// and a Monte-Carlo estimate of the score under random rankings.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_EVAL_H
#define IRCLONE_EVAL_H

#include "irclone/ir_json.h"
#include "irclone/similarity.h"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace irclone {

class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// AP@R for one ranked relevance list; entries past position R are ignored
/// and missing entries count as irrelevant.
double averagePrecisionAtR(const std::vector<bool> &Relevant, std::size_t R);

struct QueryRanking {
  std::string query;
  /// Gallery ids in rank order, query excluded. Only the first R are read.
  std::vector<std::string> ranked;
};

struct QueryAp {
  std::string id;
  double ap;
};

struct MapReport {
  /// Percentage: mean AP times 100.
  double map = 0;
  std::size_t R = 0;
  std::vector<QueryAp> perQuery;
  OrderedJson config = OrderedJson::object();

  std::size_t numQueries() const { return perQuery.size(); }
};

/// `Labels` maps every gallery id to its problem description. Throws
/// EvalError when a query does not have exactly R relevant gallery items,
/// when a ranking names an unlabelled id, or when it contains the query.
MapReport mapAtR(const std::vector<QueryRanking> &Rankings,
                 const std::map<std::string, std::string> &Labels,
                 std::size_t R);

struct RandomMapResult {
  double mean = 0;   ///< percentage
  double stdErr = 0; ///< percentage
  std::size_t trials = 0;
};

/// MAP@R of uniformly random rankings over `NumPds` x `CodesPerPd` codes,
/// averaged over `Trials` independent trials. Trial t draws from its own
/// stream derived from `Seed`, so the result does not depend on `Jobs`.
RandomMapResult randomMap(std::size_t NumPds, std::size_t CodesPerPd,
                          std::size_t R, std::size_t Trials,
                          std::uint64_t Seed, unsigned Jobs = 1);

/// Closed-form expectation of randomMap, as a percentage.
double expectedRandomMap(std::size_t NumPds, std::size_t CodesPerPd,
                         std::size_t R);

struct LabeledItem {
  std::string pd;
  std::string id;
};

/// Ranks every item against the others and scores the result. R defaults to
/// the uniform codes-per-PD minus one. Throws EvalError listing ids without
/// embeddings.
MapReport evaluate(const std::vector<LabeledItem> &Split,
                   const std::vector<Embedding> &Embeddings,
                   std::optional<std::size_t> R = std::nullopt,
                   unsigned Jobs = 1);

OrderedJson reportToJson(const MapReport &Report);
/// "MAP@R=<r> <map> over <n> queries"
std::string reportSummary(const MapReport &Report);

/// Runs `Fn(I)` for I in [0, N) on up to `Jobs` threads.
void parallelFor(std::size_t N, unsigned Jobs,
                 const std::function<void(std::size_t)> &Fn);

} // namespace irclone

#endif // IRCLONE_EVAL_H
