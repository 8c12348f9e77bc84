//===--- eval.cpp - MAP@R evaluation ----------------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/eval.h"
#include "irclone/support.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace irclone {

void parallelFor(std::size_t N, unsigned Jobs,
                 const std::function<void(std::size_t)> &Fn) {
  Jobs = std::max(1u, Jobs);
  if (Jobs == 1 || N < 2) {
    for (std::size_t I = 0; I < N; ++I)
      Fn(I);
    return;
  }
  std::atomic<std::size_t> Next{0};
  std::exception_ptr Error;
  std::mutex ErrorMutex;
  auto Worker = [&] {
    while (true) {
      std::size_t I = Next++;
      if (I >= N)
        return;
      try {
        Fn(I);
      } catch (...) {
        std::lock_guard<std::mutex> Lock(ErrorMutex);
        if (!Error)
          Error = std::current_exception();
        Next = N;
      }
    }
  };
  std::vector<std::thread> Threads;
  for (unsigned T = 0; T < std::min<std::size_t>(Jobs, N); ++T)
    Threads.emplace_back(Worker);
  for (std::thread &T : Threads)
    T.join();
  if (Error)
    std::rethrow_exception(Error);
}

double averagePrecisionAtR(const std::vector<bool> &Relevant, std::size_t R) {
  if (R == 0)
    throw EvalError("R must be at least 1");
  double Sum = 0;
  std::size_t Hits = 0;
  for (std::size_t I = 0; I < R && I < Relevant.size(); ++I) {
    if (!Relevant[I])
      continue;
    ++Hits;
    Sum += static_cast<double>(Hits) / static_cast<double>(I + 1);
  }
  return Sum / static_cast<double>(R);
}

MapReport mapAtR(const std::vector<QueryRanking> &Rankings,
                 const std::map<std::string, std::string> &Labels,
                 std::size_t R) {
  if (R == 0)
    throw EvalError("R must be at least 1");
  std::map<std::string, std::size_t> PdSize;
  for (const auto &[Id, Pd] : Labels)
    ++PdSize[Pd];

  MapReport Report;
  Report.R = R;
  double Sum = 0;
  for (const QueryRanking &Q : Rankings) {
    auto QL = Labels.find(Q.query);
    if (QL == Labels.end())
      throw EvalError("query '" + Q.query + "' has no label");
    std::size_t Relevant = PdSize[QL->second] - 1;
    if (Relevant != R)
      throw EvalError("query '" + Q.query + "' has " +
                      std::to_string(Relevant) +
                      " relevant gallery items, expected R=" +
                      std::to_string(R));
    std::vector<bool> Rel;
    std::set<std::string_view> Seen;
    for (std::size_t I = 0; I < Q.ranked.size() && I < R; ++I) {
      const std::string &Id = Q.ranked[I];
      if (Id == Q.query)
        throw EvalError("ranking for '" + Q.query + "' contains the query");
      if (!Seen.insert(Id).second)
        throw EvalError("ranking for '" + Q.query + "' repeats '" + Id + "'");
      auto L = Labels.find(Id);
      if (L == Labels.end())
        throw EvalError("ranked id '" + Id + "' has no label");
      Rel.push_back(L->second == QL->second);
    }
    double Ap = averagePrecisionAtR(Rel, R);
    Report.perQuery.push_back({Q.query, Ap});
    Sum += Ap;
  }
  if (!Rankings.empty())
    Report.map = 100.0 * Sum / static_cast<double>(Rankings.size());
  return Report;
}

RandomMapResult randomMap(std::size_t NumPds, std::size_t CodesPerPd,
                          std::size_t R, std::size_t Trials,
                          std::uint64_t Seed, unsigned Jobs) {
  if (CodesPerPd != R + 1)
    throw EvalError("codes per PD must equal R + 1");
  if (R == 0 || Trials == 0 || NumPds == 0)
    throw EvalError("R, trials and PD count must be positive");
  std::size_t N = NumPds * CodesPerPd;
  std::size_t Gallery = N - 1;
  std::vector<double> PerTrial(Trials);
  parallelFor(Trials, Jobs, [&](std::size_t T) {
    Rng G(deriveSeed(Seed, T));
    double Sum = 0;
    for (std::size_t Q = 0; Q < N; ++Q) {
      // The top R of a uniform permutation, drawn sequentially without
      // replacement: only relevance matters, not which item was drawn.
      std::size_t RelLeft = R, Left = Gallery, Hits = 0;
      double Ap = 0;
      for (std::size_t I = 0; I < R && RelLeft > 0; ++I) {
        if (G.below(Left) < RelLeft) {
          --RelLeft;
          ++Hits;
          Ap += static_cast<double>(Hits) / static_cast<double>(I + 1);
        }
        --Left;
      }
      Sum += Ap / static_cast<double>(R);
    }
    PerTrial[T] = 100.0 * Sum / static_cast<double>(N);
  });
  RandomMapResult Result;
  Result.trials = Trials;
  double Sum = 0;
  for (double V : PerTrial)
    Sum += V;
  Result.mean = Sum / static_cast<double>(Trials);
  if (Trials > 1) {
    double Sq = 0;
    for (double V : PerTrial)
      Sq += (V - Result.mean) * (V - Result.mean);
    Result.stdErr = std::sqrt(Sq / static_cast<double>(Trials - 1)) /
                    std::sqrt(static_cast<double>(Trials));
  }
  return Result;
}

double expectedRandomMap(std::size_t NumPds, std::size_t CodesPerPd,
                         std::size_t R) {
  double M = static_cast<double>(NumPds * CodesPerPd - 1);
  double Rel = static_cast<double>(CodesPerPd - 1);
  // E[rel(i) * hits(i)] = P(rel i) * (1 + E[hits before i | rel i]).
  double Sum = 0;
  for (std::size_t I = 1; I <= R; ++I) {
    double Before = M > 1 ? static_cast<double>(I - 1) * (Rel - 1) / (M - 1)
                          : 0.0;
    Sum += (Rel / M) * (1.0 + Before) / static_cast<double>(I);
  }
  return 100.0 * Sum / static_cast<double>(R);
}

MapReport evaluate(const std::vector<LabeledItem> &Split,
                   const std::vector<Embedding> &Embeddings,
                   std::optional<std::size_t> R, unsigned Jobs) {
  std::map<std::string, std::string> Labels;
  std::map<std::string, std::size_t> PdSize;
  for (const LabeledItem &It : Split) {
    if (!Labels.emplace(It.id, It.pd).second)
      throw EvalError("id '" + It.id + "' appears twice in the split");
    ++PdSize[It.pd];
  }
  if (!R) {
    std::set<std::size_t> Sizes;
    for (const auto &[Pd, N] : PdSize)
      Sizes.insert(N);
    if (Sizes.size() != 1 || *Sizes.begin() < 2)
      throw EvalError("split does not have a uniform number (>= 2) of codes "
                      "per PD; pass R explicitly");
    R = *Sizes.begin() - 1;
  }

  std::map<std::string, const Embedding *> ById;
  for (const Embedding &E : Embeddings)
    ById.emplace(E.id, &E);
  std::vector<std::string> Missing;
  std::vector<Embedding> Gallery;
  for (const LabeledItem &It : Split) {
    auto Found = ById.find(It.id);
    if (Found == ById.end())
      Missing.push_back(It.id);
    else
      Gallery.push_back(*Found->second);
  }
  if (!Missing.empty()) {
    std::string List;
    for (const std::string &Id : Missing)
      List += (List.empty() ? "" : ", ") + Id;
    throw EvalError("missing embeddings for " +
                    std::to_string(Missing.size()) + " id(s): " + List);
  }

  std::vector<QueryRanking> Rankings(Gallery.size());
  parallelFor(Gallery.size(), Jobs, [&](std::size_t I) {
    RankResult Ranked = rank(Gallery[I].id, Gallery[I].vector, Gallery, *R);
    Rankings[I].query = Gallery[I].id;
    for (const RankedItem &It : Ranked.items)
      Rankings[I].ranked.push_back(It.id);
  });
  return mapAtR(Rankings, Labels, *R);
}

OrderedJson reportToJson(const MapReport &Report) {
  OrderedJson J;
  J["map"] = Report.map;
  J["R"] = Report.R;
  J["n_queries"] = Report.numQueries();
  OrderedJson Per = OrderedJson::array();
  for (const QueryAp &Q : Report.perQuery) {
    OrderedJson E;
    E["id"] = Q.id;
    E["ap"] = Q.ap;
    Per.push_back(std::move(E));
  }
  J["per_query"] = std::move(Per);
  J["config"] = Report.config;
  return J;
}

std::string reportSummary(const MapReport &Report) {
  char Buf[128];
  std::snprintf(Buf, sizeof(Buf), "MAP@R=%zu %.2f over %zu queries", Report.R,
                Report.map, Report.numQueries());
  return Buf;
}

} // namespace irclone
