//===--- dataset.h - Corpus ingestion, splits and pairs ---------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// CodeNet-style corpus handling. A corpus root holds
///
///   data/<pd>/<language>/<source_id>.<ext>
///   problem_descriptions/<pd>.html
///   metadata/<pd>.csv          (submission_id, language, status)
///
/// Splits are built so that no problem description used by a COBOL test
/// leaks into C training or validation data.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_DATASET_H
#define IRCLONE_DATASET_H

#include "irclone/ir.h"
#include "irclone/ir_json.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace irclone {

class DatasetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when a split cannot be filled; the message names the shortfall.
class ShortfallError : public DatasetError {
public:
  using DatasetError::DatasetError;
};

struct Submission {
  std::string sourceId;
  Language language = Language::C;
  bool accepted = false;
  std::filesystem::path path;
};

struct ProblemDescription {
  std::string pdId;
  bool descriptionPresent = false;
  std::vector<Submission> submissions;
};

struct IngestResult {
  std::vector<ProblemDescription> pds; ///< sorted by pd id
  std::size_t unknownLanguageDirs = 0;
  /// Submissions whose verdict came from the parse fallback.
  std::size_t fallbackVerdicts = 0;
};

/// Scans a corpus root. Submissions without a metadata row are accepted iff
/// they parse. Throws DatasetError on unreadable metadata.
IngestResult ingest(const std::filesystem::path &Root, unsigned Jobs = 1);

struct FilterResult {
  std::vector<ProblemDescription> pds;
  std::size_t noDescription = 0;
  std::size_t noAccepted = 0;
  std::size_t singleCode = 0;
};

/// Keeps PDs that have a non-empty description, at least one accepted
/// submission in `Lang`, and at least two of them. Surviving PDs keep only
/// their accepted `Lang` submissions; order is preserved. Each removed PD is
/// counted under the first rule it fails.
FilterResult filterPds(const std::vector<ProblemDescription> &Pds,
                       Language Lang);

struct TestSplitSpec {
  std::string name;
  std::size_t codesPerPd = 2;
  std::optional<std::size_t> maxTokenLen;
  /// Sample exactly this many PDs; all eligible PDs when unset.
  std::optional<std::size_t> numPds;
  /// Minimum eligible codes a PD needs; defaults to codesPerPd.
  std::optional<std::size_t> minCodes;

  std::size_t R() const { return codesPerPd - 1; }
  std::size_t requiredCodes() const {
    return std::max(codesPerPd, minCodes.value_or(codesPerPd));
  }
};

struct SplitSpec {
  std::uint64_t seed = 0;
  double trainValRatio = 0.9;
  /// Adds length-limited Train-C-<n>/Val-C-<n> splits.
  std::optional<std::size_t> maxTokenLen;
  std::vector<TestSplitSpec> cobolTests;
  std::vector<TestSplitSpec> cTests;

  /// The published configuration: two COBOL tests (3 codes per PD; 2 codes
  /// per PD under 512 tokens) and two C tests (300 codes; 100 codes under
  /// 512 tokens), 90/10 train/validation.
  static SplitSpec defaults();
};

/// Throws DatasetError on invalid values.
void validateSpec(const SplitSpec &S);
OrderedJson specToJson(const SplitSpec &S);
/// Missing fields take their defaults() values.
SplitSpec specFromJson(const OrderedJson &J);

struct SplitEntry {
  std::string pd;
  std::string id;

  friend bool operator==(const SplitEntry &, const SplitEntry &) = default;
};

struct NamedSplit {
  std::string name;
  std::vector<SplitEntry> entries; ///< sorted by (pd, id)
  std::optional<std::size_t> R;    ///< tests only
  Language language = Language::C;
};

struct SplitSet {
  std::vector<NamedSplit> splits; ///< train/val first, then tests

  const NamedSplit *find(std::string_view Name) const;
};

/// SBT token count of a submission, or nullopt when it does not parse.
using TokenLengthFn = std::function<std::optional<std::size_t>(
    const Submission &)>;

/// Builds COBOL tests first, removes their PDs from C training data, splits
/// the remaining C PDs by ratio and draws C tests from the held-out PDs.
/// PDs are sorted before sampling, so the result depends only on the inputs
/// and the seed. Submissions for which `Lengths` returns nullopt are never
/// placed in a split. Throws ShortfallError when a test cannot be filled.
SplitSet makeSplits(const std::vector<ProblemDescription> &CPds,
                    const std::vector<ProblemDescription> &CobolPds,
                    const SplitSpec &Spec, const TokenLengthFn &Lengths);

OrderedJson manifestToJson(const SplitSet &S, const SplitSpec &Spec);
SplitSet manifestFromJson(const OrderedJson &J);

struct CodePair {
  std::string a;
  std::string b;
  int label = 0;
};

struct PairOptions {
  double negativesPerPositive = 1.0;
  std::optional<std::size_t> maxPositives;
  std::uint64_t seed = 0;
};

/// Every within-PD pair (or a sampled cap of them), then cross-PD negatives
/// sampled uniformly without replacement. Throws DatasetError when the split
/// has fewer than two PDs.
std::vector<CodePair> genPairs(const std::vector<SplitEntry> &Split,
                               const PairOptions &Opts);

std::string pairsToJsonl(const std::vector<CodePair> &Pairs);

} // namespace irclone

#endif // IRCLONE_DATASET_H
