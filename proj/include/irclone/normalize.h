//===--- normalize.h - Identifier anonymization and token mapping -*- C++ -*-=//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Semantics-preserving rewrites applied to compilation units before
/// linearization: renaming user identifiers to VARn/FUNCn, and substituting
/// C library and operator tokens with their COBOL counterparts.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_NORMALIZE_H
#define IRCLONE_NORMALIZE_H

#include "irclone/ir.h"
#include "irclone/ir_json.h"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace irclone {

//===----------------------------------------------------------------------===//
// Anonymization
//===----------------------------------------------------------------------===//

struct RenamePair {
  std::string original;
  std::string generic;
  SymbolCategory category;

  friend bool operator==(const RenamePair &, const RenamePair &) = default;
};

struct RenameLedger {
  std::vector<RenamePair> pairs;

  std::optional<std::string> genericFor(std::string_view Original,
                                        SymbolCategory Category) const;
};

/// Library routines, COBOL verbs and intrinsics that anonymize never renames.
bool isLibraryFunction(std::string_view Name);

/// Renames every user variable and user function (other than main). Numbers
/// are assigned in depth-first order of first occurrence in the tree, then
/// in symbol-table order for symbols the tree never mentions. A generic name
/// that already exists in the table is skipped.
std::pair<CompilationUnit, RenameLedger> anonymize(const CompilationUnit &CU);

OrderedJson ledgerToJson(const RenameLedger &L);

//===----------------------------------------------------------------------===//
// Token mapping
//===----------------------------------------------------------------------===//

enum class MappingContext { CallName, Operator, Literal, StreamName };

std::string_view contextName(MappingContext C);
std::optional<MappingContext> contextFromName(std::string_view Name);

struct MappingEntry {
  /// Alternative spellings of the source token ("stdin|stdout").
  std::vector<std::string> sources;
  /// Targets; the first is canonical.
  std::vector<std::string> targets;
  MappingContext context = MappingContext::CallName;
  /// Inert rows are stored but never applied.
  bool active = true;
  unsigned line = 0;

  const std::string &canonical() const { return targets.front(); }
  /// Source column as written, alternatives joined with '|'.
  std::string sourceField() const;
};

class MappingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class TokenMapping {
public:
  TokenMapping() = default;

  /// Parses TSV text: source, target, context and an optional fourth column
  /// "active" or "inert". '#' starts a comment line.
  static TokenMapping parse(std::string_view Text);

  const std::vector<MappingEntry> &entries() const { return Entries; }
  bool empty() const { return Entries.empty(); }

  /// Canonical target for an active entry matching `Value` in `Context`.
  std::optional<std::string> lookup(std::string_view Value,
                                    MappingContext Context) const;

  /// Distinct source columns in file order.
  std::vector<std::string> sourceTokens() const;

private:
  std::vector<MappingEntry> Entries;
};

/// Text of the mapping shipped with the tool.
std::string_view defaultMappingText();
const TokenMapping &defaultMapping();
TokenMapping loadMapping(const std::filesystem::path &Path);

/// Substitutes mapped leaf values: call names at LI_name, operators at
/// Operator leaves (by name or by source spelling), stream names at leaves
/// directly under LI_param, and literals anywhere. Symbols that name mapped
/// calls are renamed, and merged when the target already exists.
CompilationUnit applyMapping(const CompilationUnit &CU, const TokenMapping &M);

struct NormalizeOptions {
  bool anonymize = false;
  /// Applied to C units only; null disables mapping.
  const TokenMapping *mapping = nullptr;
};

/// Anonymizes (when requested) and then maps. The ledger is filled when
/// anonymization runs.
CompilationUnit normalizeUnit(const CompilationUnit &CU,
                              const NormalizeOptions &Opts,
                              RenameLedger *Ledger = nullptr);

} // namespace irclone

#endif // IRCLONE_NORMALIZE_H
