//===--- frontend.h - C and COBOL front-ends --------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Recursive-descent front-ends that lower a C or COBOL subset onto the
/// shared IR. Neither front-end recovers from errors: the first problem
/// produces a single diagnostic and no unit.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_FRONTEND_H
#define IRCLONE_FRONTEND_H

#include "irclone/ir.h"
#include "irclone/ir_json.h"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace irclone {

struct SourceFile {
  std::string path;
  std::string text;
  /// Submission verdict from the corpus; the parsers ignore it.
  bool accepted = true;
};

enum class Severity { Error, Unsupported };

std::string_view severityName(Severity S);

struct ParseDiagnostic {
  unsigned line = 1; ///< 1-based
  unsigned column = 1; ///< 1-based
  std::string message;
  Severity severity = Severity::Error;
};

struct ParseResult {
  std::optional<CompilationUnit> unit;
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return unit.has_value(); }
};

ParseResult parseC(const SourceFile &Src);
ParseResult parseCobol(const SourceFile &Src);

/// Dispatches on language.
ParseResult parseSource(const SourceFile &Src, Language Lang);

/// Guesses the language from the file extension (.c, .cob/.cbl/.cobol).
std::optional<Language> languageFromPath(const std::filesystem::path &P);

/// File stem, used as the unit's source_id.
std::string sourceIdFromPath(const std::string &Path);

OrderedJson diagnosticsToJson(const std::string &Path,
                              const std::vector<ParseDiagnostic> &Diags);

/// "path:line:col: severity: message"
std::string formatDiagnostic(const std::string &Path,
                             const ParseDiagnostic &D);

namespace detail {

/// Maps a byte offset to a 1-based line/column that lies inside the text.
struct LineMap {
  explicit LineMap(const std::string &Text);
  std::pair<unsigned, unsigned> locate(std::size_t Offset) const;

private:
  std::vector<std::size_t> Starts;
  std::size_t Size;
};

} // namespace detail

} // namespace irclone

#endif // IRCLONE_FRONTEND_H
