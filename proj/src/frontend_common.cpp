//===--- frontend_common.cpp - Shared front-end plumbing --------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/frontend.h"

#include <algorithm>
#include <cctype>

namespace irclone {

std::string_view severityName(Severity S) {
  return S == Severity::Error ? "error" : "unsupported";
}

ParseResult parseSource(const SourceFile &Src, Language Lang) {
  return Lang == Language::C ? parseC(Src) : parseCobol(Src);
}

std::optional<Language> languageFromPath(const std::filesystem::path &P) {
  std::string Ext = P.extension().string();
  std::transform(Ext.begin(), Ext.end(), Ext.begin(),
                 [](unsigned char C) { return std::tolower(C); });
  if (Ext == ".c" || Ext == ".h")
    return Language::C;
  if (Ext == ".cob" || Ext == ".cbl" || Ext == ".cobol")
    return Language::Cobol;
  return std::nullopt;
}

std::string sourceIdFromPath(const std::string &Path) {
  return std::filesystem::path(Path).stem().string();
}

OrderedJson diagnosticsToJson(const std::string &Path,
                              const std::vector<ParseDiagnostic> &Diags) {
  OrderedJson Out = OrderedJson::array();
  for (const ParseDiagnostic &D : Diags) {
    OrderedJson J;
    J["path"] = Path;
    J["line"] = D.line;
    J["column"] = D.column;
    J["severity"] = std::string(severityName(D.severity));
    J["message"] = D.message;
    Out.push_back(std::move(J));
  }
  return Out;
}

std::string formatDiagnostic(const std::string &Path,
                             const ParseDiagnostic &D) {
  return Path + ":" + std::to_string(D.line) + ":" + std::to_string(D.column) +
         ": " + std::string(severityName(D.severity)) + ": " + D.message;
}

namespace detail {

LineMap::LineMap(const std::string &Text) : Size(Text.size()) {
  Starts.push_back(0);
  for (std::size_t I = 0; I < Text.size(); ++I)
    if (Text[I] == '\n')
      Starts.push_back(I + 1);
}

std::pair<unsigned, unsigned> LineMap::locate(std::size_t Offset) const {
  if (Size == 0)
    return {1, 1};
  Offset = std::min(Offset, Size - 1);
  auto It = std::upper_bound(Starts.begin(), Starts.end(), Offset);
  std::size_t Line = static_cast<std::size_t>(It - Starts.begin());
  std::size_t Col = Offset - Starts[Line - 1] + 1;
  return {static_cast<unsigned>(Line), static_cast<unsigned>(Col)};
}

} // namespace detail

} // namespace irclone
