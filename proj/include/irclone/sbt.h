//===--- sbt.h - Structure-based traversal ----------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Depth-first linearization of IR trees into bracketed token sequences, and
/// the inverse parse.
///
/// A non-leaf node of kind K renders as "(K" followed by every child wrapped
/// in its role, "(role" child ")role", and then ")K". A leaf with value v
/// renders as "(v)v": an Open, a Leaf and a Close token, the Leaf token being
/// invisible in the compact text form.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_SBT_H
#define IRCLONE_SBT_H

#include "irclone/ir.h"
#include "irclone/ir_json.h"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace irclone {

enum class SbtTokenKind { Open, Close, Leaf };

struct SbtToken {
  SbtTokenKind kind;
  std::string text;

  friend bool operator==(const SbtToken &, const SbtToken &) = default;
};

struct SbtSequence {
  std::vector<SbtToken> tokens;
  std::string sourceId;
  Language language = Language::C;
};

class SbtParseError : public std::runtime_error {
public:
  SbtParseError(std::size_t TokenIndex, const std::string &Message)
      : std::runtime_error("token " + std::to_string(TokenIndex) + ": " +
                           Message),
        TokenIndex(TokenIndex) {}

  std::size_t tokenIndex() const { return TokenIndex; }

private:
  std::size_t TokenIndex;
};

std::vector<SbtToken> linearize(const AstNode &Root);
SbtSequence linearize(const CompilationUnit &CU);

/// Compact concatenated form, e.g. "(CompUnit)CompUnit".
std::string render(const std::vector<SbtToken> &Tokens);
inline std::string render(const SbtSequence &Seq) { return render(Seq.tokens); }

/// Number of Open, Close and Leaf tokens.
inline std::size_t tokenCount(const SbtSequence &Seq) {
  return Seq.tokens.size();
}

/// Parses the compact form back into a tree. Leaf kinds are recovered from
/// context: Operator under the Operator role, Ident under LI_name or when the
/// value has the Var[...] form, Literal otherwise.
NodePtr parseSbt(std::string_view Text);

/// Parses the explicit token form.
NodePtr parseSbtTokens(const std::vector<SbtToken> &Tokens);

/// True when Open/Close tokens nest with matching names and every Leaf sits
/// directly inside an Open/Close pair carrying its own value.
bool isBalanced(const std::vector<SbtToken> &Tokens);

/// Longest balanced prefix-with-closers of at most `MaxTokens` tokens. The
/// cut never splits a leaf triple or leaves an empty role wrapper.
std::vector<SbtToken> truncate(const std::vector<SbtToken> &Tokens,
                               std::size_t MaxTokens);

/// COBOL when the first function body is a bare Compstmt (the C front-end
/// always wraps bodies in a Block), C otherwise.
Language inferLanguage(const AstNode &Root);

/// Removes all whitespace; used to compare renderings with typeset text.
std::string stripWhitespace(std::string_view S);

std::string_view tokenKindName(SbtTokenKind K);

OrderedJson sequenceToJson(const SbtSequence &Seq);
SbtSequence sequenceFromJson(const OrderedJson &J);

/// One line of an .sbt file: "<source_id>\t<rendering>".
struct SbtLine {
  std::string id;
  std::string text;
};

std::string formatSbtLine(const SbtLine &L);
/// Throws std::runtime_error naming the line number on malformed input.
std::vector<SbtLine> parseSbtFile(std::string_view Contents);

} // namespace irclone

#endif // IRCLONE_SBT_H
