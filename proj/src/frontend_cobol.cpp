//===--- frontend_cobol.cpp - COBOL subset front-end ------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Front-end for a COBOL subset: IDENTIFICATION/ENVIRONMENT headers are
/// skipped, DATA DIVISION items become variable symbols, and the PROCEDURE
/// DIVISION is lowered onto the same statement and expression kinds the C
/// front-end produces (ACCEPT/DISPLAY become calls, MOVE and the arithmetic
/// verbs become assignments, PERFORM loops become Forstmt/Whilestmt).
///
/// Both fixed-format (sequence area, indicator column, area A/B) and free
/// format sources are accepted.
///
//===----------------------------------------------------------------------===//

#include "irclone/frontend.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace irclone {

namespace {

struct ParseFailure {
  std::size_t offset;
  std::string message;
  Severity severity;
};

//===----------------------------------------------------------------------===//
// Source layout
//===----------------------------------------------------------------------===//

std::vector<std::pair<std::size_t, std::size_t>>
splitLines(const std::string &Text) {
  std::vector<std::pair<std::size_t, std::size_t>> Lines; // [begin, end)
  std::size_t Begin = 0;
  for (std::size_t I = 0; I <= Text.size(); ++I) {
    if (I == Text.size() || Text[I] == '\n') {
      std::size_t End = I;
      if (End > Begin && Text[End - 1] == '\r')
        --End;
      Lines.push_back({Begin, End});
      Begin = I + 1;
    }
  }
  return Lines;
}

bool isBlank(const std::string &Text, std::size_t B, std::size_t E) {
  for (std::size_t I = B; I < E; ++I)
    if (!std::isspace(static_cast<unsigned char>(Text[I])))
      return false;
  return true;
}

/// Fixed format is assumed when some line carries a numeric sequence area,
/// or when every code line leaves columns 1-6 blank and at least one line
/// uses a comment indicator in column 7.
bool looksFixedFormat(const std::string &Text) {
  bool AllAreaBlank = true, SawIndicator = false;
  for (auto [B, E] : splitLines(Text)) {
    if (isBlank(Text, B, E))
      continue;
    std::size_t Len = E - B;
    if (Len >= 7) {
      bool Digits = true;
      for (std::size_t I = 0; I < 6; ++I)
        if (!std::isdigit(static_cast<unsigned char>(Text[B + I])))
          Digits = false;
      if (Digits)
        return true;
    }
    if (Len < 7 || !isBlank(Text, B, B + 6)) {
      AllAreaBlank = false;
      continue;
    }
    char Ind = Text[B + 6];
    if (Ind == '*' || Ind == '/')
      SawIndicator = true;
  }
  return AllAreaBlank && SawIndicator;
}

/// Blanks everything the lexer must not see while keeping byte offsets, so
/// diagnostics still point into the original text.
std::string normalizeLayout(const std::string &Text) {
  std::string Out = Text;
  if (!looksFixedFormat(Text))
    return Out;
  for (auto [B, E] : splitLines(Text)) {
    std::size_t Len = E - B;
    for (std::size_t I = 0; I < std::min<std::size_t>(Len, 6); ++I)
      Out[B + I] = ' ';
    if (Len < 7)
      continue;
    char Ind = Text[B + 6];
    if (Ind == '*' || Ind == '/' || Ind == 'D' || Ind == 'd') {
      for (std::size_t I = B; I < E; ++I)
        Out[I] = ' ';
      continue;
    }
    if (Ind == '-')
      throw ParseFailure{B + 6, "continuation lines", Severity::Unsupported};
    Out[B + 6] = ' ';
    for (std::size_t I = B + 72; I < E; ++I)
      Out[I] = ' ';
  }
  return Out;
}

//===----------------------------------------------------------------------===//
// Lexer
//===----------------------------------------------------------------------===//

enum class Tok { Word, Number, String, Punct, Period, End };

struct Token {
  Tok kind;
  std::string text; // words uppercased; strings without quotes
  std::size_t offset;
};

bool isWordChar(char C) {
  return std::isalnum(static_cast<unsigned char>(C)) || C == '-' || C == '_';
}

std::string upper(std::string S) {
  std::transform(S.begin(), S.end(), S.begin(),
                 [](unsigned char C) { return std::toupper(C); });
  return S;
}

class Lexer {
public:
  explicit Lexer(const std::string &Text) : Text(Text) {}

  std::vector<Token> lex() {
    std::vector<Token> Out;
    while (true) {
      skipSpace();
      if (Pos >= Text.size())
        break;
      std::size_t Start = Pos;
      char C = Text[Pos];
      if (C == '*' && peek(1) == '>') {
        while (Pos < Text.size() && Text[Pos] != '\n')
          ++Pos;
        continue;
      }
      if (C == '\'' || C == '"') {
        Out.push_back({Tok::String, lexString(C), Start});
        continue;
      }
      if (C == '.' && separatorFollows(Pos + 1)) {
        ++Pos;
        Out.push_back({Tok::Period, ".", Start});
        continue;
      }
      if (PictureNext) {
        Out.push_back({Tok::Word, lexPicture(), Start});
        PictureNext = false;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(C)) ||
          (C == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        std::string Num = lexNumberOrWord();
        bool Numeric = std::all_of(Num.begin(), Num.end(), [](char D) {
          return std::isdigit(static_cast<unsigned char>(D)) || D == '.';
        });
        Out.push_back({Numeric ? Tok::Number : Tok::Word, upper(Num), Start});
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(C))) {
        std::string W = upper(lexWord());
        if (W == "PIC" || W == "PICTURE")
          ExpectPicture = true;
        else if (!(ExpectPicture && W == "IS"))
          ExpectPicture = false;
        if (ExpectPicture && (W == "PIC" || W == "PICTURE" || W == "IS"))
          PictureNext = true;
        Out.push_back({Tok::Word, std::move(W), Start});
        continue;
      }
      Out.push_back({Tok::Punct, lexPunct(), Start});
    }
    Out.push_back({Tok::End, "", Text.empty() ? 0 : Text.size() - 1});
    return Out;
  }

private:
  char peek(std::size_t Ahead) const {
    return Pos + Ahead < Text.size() ? Text[Pos + Ahead] : '\0';
  }

  bool separatorFollows(std::size_t I) const {
    return I >= Text.size() ||
           std::isspace(static_cast<unsigned char>(Text[I]));
  }

  void skipSpace() {
    while (Pos < Text.size() &&
           (std::isspace(static_cast<unsigned char>(Text[Pos])) ||
            Text[Pos] == ';'))
      ++Pos;
  }

  std::string lexString(char Quote) {
    std::size_t Start = Pos++;
    std::string Body;
    while (true) {
      if (Pos >= Text.size() || Text[Pos] == '\n')
        throw ParseFailure{Start, "unterminated literal", Severity::Error};
      if (Text[Pos] == Quote) {
        if (peek(1) == Quote) {
          Body += Quote;
          Pos += 2;
          continue;
        }
        ++Pos;
        return Body;
      }
      Body += Text[Pos++];
    }
  }

  std::string lexPicture() {
    std::size_t Start = Pos;
    while (Pos < Text.size() &&
           !std::isspace(static_cast<unsigned char>(Text[Pos]))) {
      if (Text[Pos] == '.' && separatorFollows(Pos + 1))
        break;
      ++Pos;
    }
    return Text.substr(Start, Pos - Start);
  }

  std::string lexNumberOrWord() {
    std::size_t Start = Pos;
    while (Pos < Text.size()) {
      char C = Text[Pos];
      if (isWordChar(C)) {
        ++Pos;
        continue;
      }
      if (C == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        ++Pos;
        continue;
      }
      break;
    }
    while (Pos > Start + 1 && Text[Pos - 1] == '-')
      --Pos;
    return Text.substr(Start, Pos - Start);
  }

  std::string lexWord() {
    std::size_t Start = Pos;
    while (Pos < Text.size() && isWordChar(Text[Pos]))
      ++Pos;
    while (Pos > Start + 1 && Text[Pos - 1] == '-')
      --Pos;
    return Text.substr(Start, Pos - Start);
  }

  std::string lexPunct() {
    for (std::string_view P : {"**", ">=", "<=", "<>"})
      if (Text.compare(Pos, P.size(), P) == 0) {
        Pos += P.size();
        return std::string(P);
      }
    return std::string(1, Text[Pos++]);
  }

  const std::string &Text;
  std::size_t Pos = 0;
  bool ExpectPicture = false;
  bool PictureNext = false;
};

//===----------------------------------------------------------------------===//
// IR construction helpers
//===----------------------------------------------------------------------===//

NodePtr op(std::string_view Name) {
  return AstNode::leaf(NodeKind::Operator, std::string(Name));
}

NodePtr binary(std::string_view OpName, NodePtr L, NodePtr R) {
  return AstNode::branch(NodeKind::Binary, {{Role::Op, op(OpName)},
                                            {Role::BExpr1, std::move(L)},
                                            {Role::BExpr2, std::move(R)}});
}

NodePtr binaryOp(std::string_view Symbol, NodePtr L, NodePtr R) {
  return binary(*operatorName(Symbol, OperatorArity::Binary), std::move(L),
                std::move(R));
}

NodePtr assign(NodePtr L, NodePtr R) {
  return AstNode::branch(NodeKind::Binary, {{Role::Op, op("=")},
                                            {Role::LhsExpr, std::move(L)},
                                            {Role::RhsExpr, std::move(R)}});
}

NodePtr unary(std::string_view OpName, NodePtr E) {
  return AstNode::branch(NodeKind::Unary,
                         {{Role::Op, op(OpName)}, {Role::UExpr, std::move(E)}});
}

NodePtr exprStmt(NodePtr E) {
  return AstNode::branch(NodeKind::Exprstmt, {{Role::HasExpr, std::move(E)}});
}

NodePtr compound(const std::vector<NodePtr> &Stmts) {
  std::vector<Edge> Children;
  for (const NodePtr &S : Stmts)
    Children.push_back({Role::HasStmt, S});
  return AstNode::branch(NodeKind::Compstmt, std::move(Children));
}

const std::set<std::string, std::less<>> Verbs = {
    "ACCEPT",   "DISPLAY",  "MOVE",     "COMPUTE",  "ADD",     "SUBTRACT",
    "MULTIPLY", "DIVIDE",   "IF",       "PERFORM",  "STOP",    "EXIT",
    "GOBACK",   "CONTINUE", "EVALUATE", "READ",     "WRITE",   "OPEN",
    "CLOSE",    "STRING",   "UNSTRING", "INSPECT",  "SEARCH",  "SORT",
    "INITIALIZE", "CALL",   "GO",       "SET",      "MERGE",   "RETURN",
    "RELEASE",  "REWRITE",  "DELETE",   "START",    "ALTER",   "CANCEL"};

const std::set<std::string, std::less<>> Unsupported = {
    "EVALUATE", "READ",  "WRITE",   "OPEN",   "CLOSE",   "STRING",
    "UNSTRING", "INSPECT", "SEARCH", "SORT",  "INITIALIZE", "CALL",
    "GO",       "SET",   "MERGE",   "RETURN", "RELEASE", "REWRITE",
    "DELETE",   "START", "ALTER",   "CANCEL"};

/// Words that end a statement's operand list.
const std::set<std::string, std::less<>> Terminators = {
    "ELSE",        "END-IF",       "END-PERFORM", "END-COMPUTE",
    "END-ADD",     "END-SUBTRACT", "END-MULTIPLY", "END-DIVIDE",
    "END-DISPLAY", "END-ACCEPT",   "WHEN",        "THEN"};

class CobolParser {
public:
  explicit CobolParser(std::vector<Token> Toks) : Toks(std::move(Toks)) {}

  CompilationUnit parseProgram() {
    skipUntilDivision();
    if (atDivision("IDENTIFICATION") || atDivision("ID")) {
      Pos += 2;
      expectPeriod();
      skipUntilDivision();
    }
    if (atDivision("ENVIRONMENT")) {
      Pos += 2;
      expectPeriod();
      skipUntilDivision();
    }
    if (atDivision("DATA")) {
      Pos += 2;
      expectPeriod();
      parseDataDivision();
    }
    if (!atDivision("PROCEDURE"))
      fail(peek(), "expected PROCEDURE DIVISION" + found(peek()));
    Pos += 2;
    if (isWord("USING"))
      unsupported(peek(), "PROCEDURE DIVISION USING");
    expectPeriod();
    std::vector<NodePtr> Stmts = parseProcedureBody();

    NodePtr Func = AstNode::branch(NodeKind::Func,
                                   {{Role::HasStmt, compound(Stmts)}});
    CompilationUnit CU;
    CU.root = AstNode::branch(NodeKind::CompUnit, {{Role::HasDirective, Func}});
    CU.symbols = std::move(Syms).take();
    CU.language = Language::Cobol;
    return CU;
  }

private:
  //===--------------------------------------------------------------------===//
  // Token helpers
  //===--------------------------------------------------------------------===//

  const Token &peek(std::size_t Ahead = 0) const {
    return Toks[std::min(Pos + Ahead, Toks.size() - 1)];
  }
  const Token &next() {
    const Token &T = Toks[Pos];
    if (T.kind != Tok::End)
      ++Pos;
    return T;
  }
  bool isWord(std::string_view W, std::size_t Ahead = 0) const {
    return peek(Ahead).kind == Tok::Word && peek(Ahead).text == W;
  }
  bool isPunct(std::string_view P, std::size_t Ahead = 0) const {
    return peek(Ahead).kind == Tok::Punct && peek(Ahead).text == P;
  }
  bool consumeWord(std::string_view W) {
    if (!isWord(W))
      return false;
    ++Pos;
    return true;
  }
  bool consumePunct(std::string_view P) {
    if (!isPunct(P))
      return false;
    ++Pos;
    return true;
  }
  void expectWord(std::string_view W) {
    if (!consumeWord(W))
      fail(peek(), "expected " + std::string(W) + found(peek()));
  }
  void expectPunct(std::string_view P) {
    if (!consumePunct(P))
      fail(peek(), "expected '" + std::string(P) + "'" + found(peek()));
  }
  void expectPeriod() {
    if (peek().kind != Tok::Period)
      fail(peek(), "expected '.'" + found(peek()));
    ++Pos;
  }
  void skipCommas() {
    while (isPunct(","))
      ++Pos;
  }
  bool atDivision(std::string_view Name) const {
    return isWord(Name) && isWord("DIVISION", 1);
  }
  bool atAnyDivision() const {
    return peek().kind == Tok::Word && isWord("DIVISION", 1);
  }
  void skipUntilDivision() {
    while (peek().kind != Tok::End && !atAnyDivision())
      ++Pos;
  }
  static std::string found(const Token &T) {
    if (T.kind == Tok::End)
      return " at end of input";
    return " before '" + T.text + "'";
  }

  [[noreturn]] void fail(const Token &T, std::string Message,
                         Severity S = Severity::Error) {
    throw ParseFailure{T.offset, std::move(Message), S};
  }
  [[noreturn]] void unsupported(const Token &T, std::string What) {
    fail(T, What + " is outside the supported COBOL subset",
         Severity::Unsupported);
  }

  //===--------------------------------------------------------------------===//
  // DATA DIVISION
  //===--------------------------------------------------------------------===//

  void parseDataDivision() {
    while (peek().kind != Tok::End && !atAnyDivision()) {
      if (isWord("SECTION", 1)) {
        const Token &Sec = peek();
        if (Sec.text != "WORKING-STORAGE" && Sec.text != "LOCAL-STORAGE")
          unsupported(Sec, Sec.text + " SECTION");
        Pos += 2;
        expectPeriod();
        continue;
      }
      parseDataEntry();
    }
  }

  void parseDataEntry() {
    const Token &Level = peek();
    if (Level.kind != Tok::Number)
      fail(Level, "expected a level number" + found(Level));
    ++Pos;
    const Token &NameTok = peek();
    if (NameTok.kind != Tok::Word)
      fail(NameTok, "expected a data name" + found(NameTok));
    if (NameTok.text != "FILLER") {
      if (Level.text == "66")
        unsupported(Level, "level 66 RENAMES");
      if (Level.text != "FILLER")
        Syms.intern(NameTok.text, SymbolCategory::Variable);
      ++Pos;
    } else {
      ++Pos;
    }
    while (peek().kind != Tok::Period) {
      if (peek().kind == Tok::End)
        fail(peek(), "expected '.' after data entry" + found(peek()));
      if (isWord("REDEFINES") || isWord("RENAMES"))
        unsupported(peek(), peek().text);
      ++Pos;
    }
    ++Pos;
  }

  //===--------------------------------------------------------------------===//
  // PROCEDURE DIVISION
  //===--------------------------------------------------------------------===//

  bool atVerb() const {
    return peek().kind == Tok::Word && Verbs.count(peek().text) > 0;
  }

  /// Paragraph ("NAME.") or section ("NAME SECTION.") header.
  /// Paragraph and section headers only start a sentence.
  bool atHeader() const {
    if (peek().kind != Tok::Word || Verbs.count(peek().text))
      return false;
    if (Pos > 0 && Toks[Pos - 1].kind != Tok::Period)
      return false;
    if (peek(1).kind == Tok::Period)
      return true;
    return isWord("SECTION", 1) && peek(2).kind == Tok::Period;
  }

  std::vector<NodePtr> parseProcedureBody() {
    std::vector<NodePtr> Stmts;
    while (peek().kind != Tok::End) {
      if (peek().kind == Tok::Period) {
        ++Pos;
        continue;
      }
      if (atHeader()) {
        const Token &Name = next();
        if (Syms.find(Name.text, SymbolCategory::Variable))
          fail(Name, "paragraph name '" + Name.text + "' is a data item");
        Syms.intern(Name.text, SymbolCategory::Label);
        consumeWord("SECTION");
        ++Pos;
        continue;
      }
      if (isWord("END") && isWord("PROGRAM", 1)) {
        Pos += 2;
        while (peek().kind != Tok::Period && peek().kind != Tok::End)
          ++Pos;
        continue;
      }
      std::size_t Before = Stmts.size();
      parseStatementsInto(Stmts);
      if (Stmts.size() == Before && !atVerbFree())
        fail(peek(), "expected a statement" + found(peek()));
    }
    return Stmts;
  }

  /// True when the cursor sits on something parseStatementsInto consumed
  /// without producing a node (EXIT, CONTINUE).
  bool atVerbFree() const { return LastWasNoOp; }

  /// Parses statements until a terminator word, a period or end of input.
  void parseStatementsInto(std::vector<NodePtr> &Out) {
    LastWasNoOp = false;
    while (true) {
      skipCommas();
      const Token &T = peek();
      if (T.kind != Tok::Word || Terminators.count(T.text))
        return;
      if (!atVerb()) {
        if (atHeader())
          return;
        fail(T, "expected a statement" + found(T));
      }
      parseStatement(Out);
    }
  }

  void parseStatement(std::vector<NodePtr> &Out) {
    const Token &Verb = next();
    const std::string &V = Verb.text;
    if (Unsupported.count(V))
      unsupported(Verb, V + " statement");
    if (V == "ACCEPT")
      return Out.push_back(parseAccept());
    if (V == "DISPLAY")
      return Out.push_back(parseDisplay());
    if (V == "MOVE")
      return parseMove(Out);
    if (V == "COMPUTE")
      return parseCompute(Out);
    if (V == "ADD")
      return parseAdd(Out);
    if (V == "SUBTRACT")
      return parseSubtract(Out);
    if (V == "MULTIPLY")
      return parseMultiply(Out);
    if (V == "DIVIDE")
      return parseDivide(Out);
    if (V == "IF")
      return Out.push_back(parseIf());
    if (V == "PERFORM")
      return Out.push_back(parsePerform(Verb));
    if (V == "STOP") {
      expectWord("RUN");
      return Out.push_back(exitCall());
    }
    if (V == "GOBACK")
      return Out.push_back(exitCall());
    if (V == "EXIT") {
      if (consumeWord("PROGRAM"))
        return Out.push_back(exitCall());
      if (isWord("PERFORM") || isWord("PARAGRAPH") || isWord("SECTION"))
        unsupported(peek(), "EXIT " + peek().text);
      LastWasNoOp = true;
      return;
    }
    if (V == "CONTINUE") {
      LastWasNoOp = true;
      return;
    }
    unsupported(Verb, V + " statement");
  }

  NodePtr call(std::string Name, std::vector<NodePtr> Params) {
    Syms.intern(Name, SymbolCategory::Function);
    std::vector<Edge> Children{
        {Role::LiName, AstNode::leaf(NodeKind::Ident, std::move(Name))}};
    for (NodePtr &P : Params)
      Children.push_back({Role::LiParam, std::move(P)});
    return AstNode::branch(NodeKind::Call, std::move(Children));
  }

  NodePtr exitCall() { return exprStmt(call("exit", {})); }

  NodePtr parseAccept() {
    NodePtr Target = parseIdentifier();
    if (consumeWord("FROM")) {
      const Token &Src = next();
      if (Src.kind != Tok::Word)
        fail(Src, "expected a device name after FROM");
    }
    consumeWord("END-ACCEPT");
    return exprStmt(call("ACCEPT", {std::move(Target)}));
  }

  bool atOperandStart() const {
    const Token &T = peek();
    if (T.kind == Tok::Number || T.kind == Tok::String)
      return true;
    if (T.kind == Tok::Punct)
      return T.text == "-" || T.text == "+" || T.text == "(";
    if (T.kind != Tok::Word || Verbs.count(T.text) || Terminators.count(T.text))
      return false;
    if (T.text == "UPON" || T.text == "WITH" || T.text == "NO")
      return false;
    return !atHeader();
  }

  NodePtr parseDisplay() {
    std::vector<NodePtr> Params;
    while (true) {
      skipCommas();
      if (!atOperandStart())
        break;
      Params.push_back(parsePrimary());
    }
    if (Params.empty())
      fail(peek(), "DISPLAY needs an operand" + found(peek()));
    if (consumeWord("UPON"))
      next();
    if (consumeWord("WITH")) {
      expectWord("NO");
      expectWord("ADVANCING");
    } else if (consumeWord("NO")) {
      expectWord("ADVANCING");
    }
    consumeWord("END-DISPLAY");
    return exprStmt(call("DISPLAY", std::move(Params)));
  }

  void parseMove(std::vector<NodePtr> &Out) {
    if (isWord("CORRESPONDING") || isWord("CORR") || isWord("ALL"))
      unsupported(peek(), "MOVE " + peek().text);
    NodePtr Src = parsePrimary();
    expectWord("TO");
    std::vector<NodePtr> Targets = parseTargets(false);
    for (NodePtr &T : Targets)
      Out.push_back(exprStmt(assign(std::move(T), Src)));
  }

  /// One or more receiving identifiers, each optionally ROUNDED.
  std::vector<NodePtr> parseTargets(bool AllowRounded,
                                    std::vector<bool> *Rounded = nullptr) {
    std::vector<NodePtr> Out;
    do {
      skipCommas();
      Out.push_back(parseIdentifier());
      bool R = AllowRounded && consumeWord("ROUNDED");
      if (Rounded)
        Rounded->push_back(R);
      skipCommas();
    } while (peek().kind == Tok::Word && isDataName(peek().text));
    return Out;
  }

  bool isDataName(const std::string &W) const {
    return Syms.find(W, SymbolCategory::Variable) != nullptr;
  }

  /// `ROUNDED` receiving fields wrap the value in a ROUNDED call.
  NodePtr maybeRounded(NodePtr Value, bool Rounded) {
    if (!Rounded)
      return Value;
    return call("ROUNDED", {std::move(Value)});
  }

  void rejectSizeError() {
    if (isWord("ON") || isWord("SIZE") || isWord("NOT"))
      unsupported(peek(), "SIZE ERROR phrase");
    if (isWord("REMAINDER"))
      unsupported(peek(), "REMAINDER phrase");
  }

  void parseCompute(std::vector<NodePtr> &Out) {
    std::vector<bool> Rounded;
    std::vector<NodePtr> Targets = parseTargets(true, &Rounded);
    if (!consumePunct("=") && !consumeWord("EQUAL"))
      fail(peek(), "expected '=' in COMPUTE" + found(peek()));
    NodePtr Value = parseArith();
    rejectSizeError();
    consumeWord("END-COMPUTE");
    for (std::size_t I = 0; I < Targets.size(); ++I)
      Out.push_back(
          exprStmt(assign(Targets[I], maybeRounded(Value, Rounded[I]))));
  }

  /// Operands before TO/FROM/BY/INTO/GIVING, folded with `Sym`.
  std::vector<NodePtr> parseOperands() {
    std::vector<NodePtr> Ops;
    while (true) {
      skipCommas();
      if (!atOperandStart() || isWord("TO") || isWord("FROM") ||
          isWord("GIVING") || isWord("BY") || isWord("INTO"))
        break;
      Ops.push_back(parsePrimary());
    }
    if (Ops.empty())
      fail(peek(), "expected an operand" + found(peek()));
    return Ops;
  }

  static NodePtr fold(std::string_view Sym, NodePtr Acc,
                      const std::vector<NodePtr> &Ops) {
    for (const NodePtr &O : Ops)
      Acc = binaryOp(Sym, std::move(Acc), O);
    return Acc;
  }

  void emitArithmetic(std::vector<NodePtr> &Out,
                      const std::vector<NodePtr> &Targets,
                      const std::vector<bool> &Rounded,
                      const std::function<NodePtr(const NodePtr &)> &Value) {
    for (std::size_t I = 0; I < Targets.size(); ++I)
      Out.push_back(exprStmt(
          assign(Targets[I], maybeRounded(Value(Targets[I]), Rounded[I]))));
  }

  void finishArithmetic(std::string_view EndWord) {
    rejectSizeError();
    consumeWord(EndWord);
  }

  // ADD a b TO c        -> c = c + a + b
  // ADD a TO b GIVING c -> c = b + a
  // ADD a b GIVING c    -> c = a + b
  void parseAdd(std::vector<NodePtr> &Out) {
    if (isWord("CORRESPONDING") || isWord("CORR"))
      unsupported(peek(), "ADD CORRESPONDING");
    std::vector<NodePtr> Ops = parseOperands();
    std::vector<bool> Rounded;
    if (consumeWord("TO")) {
      std::vector<NodePtr> Receivers = parseTargets(true, &Rounded);
      if (consumeWord("GIVING")) {
        if (Receivers.size() != 1)
          unsupported(peek(), "ADD ... TO with several operands and GIVING");
        NodePtr Sum = fold("+", Receivers.front(), Ops);
        Rounded.clear();
        std::vector<NodePtr> Targets = parseTargets(true, &Rounded);
        emitArithmetic(Out, Targets, Rounded,
                       [&](const NodePtr &) { return Sum; });
      } else {
        emitArithmetic(Out, Receivers, Rounded, [&](const NodePtr &T) {
          return fold("+", T, Ops);
        });
      }
    } else {
      expectWord("GIVING");
      std::vector<NodePtr> Targets = parseTargets(true, &Rounded);
      NodePtr Sum = fold("+", Ops.front(), {Ops.begin() + 1, Ops.end()});
      emitArithmetic(Out, Targets, Rounded,
                     [&](const NodePtr &) { return Sum; });
    }
    finishArithmetic("END-ADD");
  }

  // SUBTRACT a b FROM c [GIVING d] -> c|d = c - a - b
  void parseSubtract(std::vector<NodePtr> &Out) {
    if (isWord("CORRESPONDING") || isWord("CORR"))
      unsupported(peek(), "SUBTRACT CORRESPONDING");
    std::vector<NodePtr> Ops = parseOperands();
    expectWord("FROM");
    std::vector<bool> Rounded;
    if (consumeWord("GIVING"))
      fail(peek(), "expected minuend before GIVING");
    NodePtr Minuend = parsePrimary();
    bool MinuendRounded = consumeWord("ROUNDED");
    if (consumeWord("GIVING")) {
      NodePtr Diff = fold("-", Minuend, Ops);
      std::vector<NodePtr> Targets = parseTargets(true, &Rounded);
      emitArithmetic(Out, Targets, Rounded,
                     [&](const NodePtr &) { return Diff; });
    } else {
      if (Minuend->kind() != NodeKind::Ident &&
          Minuend->kind() != NodeKind::Binary)
        fail(peek(), "SUBTRACT ... FROM needs a data item");
      std::vector<NodePtr> Targets{Minuend};
      Rounded.push_back(MinuendRounded);
      while (peek().kind == Tok::Word && isDataName(peek().text)) {
        Targets.push_back(parseIdentifier());
        Rounded.push_back(consumeWord("ROUNDED"));
        skipCommas();
      }
      emitArithmetic(Out, Targets, Rounded,
                     [&](const NodePtr &T) { return fold("-", T, Ops); });
    }
    finishArithmetic("END-SUBTRACT");
  }

  // MULTIPLY a BY b [GIVING c] -> b|c = a * b
  void parseMultiply(std::vector<NodePtr> &Out) {
    NodePtr A = parsePrimary();
    expectWord("BY");
    std::vector<bool> Rounded;
    if (consumeWord("GIVING"))
      fail(peek(), "expected operand before GIVING");
    NodePtr B = parsePrimary();
    bool BRounded = consumeWord("ROUNDED");
    if (consumeWord("GIVING")) {
      NodePtr Product = binaryOp("*", A, B);
      std::vector<NodePtr> Targets = parseTargets(true, &Rounded);
      emitArithmetic(Out, Targets, Rounded,
                     [&](const NodePtr &) { return Product; });
    } else {
      emitArithmetic(Out, {B}, {BRounded},
                     [&](const NodePtr &T) { return binaryOp("*", T, A); });
    }
    finishArithmetic("END-MULTIPLY");
  }

  // DIVIDE a INTO b [GIVING c] -> b|c = b / a
  // DIVIDE a BY b GIVING c     -> c = a / b
  void parseDivide(std::vector<NodePtr> &Out) {
    NodePtr A = parsePrimary();
    std::vector<bool> Rounded;
    if (consumeWord("INTO")) {
      NodePtr B = parsePrimary();
      bool BRounded = consumeWord("ROUNDED");
      if (consumeWord("GIVING")) {
        NodePtr Quot = binaryOp("/", B, A);
        std::vector<NodePtr> Targets = parseTargets(true, &Rounded);
        emitArithmetic(Out, Targets, Rounded,
                       [&](const NodePtr &) { return Quot; });
      } else {
        emitArithmetic(Out, {B}, {BRounded},
                       [&](const NodePtr &T) { return binaryOp("/", T, A); });
      }
    } else {
      expectWord("BY");
      NodePtr B = parsePrimary();
      expectWord("GIVING");
      NodePtr Quot = binaryOp("/", A, B);
      std::vector<NodePtr> Targets = parseTargets(true, &Rounded);
      emitArithmetic(Out, Targets, Rounded,
                     [&](const NodePtr &) { return Quot; });
    }
    finishArithmetic("END-DIVIDE");
  }

  NodePtr parseIf() {
    NodePtr Cond = parseCondition();
    consumeWord("THEN");
    std::vector<NodePtr> Then;
    parseStatementsInto(Then);
    std::vector<Edge> Children{{Role::CondExpr, std::move(Cond)},
                               {Role::ThenStmt, compound(Then)}};
    if (consumeWord("ELSE")) {
      std::vector<NodePtr> Else;
      parseStatementsInto(Else);
      Children.push_back({Role::ElseStmt, compound(Else)});
    }
    // A period closes every open IF; leave it for the enclosing sentence.
    if (!consumeWord("END-IF") && peek().kind != Tok::Period &&
        peek().kind != Tok::End)
      fail(peek(), "expected END-IF" + found(peek()));
    LastWasNoOp = false;
    return AstNode::branch(NodeKind::Ifthen, std::move(Children));
  }

  std::vector<NodePtr> parsePerformBody() {
    std::vector<NodePtr> Body;
    parseStatementsInto(Body);
    expectWord("END-PERFORM");
    LastWasNoOp = false;
    return Body;
  }

  NodePtr negate(NodePtr Cond) {
    return unary(*operatorName("!", OperatorArity::Unary), std::move(Cond));
  }

  void parseTestPhrase() {
    if (!consumeWord("WITH") && !isWord("TEST"))
      return;
    expectWord("TEST");
    if (isWord("AFTER"))
      unsupported(peek(), "PERFORM WITH TEST AFTER");
    expectWord("BEFORE");
  }

  NodePtr parsePerform(const Token &Verb) {
    parseTestPhrase();
    if (consumeWord("UNTIL")) {
      NodePtr Cond = parseCondition();
      std::vector<NodePtr> Body = parsePerformBody();
      return AstNode::branch(NodeKind::Whilestmt,
                             {{Role::CondExpr, negate(std::move(Cond))},
                              {Role::BodyStmt, compound(Body)}});
    }
    if (consumeWord("VARYING")) {
      NodePtr Var = parseIdentifier();
      expectWord("FROM");
      NodePtr From = parseArith();
      NodePtr Step = AstNode::leaf(NodeKind::Literal, "1");
      if (consumeWord("BY"))
        Step = parseArith();
      expectWord("UNTIL");
      NodePtr Cond = parseCondition();
      if (isWord("AFTER"))
        unsupported(peek(), "PERFORM VARYING ... AFTER");
      std::vector<NodePtr> Body = parsePerformBody();
      return AstNode::branch(
          NodeKind::Forstmt,
          {{Role::InitStmt, exprStmt(assign(Var, std::move(From)))},
           {Role::CondExpr, negate(std::move(Cond))},
           {Role::IncrStmt,
            exprStmt(assign(Var, binaryOp("+", Var, std::move(Step))))},
           {Role::BodyStmt, compound(Body)}});
    }
    const Token &T = peek();
    bool CountStart = T.kind == Tok::Number ||
                      (T.kind == Tok::Word && isDataName(T.text));
    if (CountStart && isWord("TIMES", 1 + subscriptLength(1))) {
      NodePtr Count = parsePrimary();
      expectWord("TIMES");
      std::vector<NodePtr> Body = parsePerformBody();
      return AstNode::branch(NodeKind::Forstmt,
                             {{Role::CondExpr, std::move(Count)},
                              {Role::BodyStmt, compound(Body)}});
    }
    if (T.kind == Tok::Word && !Verbs.count(T.text) && !isDataName(T.text))
      unsupported(T, "out-of-line PERFORM of a paragraph");
    unsupported(Verb, "inline PERFORM without TIMES, UNTIL or VARYING");
  }

  /// Number of tokens in a "( ... )" group starting `Ahead` tokens away.
  std::size_t subscriptLength(std::size_t Ahead) const {
    if (!isPunct("(", Ahead))
      return 0;
    std::size_t Depth = 0, N = 0;
    do {
      const Token &T = peek(Ahead + N);
      if (T.kind == Tok::End)
        return N;
      if (T.kind == Tok::Punct && T.text == "(")
        ++Depth;
      if (T.kind == Tok::Punct && T.text == ")")
        --Depth;
      ++N;
    } while (Depth > 0);
    return N;
  }

  //===--------------------------------------------------------------------===//
  // Conditions and arithmetic
  //===--------------------------------------------------------------------===//

  NodePtr parseCondition() {
    NodePtr L = parseAndCondition();
    while (consumeWord("OR"))
      L = binaryOp("||", std::move(L), parseAndCondition());
    return L;
  }

  NodePtr parseAndCondition() {
    NodePtr L = parseNotCondition();
    while (consumeWord("AND"))
      L = binaryOp("&&", std::move(L), parseNotCondition());
    return L;
  }

  NodePtr parseNotCondition() {
    if (consumeWord("NOT"))
      return negate(parseNotCondition());
    return parseRelation();
  }

  /// Relational operator as a binary operator symbol, or empty.
  std::string parseRelOp() {
    std::size_t Save = Pos;
    consumeWord("IS");
    bool Not = consumeWord("NOT");
    std::string Sym;
    if (consumePunct("=")) {
      Sym = "==";
    } else if (consumePunct(">=")) {
      Sym = ">=";
    } else if (consumePunct("<=")) {
      Sym = "<=";
    } else if (consumePunct("<>")) {
      Sym = "!=";
    } else if (consumePunct(">")) {
      Sym = ">";
    } else if (consumePunct("<")) {
      Sym = "<";
    } else if (consumeWord("EQUAL")) {
      consumeWord("TO");
      Sym = "==";
    } else if (consumeWord("GREATER")) {
      consumeWord("THAN");
      Sym = ">";
      if (consumeWord("OR")) {
        expectWord("EQUAL");
        consumeWord("TO");
        Sym = ">=";
      }
    } else if (consumeWord("LESS")) {
      consumeWord("THAN");
      Sym = "<";
      if (consumeWord("OR")) {
        expectWord("EQUAL");
        consumeWord("TO");
        Sym = "<=";
      }
    } else if (isWord("NUMERIC") || isWord("ALPHABETIC") || isWord("POSITIVE") ||
               isWord("NEGATIVE") || isWord("ZERO")) {
      unsupported(peek(), "class or sign condition");
    } else {
      Pos = Save;
      return {};
    }
    if (!Not)
      return Sym;
    if (Sym == "==")
      return "!=";
    if (Sym == ">")
      return "<=";
    if (Sym == "<")
      return ">=";
    if (Sym == ">=")
      return "<";
    if (Sym == "<=")
      return ">";
    return "==";
  }

  NodePtr parseRelation() {
    NodePtr L = parseArith();
    std::string Sym = parseRelOp();
    if (Sym.empty())
      return L;
    return binaryOp(Sym, std::move(L), parseArith());
  }

  NodePtr parseArith() {
    NodePtr L = parseTerm();
    while (isPunct("+") || isPunct("-")) {
      std::string Sym = next().text;
      L = binaryOp(Sym, std::move(L), parseTerm());
    }
    return L;
  }

  NodePtr parseTerm() {
    NodePtr L = parsePower();
    while (isPunct("*") || isPunct("/")) {
      std::string Sym = next().text;
      L = binaryOp(Sym, std::move(L), parsePower());
    }
    return L;
  }

  NodePtr parsePower() {
    NodePtr L = parseSigned();
    if (consumePunct("**"))
      return binaryOp("**", std::move(L), parsePower());
    return L;
  }

  NodePtr parseSigned() {
    if (isPunct("-") || isPunct("+")) {
      std::string Sym = next().text;
      return unary(*operatorName(Sym, OperatorArity::Unary), parseSigned());
    }
    return parsePrimary();
  }

  NodePtr parsePrimary() {
    const Token &T = peek();
    if (T.kind == Tok::Number) {
      ++Pos;
      return AstNode::leaf(NodeKind::Literal, T.text);
    }
    if (T.kind == Tok::String) {
      ++Pos;
      std::string V = upper(T.text);
      return AstNode::leaf(NodeKind::Literal, V.empty() ? "''" : V);
    }
    if (T.kind == Tok::Punct && T.text == "(") {
      // Parenthesized expressions keep an explicit "(" unary wrapper.
      ++Pos;
      NodePtr Inner = parseCondition();
      expectPunct(")");
      return unary("(", std::move(Inner));
    }
    if (T.kind == Tok::Punct && (T.text == "-" || T.text == "+"))
      return parseSigned();
    if (T.kind != Tok::Word)
      fail(T, "expected an operand" + found(T));
    if (T.text == "ZERO" || T.text == "ZEROS" || T.text == "ZEROES") {
      ++Pos;
      return AstNode::leaf(NodeKind::Literal, "0");
    }
    if (T.text == "SPACE" || T.text == "SPACES") {
      ++Pos;
      return AstNode::leaf(NodeKind::Literal, "SPACE");
    }
    if (T.text == "FUNCTION")
      return parseFunction();
    return parseIdentifier();
  }

  NodePtr parseFunction() {
    ++Pos;
    const Token &Name = peek();
    if (Name.kind != Tok::Word)
      fail(Name, "expected an intrinsic function name" + found(Name));
    ++Pos;
    std::vector<NodePtr> Args;
    if (consumePunct("(")) {
      while (!consumePunct(")")) {
        if (peek().kind == Tok::End || peek().kind == Tok::Period)
          fail(peek(), "expected ')'" + found(peek()));
        Args.push_back(parseArith());
        skipCommas();
      }
    }
    if ((Name.text == "MOD" || Name.text == "REM") && Args.size() == 2)
      return binary(Name.text, Args[0], Args[1]);
    return call(Name.text, std::move(Args));
  }

  NodePtr parseIdentifier() {
    const Token &T = peek();
    if (T.kind != Tok::Word)
      fail(T, "expected a data name" + found(T));
    if (!isDataName(T.text))
      fail(T, "undefined data item '" + T.text + "'");
    ++Pos;
    NodePtr Id = AstNode::leaf(NodeKind::Ident, varRendering(T.text));
    if (isWord("OF") || isWord("IN"))
      unsupported(peek(), "qualified data name");
    if (consumePunct("(")) {
      NodePtr Index = parseArith();
      if (isPunct(":"))
        unsupported(peek(), "reference modification");
      if (isPunct(",") || !isPunct(")"))
        if (!isPunct(")"))
          unsupported(peek(), "multi-dimensional subscript");
      expectPunct(")");
      Id = binaryOp("[]", std::move(Id), std::move(Index));
    }
    return Id;
  }

  std::vector<Token> Toks;
  std::size_t Pos = 0;
  SymbolTable Syms;
  bool LastWasNoOp = false;
};

} // namespace

ParseResult parseCobol(const SourceFile &Src) {
  ParseResult Result;
  detail::LineMap Lines(Src.text);
  try {
    if (isBlank(Src.text, 0, Src.text.size()))
      throw ParseFailure{0, "empty source file", Severity::Error};
    std::string Layout = normalizeLayout(Src.text);
    Lexer L(Layout);
    CobolParser P(L.lex());
    CompilationUnit CU = P.parseProgram();
    CU.sourceId = sourceIdFromPath(Src.path);
    Result.unit = std::move(CU);
  } catch (const ParseFailure &F) {
    auto [Line, Col] = Lines.locate(F.offset);
    Result.diagnostics.push_back({Line, Col, F.message, F.severity});
  }
  return Result;
}

} // namespace irclone
