//===--- frontend_c.cpp - C subset front-end --------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Lexer and recursive-descent parser for the C subset: function
/// definitions, scalar and one-dimensional array declarations, arithmetic,
/// comparison and logical operators, if/else, while, for and return.
/// Preprocessor lines are skipped.
///
//===----------------------------------------------------------------------===//

#include "irclone/frontend.h"

#include <array>
#include <cctype>
#include <set>

namespace irclone {

namespace {

enum class Tok { Ident, Keyword, Number, String, Char, Punct, End };

struct Token {
  Tok kind;
  std::string text; // string/char literals: contents without quotes
  std::size_t offset;
};

struct ParseFailure {
  std::size_t offset;
  std::string message;
  Severity severity;
};

const std::set<std::string, std::less<>> Keywords = {
    "int",     "long",     "char",   "float",   "double",   "void",
    "short",   "unsigned", "signed", "const",   "static",   "extern",
    "register", "volatile", "auto",  "inline",  "_Bool",    "if",
    "else",    "while",    "for",    "return",  "do",       "switch",
    "case",    "default",  "break",  "continue", "goto",    "struct",
    "union",   "enum",     "typedef", "sizeof"};

const std::set<std::string, std::less<>> TypeKeywords = {
    "int",    "long",   "char",     "float",    "double", "void",
    "short",  "unsigned", "signed", "const",    "static", "extern",
    "register", "volatile", "auto", "inline",   "_Bool"};

// Library identifiers that appear as values rather than declared variables.
const std::set<std::string, std::less<>> LibraryConstants = {
    "stdin", "stdout", "stderr", "EOF", "NULL", "INT_MAX", "INT_MIN",
    "LLONG_MAX", "LLONG_MIN", "LONG_MAX", "LONG_MIN", "true", "false"};

constexpr std::array<std::string_view, 25> Puncts = {
    "...", "<<=", ">>=", "->", "++", "--", "<<", ">>", "<=",
    ">=",  "==",  "!=",  "&&", "||", "+=", "-=", "*=", "/=",
    "%=",  "&=",  "|=",  "^=", "##", "<:", ":>"};

class Lexer {
public:
  explicit Lexer(const std::string &Text) : Text(Text) {}

  std::vector<Token> lex() {
    std::vector<Token> Out;
    bool LineStart = true;
    while (Pos < Text.size()) {
      char C = Text[Pos];
      if (C == '\n') {
        LineStart = true;
        ++Pos;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(C))) {
        ++Pos;
        continue;
      }
      if (C == '#' && LineStart) {
        skipDirective();
        continue;
      }
      LineStart = false;
      if (C == '/' && peek(1) == '/') {
        while (Pos < Text.size() && Text[Pos] != '\n')
          ++Pos;
        continue;
      }
      if (C == '/' && peek(1) == '*') {
        std::size_t Start = Pos;
        Pos += 2;
        while (Pos + 1 < Text.size() && !(Text[Pos] == '*' && Text[Pos + 1] == '/'))
          ++Pos;
        if (Pos + 1 >= Text.size())
          throw ParseFailure{Start, "unterminated comment", Severity::Error};
        Pos += 2;
        continue;
      }
      std::size_t Start = Pos;
      if (std::isalpha(static_cast<unsigned char>(C)) || C == '_') {
        while (Pos < Text.size() &&
               (std::isalnum(static_cast<unsigned char>(Text[Pos])) ||
                Text[Pos] == '_'))
          ++Pos;
        std::string Word = Text.substr(Start, Pos - Start);
        Tok K = Keywords.count(Word) ? Tok::Keyword : Tok::Ident;
        Out.push_back({K, std::move(Word), Start});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(C)) ||
          (C == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        lexNumber();
        Out.push_back({Tok::Number, Text.substr(Start, Pos - Start), Start});
        continue;
      }
      if (C == '"' || C == '\'') {
        std::string Body = lexQuoted(C);
        Out.push_back({C == '"' ? Tok::String : Tok::Char, std::move(Body),
                       Start});
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

  void skipDirective() {
    while (Pos < Text.size() && Text[Pos] != '\n') {
      if (Text[Pos] == '\\' && peek(1) == '\n')
        ++Pos;
      ++Pos;
    }
  }

  void lexNumber() {
    bool Hex = Text[Pos] == '0' && (peek(1) == 'x' || peek(1) == 'X');
    while (Pos < Text.size()) {
      char C = Text[Pos];
      if (std::isalnum(static_cast<unsigned char>(C)) || C == '.' || C == '_') {
        ++Pos;
        continue;
      }
      char Prev = Text[Pos - 1];
      bool Exponent = Hex ? (Prev == 'p' || Prev == 'P')
                          : (Prev == 'e' || Prev == 'E');
      if ((C == '+' || C == '-') && Exponent) {
        ++Pos;
        continue;
      }
      break;
    }
  }

  std::string lexQuoted(char Quote) {
    std::size_t Start = Pos++;
    std::string Body;
    while (Pos < Text.size() && Text[Pos] != Quote) {
      if (Text[Pos] == '\n')
        break;
      if (Text[Pos] == '\\' && Pos + 1 < Text.size()) {
        Body += Text[Pos++];
      }
      Body += Text[Pos++];
    }
    if (Pos >= Text.size() || Text[Pos] != Quote)
      throw ParseFailure{Start,
                         Quote == '"' ? "unterminated string literal"
                                      : "unterminated character literal",
                         Severity::Error};
    ++Pos;
    return Body;
  }

  std::string lexPunct() {
    for (std::string_view P : Puncts)
      if (Text.compare(Pos, P.size(), P) == 0) {
        Pos += P.size();
        return std::string(P);
      }
    return std::string(1, Text[Pos++]);
  }

  const std::string &Text;
  std::size_t Pos = 0;
};

/// True if a printf/scanf format literal contains a conversion specifier.
bool hasConversionSpecifier(std::string_view Format) {
  for (std::size_t I = 0; I < Format.size(); ++I) {
    if (Format[I] != '%')
      continue;
    if (I + 1 < Format.size() && Format[I + 1] == '%') {
      ++I;
      continue;
    }
    std::size_t J = I + 1;
    while (J < Format.size() &&
           std::string_view("-+ #0123456789.*hlLqjzt").find(Format[J]) !=
               std::string_view::npos)
      ++J;
    if (J < Format.size() &&
        std::string_view("diouxXeEfFgGaAcspn[").find(Format[J]) !=
            std::string_view::npos)
      return true;
  }
  return false;
}

NodePtr op(std::string_view Name) {
  return AstNode::leaf(NodeKind::Operator, std::string(Name));
}

NodePtr binary(std::string_view OpName, NodePtr L, NodePtr R) {
  return AstNode::branch(NodeKind::Binary, {{Role::Op, op(OpName)},
                                            {Role::BExpr1, std::move(L)},
                                            {Role::BExpr2, std::move(R)}});
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

bool isLValue(const AstNode &N) {
  if (N.kind() == NodeKind::Ident)
    return true;
  if (N.kind() != NodeKind::Binary)
    return false;
  for (const Edge &E : N.children())
    if (E.role == Role::Op)
      return E.node->value() == "Array Index";
  return false;
}

class CParser {
public:
  explicit CParser(std::vector<Token> Toks) : Toks(std::move(Toks)) {}

  CompilationUnit parseUnit() {
    std::vector<Edge> Top;
    while (peek().kind != Tok::End)
      parseExternal(Top);
    CompilationUnit CU;
    CU.root = AstNode::branch(NodeKind::CompUnit, std::move(Top));
    CU.symbols = std::move(Syms).take();
    CU.language = Language::C;
    return CU;
  }

private:
  //===--------------------------------------------------------------------===//
  // Token helpers
  //===--------------------------------------------------------------------===//

  const Token &peek(std::size_t Ahead = 0) const {
    std::size_t I = std::min(Pos + Ahead, Toks.size() - 1);
    return Toks[I];
  }
  const Token &next() {
    const Token &T = Toks[Pos];
    if (T.kind != Tok::End)
      ++Pos;
    return T;
  }
  bool isPunct(std::string_view P, std::size_t Ahead = 0) const {
    return peek(Ahead).kind == Tok::Punct && peek(Ahead).text == P;
  }
  bool isKeyword(std::string_view K) const {
    return peek().kind == Tok::Keyword && peek().text == K;
  }
  bool consumePunct(std::string_view P) {
    if (!isPunct(P))
      return false;
    ++Pos;
    return true;
  }
  void expectPunct(std::string_view P) {
    if (!consumePunct(P))
      fail(peek(), "expected '" + std::string(P) + "'" + found(peek()));
  }
  std::string expectIdent() {
    if (peek().kind != Tok::Ident)
      fail(peek(), "expected identifier" + found(peek()));
    return next().text;
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
    fail(T, What + " is outside the supported C subset", Severity::Unsupported);
  }

  //===--------------------------------------------------------------------===//
  // Declarations
  //===--------------------------------------------------------------------===//

  bool atTypeSpecifier() const {
    const Token &T = peek();
    if (T.kind != Tok::Keyword)
      return false;
    if (T.text == "struct" || T.text == "union" || T.text == "enum" ||
        T.text == "typedef")
      return true;
    return TypeKeywords.count(T.text) > 0;
  }

  void parseTypeSpecifiers() {
    bool Any = false;
    while (peek().kind == Tok::Keyword) {
      const Token &T = peek();
      if (T.text == "struct" || T.text == "union" || T.text == "enum" ||
          T.text == "typedef")
        unsupported(T, "'" + T.text + "'");
      if (!TypeKeywords.count(T.text))
        break;
      ++Pos;
      Any = true;
    }
    if (!Any)
      fail(peek(), "expected a type specifier" + found(peek()));
  }

  void rejectPointer() {
    if (isPunct("*"))
      unsupported(peek(), "pointer declarator");
  }

  void parseExternal(std::vector<Edge> &Top) {
    if (consumePunct(";"))
      return;
    parseTypeSpecifiers();
    rejectPointer();
    const Token &NameTok = peek();
    std::string Name = expectIdent();
    if (isPunct("(")) {
      if (Syms.find(Name, SymbolCategory::Variable))
        fail(NameTok, "'" + Name + "' redeclared as a function");
      Syms.intern(Name, SymbolCategory::Function);
      parseParameters();
      if (consumePunct(";"))
        return;
      if (!isPunct("{"))
        fail(peek(), "expected function body" + found(peek()));
      NodePtr Body = parseBlock();
      Top.push_back({Role::HasDirective,
                     AstNode::branch(NodeKind::Func, {{Role::HasStmt, Body}})});
      return;
    }
    for (const NodePtr &D : parseDeclaratorList(NameTok, std::move(Name)))
      Top.push_back({Role::HasStmt, D});
  }

  void parseParameters() {
    expectPunct("(");
    if (consumePunct(")"))
      return;
    if (isKeyword("void") && isPunct(")", 1)) {
      Pos += 2;
      return;
    }
    while (true) {
      if (isPunct("..."))
        unsupported(peek(), "variadic parameter list");
      parseTypeSpecifiers();
      rejectPointer();
      const Token &NameTok = peek();
      std::string Name = expectIdent();
      declareVariable(NameTok, Name);
      if (consumePunct("[")) {
        if (!isPunct("]"))
          parseExpression();
        expectPunct("]");
      }
      if (consumePunct(")"))
        return;
      expectPunct(",");
    }
  }

  void declareVariable(const Token &At, const std::string &Name) {
    if (Syms.find(Name, SymbolCategory::Function))
      fail(At, "'" + Name + "' redeclared as a variable");
    Syms.intern(Name, SymbolCategory::Variable);
  }

  /// Rest of a declaration whose first declarator name was already read.
  /// Returns one Decl node per initialized declarator.
  std::vector<NodePtr> parseDeclaratorList(const Token &FirstTok,
                                           std::string FirstName) {
    std::vector<NodePtr> Out;
    const Token *NameTok = &FirstTok;
    std::string Name = std::move(FirstName);
    while (true) {
      declareVariable(*NameTok, Name);
      if (consumePunct("[")) {
        if (!isPunct("]"))
          parseExpression();
        expectPunct("]");
        if (isPunct("["))
          unsupported(peek(), "multi-dimensional array");
      }
      if (consumePunct("=")) {
        if (isPunct("{"))
          unsupported(peek(), "brace initializer");
        NodePtr Init = parseAssignment();
        Out.push_back(AstNode::branch(
            NodeKind::Decl,
            {{Role::LhsExpr,
              AstNode::leaf(NodeKind::Ident, varRendering(Name))},
             {Role::RhsExpr, std::move(Init)}}));
      }
      if (consumePunct(";"))
        return Out;
      expectPunct(",");
      rejectPointer();
      NameTok = &peek();
      Name = expectIdent();
    }
  }

  std::vector<NodePtr> parseLocalDeclaration() {
    parseTypeSpecifiers();
    rejectPointer();
    const Token &NameTok = peek();
    std::string Name = expectIdent();
    if (isPunct("("))
      unsupported(NameTok, "local function declaration");
    return parseDeclaratorList(NameTok, std::move(Name));
  }

  //===--------------------------------------------------------------------===//
  // Statements
  //===--------------------------------------------------------------------===//

  /// `{ ... }` lowers to Block -> Compstmt -> statements.
  NodePtr parseBlock() {
    expectPunct("{");
    std::vector<NodePtr> Stmts;
    while (!isPunct("}")) {
      if (peek().kind == Tok::End)
        fail(peek(), "expected '}'" + found(peek()));
      for (NodePtr &S : parseStatement())
        Stmts.push_back(std::move(S));
    }
    expectPunct("}");
    return AstNode::branch(NodeKind::Block,
                           {{Role::HasStmt, compound(Stmts)}});
  }

  /// A statement in a position that needs exactly one node.
  NodePtr parseSubStatement() {
    std::vector<NodePtr> S = parseStatement();
    if (S.size() == 1)
      return S.front();
    return compound(S);
  }

  std::vector<NodePtr> parseStatement() {
    const Token &T = peek();
    if (isPunct("{"))
      return {parseBlock()};
    if (consumePunct(";"))
      return {};
    if (T.kind == Tok::Keyword) {
      if (T.text == "if")
        return {parseIf()};
      if (T.text == "while")
        return {parseWhile()};
      if (T.text == "for")
        return {parseFor()};
      if (T.text == "return")
        return {parseReturn()};
      if (T.text == "do" || T.text == "switch" || T.text == "case" ||
          T.text == "default" || T.text == "break" || T.text == "continue" ||
          T.text == "goto")
        unsupported(T, "'" + T.text + "' statement");
      if (atTypeSpecifier())
        return parseLocalDeclaration();
    }
    NodePtr E = parseExpression();
    expectStatementEnd();
    return {exprStmt(std::move(E))};
  }

  void expectStatementEnd() {
    if (isPunct(","))
      unsupported(peek(), "comma operator");
    expectPunct(";");
  }

  NodePtr parseCondition() {
    expectPunct("(");
    NodePtr C = parseExpression();
    if (isPunct(","))
      unsupported(peek(), "comma operator");
    expectPunct(")");
    return C;
  }

  NodePtr parseIf() {
    ++Pos;
    NodePtr Cond = parseCondition();
    NodePtr Then = parseSubStatement();
    std::vector<Edge> Children{{Role::CondExpr, std::move(Cond)},
                               {Role::ThenStmt, std::move(Then)}};
    if (isKeyword("else")) {
      ++Pos;
      Children.push_back({Role::ElseStmt, parseSubStatement()});
    }
    return AstNode::branch(NodeKind::Ifthen, std::move(Children));
  }

  NodePtr parseWhile() {
    ++Pos;
    NodePtr Cond = parseCondition();
    NodePtr Body = parseSubStatement();
    return AstNode::branch(NodeKind::Whilestmt,
                           {{Role::CondExpr, std::move(Cond)},
                            {Role::BodyStmt, std::move(Body)}});
  }

  NodePtr parseFor() {
    ++Pos;
    expectPunct("(");
    std::vector<Edge> Children;
    if (atTypeSpecifier()) {
      std::vector<NodePtr> Decls = parseLocalDeclaration();
      if (Decls.size() > 1)
        unsupported(peek(), "multiple initialized declarators in for");
      if (!Decls.empty())
        Children.push_back({Role::InitStmt, Decls.front()});
    } else {
      if (!isPunct(";"))
        Children.push_back({Role::InitStmt, exprStmt(parseExpression())});
      expectStatementEnd();
    }
    if (!isPunct(";"))
      Children.push_back({Role::CondExpr, parseExpression()});
    expectStatementEnd();
    if (!isPunct(")")) {
      Children.push_back({Role::IncrStmt, exprStmt(parseExpression())});
      if (isPunct(","))
        unsupported(peek(), "comma operator");
    }
    expectPunct(")");
    Children.push_back({Role::BodyStmt, parseSubStatement()});
    return AstNode::branch(NodeKind::Forstmt, std::move(Children));
  }

  NodePtr parseReturn() {
    ++Pos;
    std::vector<Edge> Children;
    if (!isPunct(";"))
      Children.push_back({Role::ReturnExpr, parseExpression()});
    expectStatementEnd();
    return AstNode::branch(NodeKind::Returnstmt, std::move(Children));
  }

  //===--------------------------------------------------------------------===//
  // Expressions
  //===--------------------------------------------------------------------===//

  NodePtr parseExpression() { return parseAssignment(); }

  NodePtr parseAssignment() {
    const Token &Start = peek();
    NodePtr L = parseLogicalOr();
    if (isPunct("?"))
      unsupported(peek(), "conditional operator");
    static const std::pair<std::string_view, std::string_view> Compound[] = {
        {"+=", "+"}, {"-=", "-"}, {"*=", "*"}, {"/=", "/"}, {"%=", "%"}};
    if (isPunct("=")) {
      ++Pos;
      if (!isLValue(*L))
        fail(Start, "assignment to a non-lvalue");
      return assign(std::move(L), parseAssignment());
    }
    for (const auto &[Tok, Sym] : Compound) {
      if (!isPunct(Tok))
        continue;
      ++Pos;
      if (!isLValue(*L))
        fail(Start, "assignment to a non-lvalue");
      NodePtr R = parseAssignment();
      // x op= e is lowered to x = x op e.
      return assign(L, binary(*operatorName(Sym, OperatorArity::Binary), L,
                              std::move(R)));
    }
    if (isPunct("&=") || isPunct("|=") || isPunct("^=") || isPunct("<<=") ||
        isPunct(">>="))
      unsupported(peek(), "bitwise assignment");
    return L;
  }

  template <typename Sub>
  NodePtr parseBinaryLevel(std::initializer_list<std::string_view> Ops,
                           Sub SubParser) {
    NodePtr L = (this->*SubParser)();
    while (true) {
      const Token &T = peek();
      if (T.kind != Tok::Punct)
        return L;
      bool Matched = false;
      for (std::string_view O : Ops) {
        if (T.text != O)
          continue;
        ++Pos;
        NodePtr R = (this->*SubParser)();
        L = binary(*operatorName(O, OperatorArity::Binary), std::move(L),
                   std::move(R));
        Matched = true;
        break;
      }
      if (!Matched)
        return L;
    }
  }

  NodePtr parseLogicalOr() {
    return parseBinaryLevel({"||"}, &CParser::parseLogicalAnd);
  }
  NodePtr parseLogicalAnd() {
    return parseBinaryLevel({"&&"}, &CParser::parseBitwise);
  }
  NodePtr parseBitwise() {
    NodePtr E = parseEquality();
    if (isPunct("|") || isPunct("^") || isPunct("&"))
      unsupported(peek(), "bitwise operator '" + peek().text + "'");
    return E;
  }
  NodePtr parseEquality() {
    return parseBinaryLevel({"==", "!="}, &CParser::parseRelational);
  }
  NodePtr parseRelational() {
    return parseBinaryLevel({"<", "<=", ">", ">="}, &CParser::parseShift);
  }
  NodePtr parseShift() {
    NodePtr E = parseAdditive();
    if (isPunct("<<") || isPunct(">>"))
      unsupported(peek(), "shift operator");
    return E;
  }
  NodePtr parseAdditive() {
    return parseBinaryLevel({"+", "-"}, &CParser::parseMultiplicative);
  }
  NodePtr parseMultiplicative() {
    return parseBinaryLevel({"*", "/", "%"}, &CParser::parseUnary);
  }

  NodePtr parseUnary() {
    const Token &T = peek();
    if (T.kind == Tok::Keyword && T.text == "sizeof")
      unsupported(T, "'sizeof'");
    if (T.kind == Tok::Punct) {
      if (T.text == "&")
        unsupported(T, "address-of outside a call argument");
      if (T.text == "*")
        unsupported(T, "pointer dereference");
      if (T.text == "~")
        unsupported(T, "bitwise operator '~'");
      if (T.text == "-" || T.text == "+" || T.text == "!") {
        ++Pos;
        NodePtr E = parseUnary();
        return unary(*operatorName(T.text, OperatorArity::Unary),
                     std::move(E));
      }
      if (T.text == "++" || T.text == "--") {
        ++Pos;
        const Token &OperandTok = peek();
        NodePtr E = parseUnary();
        if (!isLValue(*E))
          fail(OperandTok, "increment of a non-lvalue");
        return unary(*operatorName(T.text, OperatorArity::Unary),
                     std::move(E));
      }
      if (T.text == "(" && peek(1).kind == Tok::Keyword &&
          TypeKeywords.count(peek(1).text))
        unsupported(T, "cast expression");
    }
    return parsePostfix();
  }

  NodePtr parsePostfix() {
    const Token &Start = peek();
    NodePtr E = parsePrimary();
    while (true) {
      if (isPunct("[")) {
        ++Pos;
        NodePtr Index = parseExpression();
        expectPunct("]");
        E = binary(*operatorName("[]", OperatorArity::Binary), std::move(E),
                   std::move(Index));
        continue;
      }
      if (isPunct("++") || isPunct("--")) {
        if (!isLValue(*E))
          fail(Start, "increment of a non-lvalue");
        std::string Key = "post" + next().text;
        E = unary(*operatorName(Key, OperatorArity::Unary), std::move(E));
        continue;
      }
      if (isPunct(".") || isPunct("->"))
        unsupported(peek(), "member access");
      if (isPunct("("))
        unsupported(peek(), "call through an expression");
      return E;
    }
  }

  NodePtr parsePrimary() {
    const Token &T = peek();
    switch (T.kind) {
    case Tok::Number:
      ++Pos;
      return AstNode::leaf(NodeKind::Literal, T.text);
    case Tok::Char:
      ++Pos;
      return AstNode::leaf(NodeKind::Literal, literalValue(T.text));
    case Tok::String:
      return AstNode::leaf(NodeKind::Literal, literalValue(parseStringRun()));
    case Tok::Ident:
      if (isPunct("(", 1))
        return parseCall();
      ++Pos;
      return identifierUse(T);
    case Tok::Punct:
      if (T.text == "(") {
        ++Pos;
        NodePtr E = parseExpression();
        if (isPunct(","))
          unsupported(peek(), "comma operator");
        expectPunct(")");
        return E;
      }
      break;
    default:
      break;
    }
    fail(T, "expected an expression" + found(T));
  }

  /// Adjacent string literals concatenate.
  std::string parseStringRun() {
    std::string S;
    while (peek().kind == Tok::String)
      S += next().text;
    return S;
  }

  static std::string literalValue(std::string V) {
    return V.empty() ? std::string("\"\"") : V;
  }

  NodePtr identifierUse(const Token &T) {
    if (Syms.find(T.text, SymbolCategory::Variable))
      return AstNode::leaf(NodeKind::Ident, varRendering(T.text));
    if (LibraryConstants.count(T.text))
      return AstNode::leaf(NodeKind::Literal, T.text);
    if (Syms.find(T.text, SymbolCategory::Function))
      unsupported(T, "function designator used as a value");
    fail(T, "use of undeclared identifier '" + T.text + "'");
  }

  NodePtr parseCall() {
    const Token &NameTok = next();
    const std::string &Name = NameTok.text;
    if (Syms.find(Name, SymbolCategory::Variable))
      fail(NameTok, "called object '" + Name + "' is not a function");
    Syms.intern(Name, SymbolCategory::Function);
    expectPunct("(");
    std::vector<NodePtr> Args;
    bool FirstIsString = false;
    if (!isPunct(")")) {
      while (true) {
        if (Args.empty())
          FirstIsString = peek().kind == Tok::String;
        Args.push_back(parseArgument());
        if (consumePunct(")"))
          break;
        expectPunct(",");
      }
    } else {
      ++Pos;
    }
    // scanf/printf lose their format string when it only carries
    // conversion specifiers for the remaining arguments.
    if ((Name == "scanf" || Name == "printf") && Args.size() > 1 &&
        FirstIsString && hasConversionSpecifier(Args.front()->value()))
      Args.erase(Args.begin());
    std::vector<Edge> Children{
        {Role::LiName, AstNode::leaf(NodeKind::Ident, Name)}};
    for (NodePtr &A : Args)
      Children.push_back({Role::LiParam, std::move(A)});
    return AstNode::branch(NodeKind::Call, std::move(Children));
  }

  NodePtr parseArgument() {
    if (isPunct("&")) {
      ++Pos;
      NodePtr E = parsePostfix();
      if (!isLValue(*E))
        unsupported(peek(), "address-of a non-lvalue");
      return unary(*operatorName("&", OperatorArity::Unary), std::move(E));
    }
    NodePtr E = parseAssignment();
    if (isPunct("?"))
      unsupported(peek(), "conditional operator");
    return E;
  }

  std::vector<Token> Toks;
  std::size_t Pos = 0;
  SymbolTable Syms;
};

} // namespace

ParseResult parseC(const SourceFile &Src) {
  ParseResult Result;
  detail::LineMap Lines(Src.text);
  try {
    bool Blank = true;
    for (char C : Src.text)
      if (!std::isspace(static_cast<unsigned char>(C)))
        Blank = false;
    if (Blank)
      throw ParseFailure{0, "empty source file", Severity::Error};
    Lexer L(Src.text);
    CParser P(L.lex());
    CompilationUnit CU = P.parseUnit();
    CU.sourceId = sourceIdFromPath(Src.path);
    Result.unit = std::move(CU);
  } catch (const ParseFailure &F) {
    auto [Line, Col] = Lines.locate(F.offset);
    Result.diagnostics.push_back({Line, Col, F.message, F.severity});
  }
  return Result;
}

} // namespace irclone
