//===--- sbt.cpp - Structure-based traversal --------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/sbt.h"

#include <cctype>

namespace irclone {

namespace {

void linearizeInto(const AstNode &N, std::vector<SbtToken> &Out) {
  if (N.isLeaf()) {
    Out.push_back({SbtTokenKind::Open, N.value()});
    Out.push_back({SbtTokenKind::Leaf, N.value()});
    Out.push_back({SbtTokenKind::Close, N.value()});
    return;
  }
  std::string Kind(kindName(N.kind()));
  Out.push_back({SbtTokenKind::Open, Kind});
  for (const Edge &E : N.children()) {
    std::string Role(roleName(E.role));
    Out.push_back({SbtTokenKind::Open, Role});
    linearizeInto(*E.node, Out);
    Out.push_back({SbtTokenKind::Close, Role});
  }
  Out.push_back({SbtTokenKind::Close, Kind});
}

bool isExprRole(Role R) {
  switch (R) {
  case Role::HasExpr:
  case Role::CondExpr:
  case Role::BExpr1:
  case Role::BExpr2:
  case Role::UExpr:
  case Role::LhsExpr:
  case Role::RhsExpr:
  case Role::LiName:
  case Role::LiParam:
  case Role::ReturnExpr:
  case Role::Op:
    return true;
  default:
    return false;
  }
}

NodeKind inferLeafKind(Role R, const std::string &Value) {
  if (R == Role::Op)
    return NodeKind::Operator;
  if (R == Role::LiName || varName(Value))
    return NodeKind::Ident;
  return NodeKind::Literal;
}

class TextParser {
public:
  explicit TextParser(std::string_view S) : S(S) {}

  NodePtr parse() {
    NodePtr Root = parseBranch();
    if (P != S.size())
      fail("trailing text after the root node");
    return Root;
  }

private:
  [[noreturn]] void fail(const std::string &Message) const {
    throw SbtParseError(Tok, Message);
  }

  void expectChar(char C) {
    if (P >= S.size() || S[P] != C)
      fail(std::string("expected '") + C + "'");
    ++P;
  }

  std::string_view peekName() const {
    std::size_t E = P;
    while (E < S.size() && S[E] != '(' && S[E] != ')')
      ++E;
    return S.substr(P, E - P);
  }

  void expectClose(std::string_view Name) {
    if (S.compare(P, 1 + Name.size(), ")" + std::string(Name)) != 0)
      fail("expected ')" + std::string(Name) + "'");
    P += 1 + Name.size();
    ++Tok;
  }

  NodePtr parseBranch() {
    expectChar('(');
    std::string_view Name = peekName();
    auto Kind = kindFromName(Name);
    if (!Kind)
      fail("unknown node kind '" + std::string(Name) + "'");
    if (isLeafKind(*Kind))
      fail("leaf kind '" + std::string(Name) + "' used as a node name");
    P += Name.size();
    ++Tok;
    std::vector<Edge> Children;
    while (P < S.size() && S[P] == '(') {
      ++P;
      std::string_view RoleText = peekName();
      auto R = roleFromName(RoleText);
      if (!R)
        fail("unknown role '" + std::string(RoleText) + "'");
      P += RoleText.size();
      ++Tok;
      Children.push_back({*R, parseChild(*R)});
      expectClose(RoleText);
    }
    expectClose(Name);
    return AstNode::branch(*Kind, std::move(Children));
  }

  NodePtr parseChild(Role R) {
    if (!isExprRole(R))
      return parseBranch();
    if (P >= S.size() || S[P] != '(')
      fail("expected '('");
    ++P;
    std::string_view Name = peekName();
    bool BranchLike = P + Name.size() < S.size() &&
                      S[P + Name.size()] == '(';
    --P;
    auto Kind = kindFromName(Name);
    if (BranchLike && Kind && !isLeafKind(*Kind)) {
      std::size_t SaveP = P, SaveTok = Tok;
      try {
        return parseBranch();
      } catch (const SbtParseError &) {
        P = SaveP;
        Tok = SaveTok;
      }
    }
    return parseLeaf(R);
  }

  /// A leaf "(v)v" is always followed by the closer of its role, which pins
  /// down the length of v even when v itself contains brackets.
  NodePtr parseLeaf(Role R) {
    std::string Term = ")" + std::string(roleName(R));
    std::size_t E = S.find(Term, P + 1);
    while (E != std::string_view::npos) {
      std::size_t Span = E - P;
      if (Span >= 4 && Span % 2 == 0) {
        std::size_t N = (Span - 2) / 2;
        std::string_view V = S.substr(P + 1, N);
        if (S[P + 1 + N] == ')' && S.substr(P + 2 + N, N) == V) {
          P = E;
          Tok += 3;
          std::string Value(V);
          return AstNode::leaf(inferLeafKind(R, Value), Value);
        }
      }
      E = S.find(Term, E + 1);
    }
    fail("malformed leaf under role '" + std::string(roleName(R)) + "'");
  }

  std::string_view S;
  std::size_t P = 0;
  std::size_t Tok = 0;
};

class TokenParser {
public:
  explicit TokenParser(const std::vector<SbtToken> &T) : T(T) {}

  NodePtr parse() {
    NodePtr Root = parseBranch();
    if (I != T.size())
      fail("trailing tokens after the root node");
    return Root;
  }

private:
  [[noreturn]] void fail(const std::string &Message) const {
    throw SbtParseError(I, Message);
  }

  const SbtToken &expect(SbtTokenKind K) {
    if (I >= T.size() || T[I].kind != K)
      fail("expected a " + std::string(tokenKindName(K)) + " token");
    return T[I++];
  }

  void expectClose(const std::string &Name) {
    const SbtToken &C = expect(SbtTokenKind::Close);
    if (C.text != Name) {
      --I;
      fail("close '" + C.text + "' does not match open '" + Name + "'");
    }
  }

  NodePtr parseBranch() {
    const SbtToken &Open = expect(SbtTokenKind::Open);
    auto Kind = kindFromName(Open.text);
    if (!Kind || isLeafKind(*Kind)) {
      --I;
      fail("'" + Open.text + "' is not a node kind");
    }
    std::vector<Edge> Children;
    while (I < T.size() && T[I].kind == SbtTokenKind::Open) {
      const SbtToken &RoleTok = T[I++];
      auto R = roleFromName(RoleTok.text);
      if (!R) {
        --I;
        fail("unknown role '" + RoleTok.text + "'");
      }
      Children.push_back({*R, parseChild(*R)});
      expectClose(RoleTok.text);
    }
    expectClose(Open.text);
    return AstNode::branch(*Kind, std::move(Children));
  }

  NodePtr parseChild(Role R) {
    if (I + 1 < T.size() && T[I].kind == SbtTokenKind::Open &&
        T[I + 1].kind == SbtTokenKind::Leaf) {
      const SbtToken &Open = T[I++];
      const SbtToken &Leaf = T[I++];
      if (Leaf.text != Open.text) {
        --I;
        fail("leaf value does not match its open token");
      }
      expectClose(Open.text);
      return AstNode::leaf(inferLeafKind(R, Leaf.text), Leaf.text);
    }
    return parseBranch();
  }

  const std::vector<SbtToken> &T;
  std::size_t I = 0;
};

} // namespace

std::vector<SbtToken> linearize(const AstNode &Root) {
  std::vector<SbtToken> Out;
  linearizeInto(Root, Out);
  return Out;
}

SbtSequence linearize(const CompilationUnit &CU) {
  return {linearize(*CU.root), CU.sourceId, CU.language};
}

std::string render(const std::vector<SbtToken> &Tokens) {
  std::string Out;
  for (const SbtToken &T : Tokens) {
    switch (T.kind) {
    case SbtTokenKind::Open:
      Out += '(';
      Out += T.text;
      break;
    case SbtTokenKind::Close:
      Out += ')';
      Out += T.text;
      break;
    case SbtTokenKind::Leaf:
      break;
    }
  }
  return Out;
}

NodePtr parseSbt(std::string_view Text) { return TextParser(Text).parse(); }

NodePtr parseSbtTokens(const std::vector<SbtToken> &Tokens) {
  return TokenParser(Tokens).parse();
}

bool isBalanced(const std::vector<SbtToken> &Tokens) {
  std::vector<const std::string *> Stack;
  for (std::size_t I = 0; I < Tokens.size(); ++I) {
    const SbtToken &T = Tokens[I];
    switch (T.kind) {
    case SbtTokenKind::Open:
      if (T.text.empty())
        return false;
      Stack.push_back(&T.text);
      break;
    case SbtTokenKind::Close:
      if (Stack.empty() || *Stack.back() != T.text)
        return false;
      Stack.pop_back();
      break;
    case SbtTokenKind::Leaf:
      if (T.text.empty() || I == 0 || I + 1 >= Tokens.size() ||
          Tokens[I - 1].kind != SbtTokenKind::Open ||
          Tokens[I - 1].text != T.text ||
          Tokens[I + 1].kind != SbtTokenKind::Close ||
          Tokens[I + 1].text != T.text)
        return false;
      break;
    }
  }
  return Stack.empty();
}

std::vector<SbtToken> truncate(const std::vector<SbtToken> &Tokens,
                               std::size_t MaxTokens) {
  if (Tokens.size() <= MaxTokens)
    return Tokens;
  // Kinds and roles alternate, so an Open at odd depth is a role and an Open
  // directly followed by a Leaf is a leaf value.
  std::vector<std::size_t> Stack;
  std::size_t BestCut = 0;
  std::vector<std::size_t> BestStack;
  for (std::size_t I = 0; I < Tokens.size(); ++I) {
    const SbtToken &T = Tokens[I];
    bool Safe = false;
    if (T.kind == SbtTokenKind::Open) {
      bool IsRole = Stack.size() % 2 == 1;
      bool IsLeafOpen = I + 1 < Tokens.size() &&
                        Tokens[I + 1].kind == SbtTokenKind::Leaf;
      Stack.push_back(I);
      Safe = !IsRole && !IsLeafOpen;
    } else if (T.kind == SbtTokenKind::Close) {
      if (!Stack.empty())
        Stack.pop_back();
      Safe = true;
    }
    if (!Safe)
      continue;
    std::size_t Cut = I + 1;
    if (Cut + Stack.size() > MaxTokens)
      break;
    BestCut = Cut;
    BestStack = Stack;
  }
  if (BestCut == 0)
    return {};
  std::vector<SbtToken> Out(Tokens.begin(), Tokens.begin() + BestCut);
  for (auto It = BestStack.rbegin(); It != BestStack.rend(); ++It)
    Out.push_back({SbtTokenKind::Close, Tokens[*It].text});
  return Out;
}

Language inferLanguage(const AstNode &Root) {
  for (const Edge &E : Root.children()) {
    if (E.node->kind() != NodeKind::Func)
      continue;
    for (const Edge &Body : E.node->children())
      if (Body.node->kind() == NodeKind::Compstmt)
        return Language::Cobol;
    return Language::C;
  }
  return Language::C;
}

std::string stripWhitespace(std::string_view S) {
  std::string Out;
  Out.reserve(S.size());
  for (char C : S)
    if (!std::isspace(static_cast<unsigned char>(C)))
      Out += C;
  return Out;
}

std::string_view tokenKindName(SbtTokenKind K) {
  switch (K) {
  case SbtTokenKind::Open:
    return "open";
  case SbtTokenKind::Close:
    return "close";
  case SbtTokenKind::Leaf:
    return "leaf";
  }
  return "open";
}

OrderedJson sequenceToJson(const SbtSequence &Seq) {
  OrderedJson J;
  J["source_id"] = Seq.sourceId;
  J["language"] = std::string(languageName(Seq.language));
  OrderedJson Tokens = OrderedJson::array();
  for (const SbtToken &T : Seq.tokens) {
    OrderedJson TJ;
    TJ["t"] = std::string(tokenKindName(T.kind));
    TJ["v"] = T.text;
    Tokens.push_back(std::move(TJ));
  }
  J["tokens"] = std::move(Tokens);
  return J;
}

SbtSequence sequenceFromJson(const OrderedJson &J) {
  if (!J.is_object() || !J.contains("source_id") || !J.contains("tokens") ||
      !J["tokens"].is_array())
    throw std::runtime_error("token sequence needs 'source_id' and 'tokens'");
  SbtSequence Seq;
  Seq.sourceId = J["source_id"].get<std::string>();
  if (J.contains("language")) {
    auto L = languageFromName(J["language"].get<std::string>());
    if (!L)
      throw std::runtime_error("unknown language '" +
                               J["language"].get<std::string>() + "'");
    Seq.language = *L;
  }
  for (const OrderedJson &T : J["tokens"]) {
    std::string Kind = T.at("t").get<std::string>();
    SbtTokenKind K;
    if (Kind == "open")
      K = SbtTokenKind::Open;
    else if (Kind == "close")
      K = SbtTokenKind::Close;
    else if (Kind == "leaf")
      K = SbtTokenKind::Leaf;
    else
      throw std::runtime_error("unknown token type '" + Kind + "'");
    Seq.tokens.push_back({K, T.at("v").get<std::string>()});
  }
  return Seq;
}

std::string formatSbtLine(const SbtLine &L) { return L.id + "\t" + L.text; }

std::vector<SbtLine> parseSbtFile(std::string_view Contents) {
  std::vector<SbtLine> Out;
  std::size_t LineNo = 0, Begin = 0;
  while (Begin < Contents.size()) {
    std::size_t End = Contents.find('\n', Begin);
    if (End == std::string_view::npos)
      End = Contents.size();
    ++LineNo;
    std::string_view Line = Contents.substr(Begin, End - Begin);
    Begin = End + 1;
    if (!Line.empty() && Line.back() == '\r')
      Line.remove_suffix(1);
    if (Line.empty())
      continue;
    std::size_t Tab = Line.find('\t');
    if (Tab == std::string_view::npos || Tab == 0)
      throw std::runtime_error("line " + std::to_string(LineNo) +
                               ": expected '<id>\\t<sbt>'");
    Out.push_back({std::string(Line.substr(0, Tab)),
                   std::string(Line.substr(Tab + 1))});
  }
  return Out;
}

} // namespace irclone
