//===--- normalize.cpp - Identifier anonymization and token mapping -------===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/normalize.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace irclone {

namespace {

const std::set<std::string, std::less<>> LibraryFunctions = {
    // stdio
    "printf", "scanf", "puts", "putchar", "getchar", "gets", "fgets", "fputs",
    "fprintf", "fscanf", "sprintf", "sscanf", "snprintf", "fopen", "fclose",
    "fread", "fwrite", "fflush", "getc", "putc", "fgetc", "fputc", "perror",
    "setvbuf",
    // stdlib
    "exit", "abs", "labs", "llabs", "atoi", "atol", "atoll", "atof", "strtol",
    "strtoll", "strtoul", "strtod", "malloc", "calloc", "realloc", "free",
    "qsort", "bsearch", "lsearch", "rand", "srand", "abort", "div",
    // string
    "strlen", "strcpy", "strncpy", "strcat", "strncat", "strcmp", "strncmp",
    "strchr", "strrchr", "strstr", "strtok", "memset", "memcpy", "memmove",
    "memcmp",
    // math
    "sqrt", "pow", "fabs", "floor", "ceil", "round", "sin", "cos", "tan",
    "exp", "log", "log10", "log2", "fmod", "fmax", "fmin", "hypot", "atan",
    "atan2", "asin", "acos", "trunc", "lround", "llround",
    // ctype
    "isdigit", "isalpha", "isalnum", "isspace", "isupper", "islower",
    "toupper", "tolower", "ispunct",
    // COBOL verbs and intrinsics as they appear in call position
    "ACCEPT", "DISPLAY", "ROUNDED", "LENGTH", "LENGTH OF",
    "STORED-CHAR-LENGTH", "COUNT", "STRING", "UNSTRING", "SORT", "READ",
    "SEARCH", "INITIALIZE", "ORD", "SUM", "INTO", "DELIMITED", "CONSOLE",
    "MOD", "REM", "ABS", "MAX", "MIN", "SQRT", "INTEGER", "INTEGER-PART",
    "NUMVAL", "NUMVAL-C", "REVERSE", "UPPER-CASE", "LOWER-CASE", "TRIM",
    "ORD-MAX", "ORD-MIN", "MEAN", "MEDIAN", "RANDOM", "FACTORIAL", "LOG",
    "LOG10", "EXP", "SIN", "COS", "TAN", "CHAR", "CURRENT-DATE", "RANGE",
    "VARIANCE", "STANDARD-DEVIATION", "ANNUITY", "PRESENT-VALUE"};

/// Pre-order walk that records first occurrences of Ident references.
void collectReferences(const AstNode &N,
                       std::vector<std::pair<std::string, SymbolCategory>> &Out,
                       std::set<std::pair<std::string, SymbolCategory>> &Seen) {
  if (N.kind() == NodeKind::Ident) {
    SymbolRef Ref = referencedSymbol(N);
    if (Seen.insert({Ref.name, Ref.category}).second)
      Out.push_back({Ref.name, Ref.category});
    return;
  }
  for (const Edge &E : N.children())
    collectReferences(*E.node, Out, Seen);
}

bool renameable(const Symbol &S) {
  if (S.category == SymbolCategory::Variable)
    return true;
  if (S.category == SymbolCategory::Function)
    return S.name != "main" && !isLibraryFunction(S.name);
  return false;
}

template <typename Fn>
NodePtr rewriteLeaves(const NodePtr &N, std::optional<Role> Incoming,
                      const Fn &F) {
  if (N->isLeaf()) {
    std::optional<std::string> V = F(*N, Incoming);
    if (!V || *V == N->value())
      return N;
    return N->withValue(std::move(*V));
  }
  std::vector<Edge> Children;
  Children.reserve(N->children().size());
  bool Changed = false;
  for (const Edge &E : N->children()) {
    NodePtr C = rewriteLeaves(E.node, E.role, F);
    Changed |= C != E.node;
    Children.push_back({E.role, std::move(C)});
  }
  return Changed ? N->withChildren(std::move(Children)) : N;
}

std::vector<std::string> splitAlternatives(std::string_view Field) {
  std::vector<std::string> Out;
  std::size_t Begin = 0;
  while (true) {
    std::size_t Bar = Field.find('|', Begin);
    std::string_view Part = Field.substr(
        Begin, Bar == std::string_view::npos ? Field.size() - Begin
                                             : Bar - Begin);
    Out.emplace_back(Part);
    if (Bar == std::string_view::npos)
      break;
    Begin = Bar + 1;
  }
  return Out;
}

std::string_view trim(std::string_view S) {
  while (!S.empty() && (S.front() == ' ' || S.front() == '\r'))
    S.remove_prefix(1);
  while (!S.empty() && (S.back() == ' ' || S.back() == '\r'))
    S.remove_suffix(1);
  return S;
}

} // namespace

//===----------------------------------------------------------------------===//
// Anonymization
//===----------------------------------------------------------------------===//

bool isLibraryFunction(std::string_view Name) {
  return LibraryFunctions.count(Name) > 0;
}

std::optional<std::string>
RenameLedger::genericFor(std::string_view Original,
                         SymbolCategory Category) const {
  for (const RenamePair &P : pairs)
    if (P.original == Original && P.category == Category)
      return P.generic;
  return std::nullopt;
}

std::pair<CompilationUnit, RenameLedger> anonymize(const CompilationUnit &CU) {
  std::vector<std::pair<std::string, SymbolCategory>> Order;
  std::set<std::pair<std::string, SymbolCategory>> Seen;
  collectReferences(*CU.root, Order, Seen);
  for (const Symbol &S : CU.symbols)
    if (Seen.insert({S.name, S.category}).second)
      Order.push_back({S.name, S.category});

  std::set<std::string, std::less<>> Taken;
  for (const Symbol &S : CU.symbols)
    Taken.insert(S.name);

  RenameLedger Ledger;
  std::map<std::pair<std::string, SymbolCategory>, std::string> Generic;
  unsigned NextVar = 1, NextFunc = 1;
  for (const auto &[Name, Category] : Order) {
    auto It = std::find_if(CU.symbols.begin(), CU.symbols.end(),
                           [&](const Symbol &S) {
                             return S.name == Name && S.category == Category;
                           });
    if (It == CU.symbols.end() || !renameable(*It))
      continue;
    bool IsVar = Category == SymbolCategory::Variable;
    unsigned &Counter = IsVar ? NextVar : NextFunc;
    std::string Candidate;
    do {
      Candidate = (IsVar ? "VAR" : "FUNC") + std::to_string(Counter++);
    } while (Taken.count(Candidate));
    Taken.insert(Candidate);
    Generic[{Name, Category}] = Candidate;
    Ledger.pairs.push_back({Name, Candidate, Category});
  }

  CompilationUnit Out = CU;
  Out.root = rewriteLeaves(
      CU.root, std::nullopt,
      [&](const AstNode &Leaf,
          std::optional<Role>) -> std::optional<std::string> {
        if (Leaf.kind() != NodeKind::Ident)
          return std::nullopt;
        SymbolRef Ref = referencedSymbol(Leaf);
        auto It = Generic.find({Ref.name, Ref.category});
        if (It == Generic.end())
          return std::nullopt;
        return Ref.category == SymbolCategory::Variable
                   ? varRendering(It->second)
                   : It->second;
      });
  for (Symbol &S : Out.symbols) {
    auto It = Generic.find({S.name, S.category});
    if (It != Generic.end())
      S.name = It->second;
  }
  return {std::move(Out), std::move(Ledger)};
}

OrderedJson ledgerToJson(const RenameLedger &L) {
  OrderedJson Out = OrderedJson::array();
  for (const RenamePair &P : L.pairs) {
    OrderedJson J;
    J["original"] = P.original;
    J["generic"] = P.generic;
    J["category"] = std::string(categoryName(P.category));
    Out.push_back(std::move(J));
  }
  return Out;
}

//===----------------------------------------------------------------------===//
// Token mapping
//===----------------------------------------------------------------------===//

std::string_view contextName(MappingContext C) {
  switch (C) {
  case MappingContext::CallName:
    return "call_name";
  case MappingContext::Operator:
    return "operator";
  case MappingContext::Literal:
    return "literal";
  case MappingContext::StreamName:
    return "stream_name";
  }
  return "call_name";
}

std::optional<MappingContext> contextFromName(std::string_view Name) {
  for (MappingContext C :
       {MappingContext::CallName, MappingContext::Operator,
        MappingContext::Literal, MappingContext::StreamName})
    if (contextName(C) == Name)
      return C;
  return std::nullopt;
}

std::string MappingEntry::sourceField() const {
  std::string Out;
  for (const std::string &S : sources) {
    if (!Out.empty())
      Out += '|';
    Out += S;
  }
  return Out;
}

TokenMapping TokenMapping::parse(std::string_view Text) {
  TokenMapping M;
  std::map<std::pair<std::string, MappingContext>, const MappingEntry *>
      BySource;
  std::size_t Begin = 0;
  unsigned LineNo = 0;
  auto Fail = [&](const std::string &Message) {
    throw MappingError("line " + std::to_string(LineNo) + ": " + Message);
  };
  // Reserve so pointers into Entries stay valid while rows are added.
  M.Entries.reserve(static_cast<std::size_t>(
      std::count(Text.begin(), Text.end(), '\n') + 1));
  while (Begin <= Text.size()) {
    std::size_t End = Text.find('\n', Begin);
    if (End == std::string_view::npos)
      End = Text.size();
    ++LineNo;
    std::string_view Line = Text.substr(Begin, End - Begin);
    Begin = End + 1;
    if (!Line.empty() && Line.back() == '\r')
      Line.remove_suffix(1);
    if (trim(Line).empty() || trim(Line).front() == '#')
      continue;

    std::vector<std::string_view> Cols;
    std::size_t C = 0;
    while (true) {
      std::size_t Tab = Line.find('\t', C);
      Cols.push_back(Line.substr(
          C, Tab == std::string_view::npos ? Line.size() - C : Tab - C));
      if (Tab == std::string_view::npos)
        break;
      C = Tab + 1;
    }
    if (Cols.size() < 3 || Cols.size() > 4)
      Fail("expected 3 or 4 tab-separated columns, found " +
           std::to_string(Cols.size()));

    MappingEntry E;
    E.line = LineNo;
    E.sources = splitAlternatives(trim(Cols[0]));
    E.targets = splitAlternatives(trim(Cols[1]));
    for (const std::string &S : E.sources)
      if (S.empty())
        Fail("empty source token");
    for (const std::string &T : E.targets)
      if (T.empty())
        Fail("empty target token");
    auto Ctx = contextFromName(trim(Cols[2]));
    if (!Ctx)
      Fail("unknown context '" + std::string(trim(Cols[2])) + "'");
    E.context = *Ctx;
    if (Cols.size() == 4) {
      std::string_view Flag = trim(Cols[3]);
      if (Flag == "inert")
        E.active = false;
      else if (Flag != "active")
        Fail("fourth column must be 'active' or 'inert'");
    }

    M.Entries.push_back(std::move(E));
    const MappingEntry &Added = M.Entries.back();
    for (const std::string &S : Added.sources) {
      auto [It, Inserted] = BySource.insert({{S, Added.context}, &Added});
      if (!Inserted && It->second->canonical() != Added.canonical())
        Fail("'" + S + "' in context " +
             std::string(contextName(Added.context)) +
             " already maps to '" + It->second->canonical() + "' (line " +
             std::to_string(It->second->line) + ")");
    }
  }
  return M;
}

std::optional<std::string> TokenMapping::lookup(std::string_view Value,
                                                MappingContext Context) const {
  for (const MappingEntry &E : Entries) {
    if (!E.active || E.context != Context)
      continue;
    for (const std::string &S : E.sources)
      if (S == Value)
        return E.canonical();
  }
  return std::nullopt;
}

std::vector<std::string> TokenMapping::sourceTokens() const {
  std::vector<std::string> Out;
  for (const MappingEntry &E : Entries) {
    std::string F = E.sourceField();
    if (std::find(Out.begin(), Out.end(), F) == Out.end())
      Out.push_back(std::move(F));
  }
  return Out;
}

std::string_view defaultMappingText() {
  static constexpr std::string_view Text =
      "# C token\tCOBOL token(s), canonical first\tcontext\tstate\n"
      "scanf\tACCEPT\tcall_name\n"
      "printf\tDISPLAY\tcall_name\n"
      "strtok\tUNSTRING\tcall_name\n"
      ",\tDELIMITED\tliteral\tinert\n"
      "=\tINTO\toperator\tinert\n"
      "strlen\tLENGTH OF|STORED-CHAR-LENGTH|COUNT\tcall_name\n"
      "strcat\tSTRING\tcall_name\n"
      "qsort\tSORT\tcall_name\n"
      "fread\tREAD\tcall_name\n"
      "stdin|stdout\tCONSOLE\tstream_name\n"
      "lsearch|bsearch\tSEARCH\tcall_name\n"
      "statistical\tORD\tcall_name\tinert\n"
      "%\tREM|MOD\toperator\n"
      "round\tROUNDED\tcall_name\n"
      "+\tSUM\toperator\tinert\n"
      "memset\tINITIALIZE\tcall_name\n";
  return Text;
}

const TokenMapping &defaultMapping() {
  static const TokenMapping M = TokenMapping::parse(defaultMappingText());
  return M;
}

TokenMapping loadMapping(const std::filesystem::path &Path) {
  std::ifstream In(Path, std::ios::binary);
  if (!In)
    throw MappingError("cannot read mapping file '" + Path.string() + "'");
  std::ostringstream SS;
  SS << In.rdbuf();
  try {
    return TokenMapping::parse(SS.str());
  } catch (const MappingError &E) {
    throw MappingError(Path.string() + ": " + E.what());
  }
}

CompilationUnit applyMapping(const CompilationUnit &CU, const TokenMapping &M) {
  if (CU.language != Language::C || M.empty())
    return CU;
  std::map<std::string, std::string> RenamedCalls;
  CompilationUnit Out = CU;
  Out.root = rewriteLeaves(
      CU.root, std::nullopt,
      [&](const AstNode &Leaf,
          std::optional<Role> Incoming) -> std::optional<std::string> {
        const std::string &V = Leaf.value();
        if (Leaf.kind() == NodeKind::Operator) {
          if (auto T = M.lookup(V, MappingContext::Operator))
            return T;
          if (auto Sym = operatorSymbol(V))
            return M.lookup(*Sym, MappingContext::Operator);
          return std::nullopt;
        }
        if (Leaf.kind() == NodeKind::Ident) {
          if (Incoming != Role::LiName)
            return std::nullopt;
          auto T = M.lookup(V, MappingContext::CallName);
          if (T)
            RenamedCalls[V] = *T;
          return T;
        }
        if (Incoming == Role::LiParam)
          if (auto T = M.lookup(V, MappingContext::StreamName))
            return T;
        return M.lookup(V, MappingContext::Literal);
      });

  if (!RenamedCalls.empty()) {
    std::vector<Symbol> Symbols;
    for (Symbol S : CU.symbols) {
      if (S.category == SymbolCategory::Function) {
        auto It = RenamedCalls.find(S.name);
        if (It != RenamedCalls.end())
          S.name = It->second;
      }
      bool Dup = std::any_of(Symbols.begin(), Symbols.end(),
                             [&](const Symbol &P) {
                               return P.name == S.name &&
                                      P.category == S.category;
                             });
      if (!Dup)
        Symbols.push_back(std::move(S));
    }
    Out.symbols = std::move(Symbols);
  }
  return Out;
}

CompilationUnit normalizeUnit(const CompilationUnit &CU,
                              const NormalizeOptions &Opts,
                              RenameLedger *Ledger) {
  CompilationUnit Out = CU;
  if (Opts.anonymize) {
    auto [Anon, L] = anonymize(CU);
    Out = std::move(Anon);
    if (Ledger)
      *Ledger = std::move(L);
  }
  if (Opts.mapping)
    Out = applyMapping(Out, *Opts.mapping);
  return Out;
}

} // namespace irclone
