//===--- acceptance.cpp - End-to-end acceptance checks ----------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
//
// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails.
//
//===----------------------------------------------------------------------===//

#include "irclone/dataset.h"
#include "irclone/eval.h"
#include "irclone/frontend.h"
#include "irclone/normalize.h"
#include "irclone/sbt.h"
#include "irclone/similarity.h"
#include "test_util.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

#include <sys/wait.h>

using namespace irclone;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point T) {
  return std::chrono::duration<double>(Clock::now() - T).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

CompilationUnit parsePath(const fs::path &P) {
  ParseResult R =
      parseSource({P.string(), readFile(P), true}, *languageFromPath(P));
  if (!R.ok())
    throw std::runtime_error(P.string() + ": " +
                             formatDiagnostic(P.string(), R.diagnostics[0]));
  return *R.unit;
}

std::string fmt(const char *Format, double A, double B = 0, double C = 0) {
  char Buf[256];
  std::snprintf(Buf, sizeof(Buf), Format, A, B, C);
  return Buf;
}

int runTool(const fs::path &Dir, const std::string &Args, std::string *Out) {
  std::string Cmd = "cd '" + Dir.string() + "' && '" IRCLONE_BINARY "' " +
                    Args + " > tool.out 2> tool.err";
  int Status = std::system(Cmd.c_str());
  if (Out)
    *Out = readFile(Dir / "tool.out");
  return WIFEXITED(Status) ? WEXITSTATUS(Status) : -1;
}

//===----------------------------------------------------------------------===//
// 1. Golden strings
//===----------------------------------------------------------------------===//

Outcome goldenStrings() {
  auto Start = Clock::now();
  fs::path G = test::fixtureDir() / "golden";
  bool Ok = true;
  std::string Detail;
  for (const auto &[Src, Want] :
       std::vector<std::pair<std::string, std::string>>{
           {"ac_c.c", "ac_c.expected"}, {"ac_cob.cob", "ac_cob.expected"}}) {
    NormalizeOptions O;
    O.mapping = &defaultMapping();
    std::string Got = stripWhitespace(
        render(linearize(normalizeUnit(parsePath(G / Src), O))));
    bool Match = Got == stripWhitespace(readFile(G / Want));
    Ok &= Match;
    Detail += Src + (Match ? " match; " : " MISMATCH; ");
  }
  double T = secondsSince(Start);
  Ok &= T < 1.0;
  return {Ok, Detail + fmt("%.3f s", T)};
}

//===----------------------------------------------------------------------===//
// 2. Random baseline
//===----------------------------------------------------------------------===//

Outcome randomBaseline() {
  struct Config {
    std::size_t pds, perPd, trials;
    double want, tol;
  };
  // The two large shapes run 1000 trials with a +/-50% relative tolerance.
  std::vector<Config> Configs = {{92, 3, 10000, 0.54, 0.10},
                                 {29, 2, 10000, 1.72, 0.20},
                                 {29, 300, 1000, 0.19, 0.19 * 0.5},
                                 {11, 100, 1000, 1.23, 1.23 * 0.5}};
  unsigned Jobs = std::max(1u, std::thread::hardware_concurrency());
  auto Dir = test::makeTempDir("accept-random");
  bool Ok = true;
  std::string Detail;
  auto Start = Clock::now();
  for (const Config &C : Configs) {
    std::string Out;
    std::string Args = "-j " + std::to_string(Jobs) + " random-map --pds " +
                       std::to_string(C.pds) + " --per-pd " +
                       std::to_string(C.perPd) + " --trials " +
                       std::to_string(C.trials) + " --seed 0 --out r.json";
    if (runTool(Dir, Args, &Out) != 0) {
      Ok = false;
      Detail += "tool failed; ";
      continue;
    }
    double Mean = OrderedJson::parse(readFile(Dir / "r.json"))["mean"];
    bool In = std::fabs(Mean - C.want) <= C.tol + 1e-12;
    Ok &= In;
    Detail += std::to_string(C.pds) + "x" + std::to_string(C.perPd) +
              fmt(": %.3f (want %.2f +/- %.3f)", Mean, C.want, C.tol) +
              (In ? "; " : " OUT; ");
  }
  fs::remove_all(Dir);
  return {Ok, Detail + fmt("%.1f s", secondsSince(Start))};
}

//===----------------------------------------------------------------------===//
// 3. Metric oracle
//===----------------------------------------------------------------------===//

Outcome metricOracle() {
  Rng G(20240501);
  std::size_t Agree = 0, N = 600;
  for (std::size_t Inst = 0; Inst < N; ++Inst) {
    std::size_t Pds = 1 + G.below(6), Codes = 2 + G.below(4);
    std::size_t R = Codes - 1;
    std::map<std::string, std::string> Labels;
    std::vector<std::string> Ids;
    for (std::size_t P = 0; P < Pds; ++P)
      for (std::size_t C = 0; C < Codes; ++C) {
        std::string Id = std::to_string(P) + ":" + std::to_string(C);
        Labels[Id] = std::to_string(P);
        Ids.push_back(Id);
      }
    std::vector<QueryRanking> Rankings;
    for (const std::string &Q : Ids) {
      std::vector<std::string> Others;
      for (const std::string &Id : Ids)
        if (Id != Q)
          Others.push_back(Id);
      G.shuffle(Others);
      Rankings.push_back({Q, Others});
    }
    Agree += mapAtR(Rankings, Labels, R).map ==
             test::naiveMapAtR(Rankings, Labels, R);
  }
  return {Agree == N,
          std::to_string(Agree) + "/" + std::to_string(N) +
              " instances identical"};
}

//===----------------------------------------------------------------------===//
// 4. SBT round trip
//===----------------------------------------------------------------------===//

Outcome sbtRoundTrip() {
  Rng G(4242);
  std::size_t Ok = 0, N = 1000;
  for (std::size_t I = 0; I < N; ++I) {
    NodePtr T = test::randomTree(G);
    try {
      Ok += structurallyEqual(*T, *parseSbt(render(linearize(*T))));
    } catch (const SbtParseError &) {
    }
  }
  return {Ok == N, std::to_string(Ok) + "/" + std::to_string(N) +
                       " random trees round-trip"};
}

//===----------------------------------------------------------------------===//
// 5. Leakage
//===----------------------------------------------------------------------===//

SplitSpec randomSpec(Rng &G) {
  SplitSpec S;
  S.seed = G.next();
  S.trainValRatio = 0.5 + 0.45 * G.unit();
  if (G.below(2))
    S.maxTokenLen = 150 + G.below(300);
  for (std::size_t I = 0, N = 1 + G.below(2); I < N; ++I) {
    TestSplitSpec T;
    T.name = "Test-COBOL-" + std::to_string(I);
    T.codesPerPd = 2 + G.below(2);
    if (G.below(2))
      T.maxTokenLen = 150 + G.below(300);
    if (G.below(2))
      T.numPds = 1 + G.below(2);
    S.cobolTests.push_back(T);
  }
  for (std::size_t I = 0, N = G.below(3); I < N; ++I) {
    TestSplitSpec T;
    T.name = "Test-C-" + std::to_string(I);
    T.codesPerPd = 2 + G.below(3);
    S.cTests.push_back(T);
  }
  return S;
}

Outcome leakage() {
  Rng G(555);
  auto Root = test::makeTempDir("accept-leak");
  std::size_t Built = 0, Shortfalls = 0, Violations = 0;
  for (int I = 0; I < 100; ++I) {
    fs::path Corpus = Root / std::to_string(I);
    test::writeMiniCorpus(Corpus, test::randomCorpusShape(G, 6 + G.below(10)));
    SplitSpec Spec = randomSpec(G);
    IngestResult In = ingest(Corpus);
    FilterResult C = filterPds(In.pds, Language::C);
    FilterResult B = filterPds(In.pds, Language::Cobol);
    TokenLengthFn Len =
        [](const Submission &S) -> std::optional<std::size_t> {
      ParseResult R = parseSource({S.path.string(), readFile(S.path), true},
                                  S.language);
      if (!R.ok())
        return std::nullopt;
      return linearize(*R.unit->root).size();
    };
    SplitSet Set;
    try {
      Set = makeSplits(C.pds, B.pds, Spec, Len);
    } catch (const ShortfallError &) {
      ++Shortfalls;
      continue;
    }
    ++Built;
    std::set<std::string> CobolTestPds, TrainVal;
    auto Check = [&](const TestSplitSpec &T) {
      std::map<std::string, std::size_t> PerPd;
      for (const SplitEntry &E : Set.find(T.name)->entries)
        ++PerPd[E.pd];
      for (const auto &[Pd, N] : PerPd)
        Violations += N != T.R() + 1;
      return PerPd;
    };
    for (const TestSplitSpec &T : Spec.cobolTests)
      for (const auto &[Pd, N] : Check(T))
        CobolTestPds.insert(Pd);
    for (const TestSplitSpec &T : Spec.cTests)
      Check(T);
    for (const NamedSplit &S : Set.splits)
      if (S.name.rfind("Train-", 0) == 0 || S.name.rfind("Val-", 0) == 0)
        for (const SplitEntry &E : S.entries)
          TrainVal.insert(E.pd);
    for (const std::string &Pd : TrainVal)
      Violations += CobolTestPds.count(Pd);
  }
  fs::remove_all(Root);
  return {Violations == 0 && Built > 0,
          std::to_string(Built) + " corpora split, " +
              std::to_string(Shortfalls) + " shortfalls, " +
              std::to_string(Violations) + " violations"};
}

//===----------------------------------------------------------------------===//
// 6. Anonymization
//===----------------------------------------------------------------------===//

void collectIdents(const AstNode &N, std::vector<std::string> &Out) {
  if (N.kind() == NodeKind::Ident)
    Out.push_back(N.value());
  for (const Edge &E : N.children())
    collectIdents(*E.node, Out);
}

bool anonymizationHolds(const CompilationUnit &CU) {
  auto [Anon, Ledger] = anonymize(CU);
  std::set<std::pair<std::string, SymbolCategory>> Orig;
  std::set<std::string> Gen;
  for (const RenamePair &P : Ledger.pairs)
    if (!Orig.insert({P.original, P.category}).second ||
        !Gen.insert(P.generic).second)
      return false;
  std::vector<std::string> Before, After;
  collectIdents(*CU.root, Before);
  collectIdents(*Anon.root, After);
  if (Before.size() != After.size())
    return false;
  std::map<std::string, std::string> Fwd, Bwd;
  for (std::size_t I = 0; I < Before.size(); ++I) {
    if (Fwd.emplace(Before[I], After[I]).first->second != After[I] ||
        Bwd.emplace(After[I], Before[I]).first->second != Before[I])
      return false;
  }
  return nodeCensus(CU) == nodeCensus(Anon);
}

Outcome anonymization() {
  std::size_t Ok = 0, N = 0;
  for (const fs::path &P : test::allFixtureSources()) {
    ++N;
    Ok += anonymizationHolds(parsePath(P));
  }
  Rng G(777);
  for (int I = 0; I < 200; ++I) {
    ++N;
    ParseResult R = parseC({"gen.c", test::randomCProgram(G), true});
    Ok += R.ok() && anonymizationHolds(*R.unit);
  }
  return {Ok == N, std::to_string(Ok) + "/" + std::to_string(N) +
                       " programs (fixtures + 200 generated)"};
}

//===----------------------------------------------------------------------===//
// 7. Mapping
//===----------------------------------------------------------------------===//

Outcome mapping() {
  std::size_t Ok = 0, N = 0;
  for (const fs::path &P : test::allFixtureSources()) {
    CompilationUnit CU = parsePath(P);
    CompilationUnit Once = applyMapping(CU, defaultMapping());
    CompilationUnit Twice = applyMapping(Once, defaultMapping());
    ++N;
    Ok += render(linearize(*Once.root)) == render(linearize(*Twice.root)) &&
          Once.symbols == Twice.symbols;
  }
  std::set<std::string> Sources;
  for (const MappingEntry &E : defaultMapping().entries())
    Sources.insert(E.sources.begin(), E.sources.end());
  std::size_t Present = 0;
  const std::vector<std::string> Required = {
      "scanf", "printf", "strtok",  "," ,     "=",       "strlen",
      "strcat", "qsort", "fread",   "stdin",  "lsearch", "statistical",
      "%",      "round", "+",       "memset"};
  for (const std::string &T : Required)
    Present += Sources.count(T);
  return {Ok == N && Present == Required.size(),
          std::to_string(Ok) + "/" + std::to_string(N) +
              " fixtures idempotent; " + std::to_string(Present) + "/" +
              std::to_string(Required.size()) + " source tokens present"};
}

//===----------------------------------------------------------------------===//
// 8. Cross-language structural signal
//===----------------------------------------------------------------------===//

Outcome crossLanguage() {
  auto Start = Clock::now();
  NormalizeOptions O;
  O.anonymize = true;
  O.mapping = &defaultMapping();
  std::map<std::string, SparseVector> C, Cob;
  std::vector<LabeledItem> Split;
  std::vector<Embedding> Emb;
  for (const fs::path &P : test::pairedSources()) {
    std::string Stem = P.stem().string();
    std::string Name = Stem.substr(0, Stem.rfind('_'));
    CompilationUnit CU = normalizeUnit(parsePath(P), O);
    SparseVector V = embedSubtreeHash(*CU.root, 3);
    (CU.language == Language::C ? C : Cob)[Name] = V;
    Split.push_back({Name, Stem});
    Emb.push_back({Stem, V});
  }
  MapReport Rep = evaluate(Split, Emb);
  RandomMapResult Rand = randomMap(C.size(), 2, 1, 10000, 0);
  double Matched = 0, Mismatched = 0;
  std::size_t NM = 0, NX = 0;
  for (const auto &[A, VA] : C)
    for (const auto &[B, VB] : Cob) {
      if (A == B) {
        Matched += cosine(VA, VB);
        ++NM;
      } else {
        Mismatched += cosine(VA, VB);
        ++NX;
      }
    }
  Matched /= static_cast<double>(NM);
  Mismatched /= static_cast<double>(NX);
  double T = secondsSince(Start);
  bool Ok = C.size() >= 10 && C.size() == Cob.size() && Rep.map > Rand.mean &&
            Matched > Mismatched && T < 10.0;
  return {Ok, std::to_string(C.size()) + " pairs; MAP@1 " +
                  fmt("%.2f vs random %.2f; ", Rep.map, Rand.mean) +
                  fmt("cosine matched %.4f vs mismatched %.4f; %.2f s",
                      Matched, Mismatched, T)};
}

//===----------------------------------------------------------------------===//
// 9. Determinism
//===----------------------------------------------------------------------===//

std::map<std::string, std::string> runPipeline(const fs::path &Dir) {
  std::vector<test::MiniPd> Pds;
  for (unsigned I = 0; I < 10; ++I)
    Pds.push_back({"q" + std::to_string(I),
                   true,
                   {1u + I, 2u + I, 3u, 4u},
                   I < 6 ? std::vector<unsigned>{2u, 3u + I, 4u}
                         : std::vector<unsigned>{},
                   {}});
  test::writeMiniCorpus(Dir / "corpus", Pds);
  std::ofstream(Dir / "spec.json")
      << R"({"seed":7,"cobol_tests":[{"name":"Test-COBOL-MAP@2",)"
      << R"("codes_per_pd":3,"num_pds":4}],"c_tests":[{"name":"Test-C-MAP@3",)"
      << R"("codes_per_pd":4}]})";
  std::string Files;
  for (const auto &E : fs::recursive_directory_iterator(Dir / "corpus" / "data"))
    if (E.is_regular_file())
      Files += " 'corpus/data/" +
               fs::relative(E.path(), Dir / "corpus" / "data").string() + "'";
  if (runTool(Dir, "parse" + Files + " --out units", nullptr) != 0)
    throw std::runtime_error("step failed: parse");
  std::vector<std::string> Units;
  for (const auto &E : fs::directory_iterator(Dir / "units"))
    if (E.path().filename() != "run.json")
      Units.push_back("'units/" + E.path().filename().string() + "'");
  std::sort(Units.begin(), Units.end());
  std::string UnitArgs;
  for (const std::string &U : Units)
    UnitArgs += " " + U;
  std::vector<std::string> Steps = {
      "sbt" + UnitArgs + " --anonymize --out all.sbt",
      "split --corpus corpus --spec spec.json --out manifest.json",
      "pairs --manifest manifest.json --seed 3 --out pairs.jsonl",
      "embed all.sbt --backend subtree-hash --out hash.jsonl",
      "embed all.sbt --backend tfidf --out tfidf.jsonl",
      "eval --manifest manifest.json --split Test-COBOL-MAP@2 "
      "--embeddings hash.jsonl --out eval_hash.json",
      "eval --manifest manifest.json --split Test-COBOL-MAP@2 "
      "--embeddings tfidf.jsonl --out eval_tfidf.json"};
  std::map<std::string, std::string> Out;
  for (const std::string &S : Steps)
    if (runTool(Dir, S, nullptr) != 0)
      throw std::runtime_error("step failed: " + S + ": " +
                               readFile(Dir / "tool.err"));
  for (const auto &E : fs::recursive_directory_iterator(Dir)) {
    std::string Rel = fs::relative(E.path(), Dir).string();
    if (!E.is_regular_file() || Rel.rfind("corpus", 0) == 0 ||
        Rel.find("run.json") != std::string::npos || Rel.rfind("tool.", 0) == 0)
      continue;
    Out[Rel] = readFile(E.path());
  }
  return Out;
}

Outcome determinism() {
  auto A = test::makeTempDir("accept-det-a");
  auto B = test::makeTempDir("accept-det-b");
  Outcome R;
  try {
    auto OutA = runPipeline(A), OutB = runPipeline(B);
    std::size_t Same = 0;
    for (const auto &[Name, Text] : OutA)
      Same += OutB.count(Name) && OutB[Name] == Text;
    R.pass = Same == OutA.size() && OutA.size() == OutB.size() &&
             OutA.size() >= 8;
    R.detail = std::to_string(Same) + "/" + std::to_string(OutA.size()) +
               " outputs byte-identical";
  } catch (const std::exception &E) {
    R.detail = E.what();
  }
  fs::remove_all(A);
  fs::remove_all(B);
  return R;
}

} // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> Criteria = {
      {"golden SBT strings", goldenStrings},
      {"random baseline", randomBaseline},
      {"metric oracle", metricOracle},
      {"SBT round trip", sbtRoundTrip},
      {"split leakage", leakage},
      {"anonymization", anonymization},
      {"mapping", mapping},
      {"cross-language signal", crossLanguage},
      {"determinism", determinism}};
  int Failed = 0;
  for (std::size_t I = 0; I < Criteria.size(); ++I) {
    Outcome O;
    try {
      O = Criteria[I].second();
    } catch (const std::exception &E) {
      O = {false, std::string("exception: ") + E.what()};
    }
    Failed += !O.pass;
    std::printf("%s %zu %s: %s\n", O.pass ? "PASS" : "FAIL", I + 1,
                Criteria[I].first.c_str(), O.detail.c_str());
    std::fflush(stdout);
  }
  return Failed ? 1 : 0;
}
