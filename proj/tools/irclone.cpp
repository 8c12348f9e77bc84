//===--- irclone.cpp - Command-line driver ----------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Multiplexed driver: parse, sbt, split, pairs, embed, eval, random-map and
/// export-mapping. Exit codes: 0 success, 2 partial parse failure,
/// 3 configuration or shortfall, 4 backend protocol error.
///
//===----------------------------------------------------------------------===//

#include "irclone/dataset.h"
#include "irclone/eval.h"
#include "irclone/frontend.h"
#include "irclone/ir_json.h"
#include "irclone/normalize.h"
#include "irclone/sbt.h"
#include "irclone/similarity.h"
#include "irclone/support.h"

#include <CLI11.hpp>

#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

using namespace irclone;
namespace fs = std::filesystem;

namespace {

constexpr const char *ToolVersion = "0.1.0";

enum ExitCode { ExitOk = 0, ExitPartial = 2, ExitConfig = 3, ExitProtocol = 4 };

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Accepts either the INI/TOML key=value form or a JSON object whose nested
/// objects name subcommands.
class KeyValueOrJsonConfig : public CLI::ConfigTOML {
public:
  std::vector<CLI::ConfigItem> from_config(std::istream &Input) const override {
    std::string Text((std::istreambuf_iterator<char>(Input)),
                     std::istreambuf_iterator<char>());
    std::size_t First = Text.find_first_not_of(" \t\r\n");
    if (First == std::string::npos || Text[First] != '{') {
      std::istringstream In(Text);
      return CLI::ConfigTOML::from_config(In);
    }
    nlohmann::json J;
    try {
      J = nlohmann::json::parse(Text);
    } catch (const nlohmann::json::exception &E) {
      throw CLI::ConversionError("config", E.what());
    }
    std::vector<CLI::ConfigItem> Items;
    collect(J, {}, Items);
    return Items;
  }

private:
  static std::string scalar(const nlohmann::json &V) {
    if (V.is_string())
      return V.get<std::string>();
    if (V.is_boolean())
      return V.get<bool>() ? "true" : "false";
    return V.dump();
  }

  static void collect(const nlohmann::json &J,
                      const std::vector<std::string> &Parents,
                      std::vector<CLI::ConfigItem> &Out) {
    for (auto It = J.begin(); It != J.end(); ++It) {
      if (It->is_object()) {
        auto Sub = Parents;
        Sub.push_back(It.key());
        collect(*It, Sub, Out);
        continue;
      }
      CLI::ConfigItem Item;
      Item.parents = Parents;
      Item.name = It.key();
      if (It->is_array())
        for (const auto &V : *It)
          Item.inputs.push_back(scalar(V));
      else
        Item.inputs.push_back(scalar(*It));
      Out.push_back(std::move(Item));
    }
  }
};

std::string isoNow() {
  auto Now = std::chrono::system_clock::now();
  std::time_t T = std::chrono::system_clock::to_time_t(Now);
  std::tm Tm{};
  gmtime_r(&T, &Tm);
  char Buf[32];
  std::strftime(Buf, sizeof(Buf), "%Y-%m-%dT%H:%M:%SZ", &Tm);
  return Buf;
}

/// State shared by every subcommand for the run manifest.
struct RunContext {
  std::vector<std::string> commandLine;
  std::string startedAt;
  std::string configFile;
  std::string configEcho;
  OrderedJson seeds = OrderedJson::object();
  OrderedJson inputs = OrderedJson::array();
  OrderedJson details = OrderedJson::object();
  std::string manifestPath;
  bool manifestToStderr = true;

  void addInput(const fs::path &P) {
    OrderedJson J;
    J["path"] = P.string();
    std::error_code EC;
    if (fs::is_regular_file(P, EC))
      J["fnv1a64"] = fnvHex(readFile(P));
    else
      J["fnv1a64"] = nullptr;
    inputs.push_back(std::move(J));
  }

  void setOutput(const std::string &Out) {
    if (Out.empty())
      return;
    std::string Base = Out;
    while (Base.size() > 1 && Base.back() == '/')
      Base.pop_back();
    manifestPath = Base + ".run.json";
    manifestToStderr = false;
  }

  void emit(const std::string &Subcommand, const std::string &EffectiveConfig,
            int Exit) const {
    OrderedJson J;
    J["tool"] = "irclone";
    J["version"] = ToolVersion;
    J["command"] = Subcommand;
    J["command_line"] = commandLine;
    J["config_hash"] = fnvHex(Subcommand + "\n" + EffectiveConfig);
    J["config"] = EffectiveConfig;
    if (!configFile.empty()) {
      J["config_file"] = configFile;
      J["config_file_contents"] = configEcho;
    }
    J["seeds"] = seeds;
    J["inputs"] = inputs;
    J["details"] = details;
    J["exit_code"] = Exit;
    J["started_at"] = startedAt;
    J["finished_at"] = isoNow();
    if (manifestToStderr) {
      std::cerr << "run-manifest: " << J.dump() << "\n";
      return;
    }
    try {
      writeFileAtomic(manifestPath, J.dump(2) + "\n");
    } catch (const std::exception &E) {
      std::cerr << "irclone: cannot write run manifest: " << E.what() << "\n";
    }
  }
};

void writeOutput(const std::string &Out, const std::string &Data) {
  if (Out.empty() || Out == "-") {
    std::cout << Data;
    std::cout.flush();
    return;
  }
  writeFileAtomic(Out, Data);
}

Language parseLanguageFlag(std::string S) {
  for (char &C : S)
    C = static_cast<char>(std::toupper(static_cast<unsigned char>(C)));
  auto L = languageFromName(S);
  if (!L)
    throw ConfigError("unknown language '" + S + "'");
  return *L;
}

//===----------------------------------------------------------------------===//
// Loading units from IR JSON or source files
//===----------------------------------------------------------------------===//

struct LoadedUnit {
  std::optional<CompilationUnit> unit;
  std::vector<std::string> messages;
};

LoadedUnit loadUnit(const std::string &Path,
                    const std::optional<Language> &LangOverride) {
  LoadedUnit Out;
  fs::path P(Path);
  if (P.extension() == ".json") {
    try {
      Out.unit = parseUnit(readFile(P));
    } catch (const std::exception &E) {
      Out.messages.push_back(Path + ": " + E.what());
    }
    return Out;
  }
  std::optional<Language> Lang = LangOverride;
  if (!Lang)
    Lang = languageFromPath(P);
  if (!Lang) {
    Out.messages.push_back(Path + ": cannot infer language from extension");
    return Out;
  }
  SourceFile Src;
  Src.path = Path;
  try {
    Src.text = readFile(P);
  } catch (const std::exception &E) {
    Out.messages.push_back(Path + ": " + E.what());
    return Out;
  }
  ParseResult R = parseSource(Src, *Lang);
  for (const ParseDiagnostic &D : R.diagnostics)
    Out.messages.push_back(formatDiagnostic(Path, D));
  Out.unit = std::move(R.unit);
  return Out;
}

void checkUniqueIds(const std::vector<std::string> &Ids) {
  std::set<std::string> Seen;
  for (const std::string &Id : Ids)
    if (!Seen.insert(Id).second)
      throw ConfigError("duplicate source id '" + Id + "'");
}

//===----------------------------------------------------------------------===//
// Subcommands
//===----------------------------------------------------------------------===//

struct ParseOpts {
  std::vector<std::string> files;
  std::string lang;
  std::string out;
};

int runParse(const ParseOpts &O, unsigned Jobs, RunContext &Ctx) {
  std::optional<Language> Lang;
  if (!O.lang.empty())
    Lang = parseLanguageFlag(O.lang);
  for (const std::string &F : O.files)
    Ctx.addInput(F);
  if (!O.out.empty())
    Ctx.manifestPath = O.out + "/run.json", Ctx.manifestToStderr = false;

  std::vector<LoadedUnit> Units(O.files.size());
  parallelFor(O.files.size(), Jobs, [&](std::size_t I) {
    Units[I] = loadUnit(O.files[I], Lang);
  });

  std::vector<std::string> Ids;
  for (const LoadedUnit &U : Units)
    if (U.unit)
      Ids.push_back(U.unit->sourceId);
  checkUniqueIds(Ids);

  std::size_t Failed = 0;
  OrderedJson FailedList = OrderedJson::array();
  std::string Stdout;
  for (std::size_t I = 0; I < Units.size(); ++I) {
    for (const std::string &M : Units[I].messages)
      std::cerr << M << "\n";
    if (!Units[I].unit) {
      ++Failed;
      FailedList.push_back(O.files[I]);
      continue;
    }
    std::string Json = dumpUnit(*Units[I].unit);
    if (O.out.empty())
      Stdout += unitToJson(*Units[I].unit).dump() + "\n";
    else
      writeFileAtomic(fs::path(O.out) / (Units[I].unit->sourceId + ".json"),
                      Json + "\n");
  }
  std::cout << Stdout;
  if (!O.files.empty())
    std::cerr << "parsed " << (O.files.size() - Failed) << " of "
              << O.files.size() << " files\n";
  Ctx.details["parsed"] = O.files.size() - Failed;
  Ctx.details["failed"] = FailedList;
  return Failed ? ExitPartial : ExitOk;
}

struct SbtOpts {
  std::vector<std::string> files;
  std::string lang;
  bool anonymize = false;
  std::string map = "default";
  std::optional<std::size_t> maxTokens;
  std::string overflow = "keep";
  std::string format = "text";
  std::string ledger;
  std::string out;
};

int runSbt(const SbtOpts &O, unsigned Jobs, RunContext &Ctx) {
  std::optional<Language> Lang;
  if (!O.lang.empty())
    Lang = parseLanguageFlag(O.lang);
  if (O.overflow != "keep" && O.overflow != "drop" && O.overflow != "truncate")
    throw ConfigError("--overflow must be keep, drop or truncate");
  if (O.format != "text" && O.format != "jsonl")
    throw ConfigError("--format must be text or jsonl");
  if (O.maxTokens && *O.maxTokens == 0)
    throw ConfigError("--max-tokens must be positive");

  TokenMapping FileMapping;
  const TokenMapping *Mapping = nullptr;
  if (O.map == "default") {
    Mapping = &defaultMapping();
  } else if (O.map != "none") {
    FileMapping = loadMapping(O.map);
    Mapping = &FileMapping;
    Ctx.addInput(O.map);
  }
  for (const std::string &F : O.files)
    Ctx.addInput(F);
  Ctx.setOutput(O.out);

  struct Item {
    LoadedUnit loaded;
    std::optional<SbtSequence> seq;
    RenameLedger ledger;
  };
  std::vector<Item> Items(O.files.size());
  NormalizeOptions NO;
  NO.anonymize = O.anonymize;
  NO.mapping = Mapping;
  parallelFor(O.files.size(), Jobs, [&](std::size_t I) {
    Items[I].loaded = loadUnit(O.files[I], Lang);
    if (!Items[I].loaded.unit)
      return;
    CompilationUnit N =
        normalizeUnit(*Items[I].loaded.unit, NO, &Items[I].ledger);
    Items[I].seq = linearize(N);
  });

  std::vector<std::string> Ids;
  for (const Item &It : Items)
    if (It.seq)
      Ids.push_back(It.seq->sourceId);
  checkUniqueIds(Ids);

  std::string Output;
  OrderedJson Dropped = OrderedJson::array(), Truncated = OrderedJson::array();
  OrderedJson FailedList = OrderedJson::array();
  OrderedJson Ledgers = OrderedJson::object();
  std::size_t Written = 0;
  for (std::size_t I = 0; I < Items.size(); ++I) {
    Item &It = Items[I];
    for (const std::string &M : It.loaded.messages)
      std::cerr << M << "\n";
    if (!It.seq) {
      FailedList.push_back(O.files[I]);
      continue;
    }
    SbtSequence &Seq = *It.seq;
    if (O.anonymize)
      Ledgers[Seq.sourceId] = ledgerToJson(It.ledger);
    if (O.maxTokens && Seq.tokens.size() > *O.maxTokens) {
      if (O.overflow == "drop") {
        Dropped.push_back(Seq.sourceId);
        continue;
      }
      if (O.overflow == "truncate") {
        Seq.tokens = truncate(Seq.tokens, *O.maxTokens);
        Truncated.push_back(Seq.sourceId);
      }
    }
    ++Written;
    if (O.format == "text")
      Output += formatSbtLine({Seq.sourceId, render(Seq)}) + "\n";
    else
      Output += sequenceToJson(Seq).dump() + "\n";
  }
  writeOutput(O.out, Output);
  if (!O.ledger.empty())
    writeFileAtomic(O.ledger, Ledgers.dump(2) + "\n");
  if (!Dropped.empty())
    std::cerr << "dropped " << Dropped.size() << " over-limit sequences\n";
  if (!Truncated.empty())
    std::cerr << "truncated " << Truncated.size() << " over-limit sequences\n";
  Ctx.details["written"] = Written;
  Ctx.details["dropped"] = Dropped;
  Ctx.details["truncated"] = Truncated;
  Ctx.details["failed"] = FailedList;
  return FailedList.empty() ? ExitOk : ExitPartial;
}

struct SplitOpts {
  std::string corpus;
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::string out;
};

OrderedJson filterCounts(const FilterResult &F) {
  OrderedJson J;
  J["kept"] = F.pds.size();
  J["no_description"] = F.noDescription;
  J["no_accepted"] = F.noAccepted;
  J["single_code"] = F.singleCode;
  return J;
}

int runSplit(const SplitOpts &O, unsigned Jobs, RunContext &Ctx) {
  SplitSpec Spec = SplitSpec::defaults();
  if (!O.spec.empty()) {
    Ctx.addInput(O.spec);
    try {
      Spec = specFromJson(OrderedJson::parse(readFile(O.spec)));
    } catch (const OrderedJson::exception &E) {
      throw ConfigError(O.spec + ": " + E.what());
    }
  }
  if (O.seed)
    Spec.seed = *O.seed;
  validateSpec(Spec);
  Ctx.seeds["split"] = Spec.seed;
  Ctx.setOutput(O.out);

  IngestResult In = ingest(O.corpus, Jobs);
  FilterResult C = filterPds(In.pds, Language::C);
  FilterResult Cobol = filterPds(In.pds, Language::Cobol);
  std::cerr << "C: kept " << C.pds.size() << " PDs (no description "
            << C.noDescription << ", no accepted " << C.noAccepted
            << ", single code " << C.singleCode << ")\n";
  std::cerr << "COBOL: kept " << Cobol.pds.size() << " PDs (no description "
            << Cobol.noDescription << ", no accepted " << Cobol.noAccepted
            << ", single code " << Cobol.singleCode << ")\n";

  bool NeedLengths = Spec.maxTokenLen.has_value();
  for (const auto *Tests : {&Spec.cobolTests, &Spec.cTests})
    for (const TestSplitSpec &T : *Tests)
      NeedLengths |= T.maxTokenLen.has_value();

  std::map<std::string, std::optional<std::size_t>> Lengths;
  if (NeedLengths) {
    std::vector<const Submission *> All;
    for (const auto *F : {&C, &Cobol})
      for (const ProblemDescription &Pd : F->pds)
        for (const Submission &S : Pd.submissions)
          All.push_back(&S);
    std::vector<std::optional<std::size_t>> Counts(All.size());
    parallelFor(All.size(), Jobs, [&](std::size_t I) {
      SourceFile Src;
      Src.path = All[I]->path.string();
      Src.text = readFile(All[I]->path);
      ParseResult R = parseSource(Src, All[I]->language);
      if (R.unit)
        Counts[I] = linearize(*R.unit).tokens.size();
    });
    for (std::size_t I = 0; I < All.size(); ++I)
      Lengths[All[I]->path.string()] = Counts[I];
  }

  SplitSet Splits = makeSplits(
      C.pds, Cobol.pds, Spec,
      [&](const Submission &S) -> std::optional<std::size_t> {
        auto It = Lengths.find(S.path.string());
        return It == Lengths.end() ? std::nullopt : It->second;
      });
  writeOutput(O.out, manifestToJson(Splits, Spec).dump(2) + "\n");

  Ctx.details["filter_c"] = filterCounts(C);
  Ctx.details["filter_cobol"] = filterCounts(Cobol);
  Ctx.details["unknown_language_dirs"] = In.unknownLanguageDirs;
  Ctx.details["fallback_verdicts"] = In.fallbackVerdicts;
  OrderedJson Sizes = OrderedJson::object();
  for (const NamedSplit &S : Splits.splits)
    Sizes[S.name] = S.entries.size();
  Ctx.details["split_sizes"] = Sizes;
  return ExitOk;
}

SplitSet loadManifest(const std::string &Path) {
  try {
    return manifestFromJson(OrderedJson::parse(readFile(Path)));
  } catch (const OrderedJson::exception &E) {
    throw ConfigError(Path + ": " + E.what());
  }
}

const NamedSplit &findSplit(const SplitSet &S, const std::string &Name) {
  const NamedSplit *N = S.find(Name);
  if (!N)
    throw ConfigError("manifest has no split named '" + Name + "'");
  return *N;
}

struct PairsOpts {
  std::string manifest;
  std::string split = "Train-C-ALL";
  double negRatio = 1.0;
  std::optional<std::size_t> maxPositives;
  std::uint64_t seed = 0;
  std::string out;
};

int runPairs(const PairsOpts &O, RunContext &Ctx) {
  Ctx.addInput(O.manifest);
  Ctx.seeds["pairs"] = O.seed;
  Ctx.setOutput(O.out);
  SplitSet S = loadManifest(O.manifest);
  PairOptions PO;
  PO.negativesPerPositive = O.negRatio;
  PO.maxPositives = O.maxPositives;
  PO.seed = O.seed;
  std::vector<CodePair> Pairs = genPairs(findSplit(S, O.split).entries, PO);
  writeOutput(O.out, pairsToJsonl(Pairs));
  std::size_t Pos = 0;
  for (const CodePair &P : Pairs)
    Pos += P.label == 1;
  Ctx.details["positives"] = Pos;
  Ctx.details["negatives"] = Pairs.size() - Pos;
  return ExitOk;
}

struct EmbedOpts {
  std::vector<std::string> files;
  std::string backend = "subtree-hash";
  unsigned depth = 3;
  std::string out;
};

int runEmbed(const EmbedOpts &O, unsigned Jobs, RunContext &Ctx) {
  for (const std::string &F : O.files)
    Ctx.addInput(F);
  Ctx.setOutput(O.out);

  std::vector<SbtLine> Lines;
  for (const std::string &F : O.files) {
    try {
      for (SbtLine &L : parseSbtFile(readFile(F)))
        Lines.push_back(std::move(L));
    } catch (const std::runtime_error &E) {
      throw ConfigError(F + ": " + E.what());
    }
  }
  std::vector<std::string> Ids;
  for (const SbtLine &L : Lines)
    Ids.push_back(L.id);
  checkUniqueIds(Ids);

  std::vector<NodePtr> Trees(Lines.size());
  std::vector<std::string> Errors(Lines.size());
  parallelFor(Lines.size(), Jobs, [&](std::size_t I) {
    try {
      Trees[I] = parseSbt(Lines[I].text);
    } catch (const SbtParseError &E) {
      Errors[I] = Lines[I].id + ": " + E.what();
    }
  });
  for (const std::string &E : Errors)
    if (!E.empty())
      throw ConfigError(E);

  std::vector<Embedding> Out;
  if (O.backend == "subtree-hash") {
    if (O.depth == 0)
      throw ConfigError("--depth must be positive");
    Out.resize(Lines.size());
    parallelFor(Lines.size(), Jobs, [&](std::size_t I) {
      Out[I] = {Lines[I].id, embedSubtreeHash(*Trees[I], O.depth)};
    });
  } else {
    std::vector<SbtSequence> Seqs;
    for (std::size_t I = 0; I < Lines.size(); ++I)
      Seqs.push_back(
          {linearize(*Trees[I]), Lines[I].id, inferLanguage(*Trees[I])});
    if (O.backend == "tfidf")
      Out = embedTfidf(Seqs);
    else if (O.backend.rfind("external:", 0) == 0)
      Out = embedExternal(O.backend.substr(9), Seqs);
    else
      throw ConfigError("unknown backend '" + O.backend + "'");
  }
  writeOutput(O.out, embeddingsToJsonl(Out));
  Ctx.details["backend"] = O.backend;
  Ctx.details["embeddings"] = Out.size();
  return ExitOk;
}

struct EvalOpts {
  std::string manifest;
  std::string split;
  std::string embeddings;
  std::optional<std::size_t> R;
  std::string out;
};

int runEval(const EvalOpts &O, unsigned Jobs, RunContext &Ctx) {
  Ctx.addInput(O.manifest);
  Ctx.addInput(O.embeddings);
  Ctx.setOutput(O.out);
  SplitSet S = loadManifest(O.manifest);
  const NamedSplit &Split = findSplit(S, O.split);
  std::vector<LabeledItem> Items;
  for (const SplitEntry &E : Split.entries)
    Items.push_back({E.pd, E.id});
  std::vector<Embedding> Emb;
  try {
    Emb = embeddingsFromJsonl(readFile(O.embeddings));
  } catch (const ProtocolError &E) {
    throw ConfigError(O.embeddings + ": " + E.what());
  }
  MapReport Report = evaluate(Items, Emb, O.R ? O.R : Split.R, Jobs);
  Report.config["split"] = O.split;
  Report.config["manifest"] = O.manifest;
  Report.config["embeddings"] = O.embeddings;
  if (!O.out.empty())
    writeFileAtomic(O.out, reportToJson(Report).dump(2) + "\n");
  std::cout << reportSummary(Report) << "\n";
  Ctx.details["map"] = Report.map;
  Ctx.details["R"] = Report.R;
  Ctx.details["n_queries"] = Report.numQueries();
  return ExitOk;
}

struct RandomMapOpts {
  std::size_t pds = 0;
  std::size_t perPd = 0;
  std::optional<std::size_t> R;
  std::size_t trials = 10000;
  std::uint64_t seed = 0;
  std::string out;
};

int runRandomMap(const RandomMapOpts &O, unsigned Jobs, RunContext &Ctx) {
  Ctx.seeds["random_map"] = O.seed;
  Ctx.setOutput(O.out);
  if (O.perPd < 2)
    throw ConfigError("--per-pd must be at least 2");
  std::size_t R = O.R.value_or(O.perPd - 1);
  RandomMapResult Res = randomMap(O.pds, O.perPd, R, O.trials, O.seed, Jobs);
  double Expected = expectedRandomMap(O.pds, O.perPd, R);
  char Buf[160];
  std::snprintf(Buf, sizeof(Buf),
                "random MAP@R=%zu %.2f +/- %.2f over %zu trials "
                "(expected %.3f)\n",
                R, Res.mean, Res.stdErr, Res.trials, Expected);
  std::cout << Buf;
  OrderedJson J;
  J["pds"] = O.pds;
  J["per_pd"] = O.perPd;
  J["R"] = R;
  J["trials"] = Res.trials;
  J["seed"] = O.seed;
  J["mean"] = Res.mean;
  J["std_err"] = Res.stdErr;
  J["expected"] = Expected;
  if (!O.out.empty())
    writeFileAtomic(O.out, J.dump(2) + "\n");
  Ctx.details = J;
  return ExitOk;
}

int runExportMapping(const std::string &Out, RunContext &Ctx) {
  Ctx.setOutput(Out);
  writeOutput(Out, std::string(defaultMappingText()));
  return ExitOk;
}

} // namespace

int main(int Argc, char **Argv) {
  CLI::App App{"Cross-language code clone toolkit over a shared IR",
               "irclone"};
  App.require_subcommand(1);
  App.fallthrough();
  App.set_version_flag("--version", ToolVersion);
  App.config_formatter(std::make_shared<KeyValueOrJsonConfig>());
  CLI::Option *ConfigOpt =
      App.set_config("--config", "", "key=value or JSON configuration file");

  unsigned Jobs = 1;
  std::string RunManifest;
  App.add_option("-j,--jobs", Jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  App.add_option("--run-manifest", RunManifest,
                 "Where to write the run manifest");

  ParseOpts PO;
  auto *Parse = App.add_subcommand("parse", "Parse sources into IR JSON");
  Parse->add_option("files", PO.files, "Source files");
  Parse->add_option("--lang", PO.lang, "c or cobol (default: by extension)");
  Parse->add_option("--out", PO.out, "Output directory");

  SbtOpts SO;
  auto *Sbt = App.add_subcommand("sbt", "Normalize and linearize units");
  Sbt->add_option("files", SO.files, "IR JSON or source files");
  Sbt->add_option("--lang", SO.lang, "Language of source inputs");
  Sbt->add_flag("--anonymize", SO.anonymize, "Rename identifiers");
  Sbt->add_option("--map", SO.map, "default, none or a mapping TSV file")
      ->capture_default_str();
  Sbt->add_option("--max-tokens", SO.maxTokens, "Token limit");
  Sbt->add_option("--overflow", SO.overflow, "keep, drop or truncate")
      ->capture_default_str();
  Sbt->add_option("--format", SO.format, "text or jsonl")
      ->capture_default_str();
  Sbt->add_option("--ledger", SO.ledger, "Write rename ledgers here");
  Sbt->add_option("--out", SO.out, "Output .sbt file");

  SplitOpts SpO;
  auto *Split = App.add_subcommand("split", "Build dataset splits");
  Split->add_option("--corpus", SpO.corpus, "Corpus root")->required();
  Split->add_option("--spec", SpO.spec, "Split spec JSON");
  Split->add_option("--seed", SpO.seed, "Override the spec seed");
  Split->add_option("--out", SpO.out, "Manifest output");

  PairsOpts PaO;
  auto *Pairs = App.add_subcommand("pairs", "Generate labelled code pairs");
  Pairs->add_option("--manifest", PaO.manifest, "Split manifest")->required();
  Pairs->add_option("--split", PaO.split, "Split name")->capture_default_str();
  Pairs->add_option("--neg-ratio", PaO.negRatio, "Negatives per positive")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  Pairs->add_option("--max-positives", PaO.maxPositives, "Positive cap");
  Pairs->add_option("--seed", PaO.seed, "Sampling seed")->capture_default_str();
  Pairs->add_option("--out", PaO.out, "JSONL output");

  EmbedOpts EO;
  auto *Embed = App.add_subcommand("embed", "Embed SBT sequences");
  Embed->add_option("files", EO.files, ".sbt files")->required();
  Embed->add_option("--backend", EO.backend,
                    "tfidf, subtree-hash or external:<cmd>")
      ->capture_default_str();
  Embed->add_option("--depth", EO.depth, "Subtree depth")
      ->capture_default_str();
  Embed->add_option("--out", EO.out, "JSONL output");

  EvalOpts EvO;
  auto *Eval = App.add_subcommand("eval", "MAP@R of embeddings on a split");
  Eval->add_option("--manifest", EvO.manifest, "Split manifest")->required();
  Eval->add_option("--split", EvO.split, "Split name")->required();
  Eval->add_option("--embeddings", EvO.embeddings, "Embeddings JSONL")
      ->required();
  Eval->add_option("--R", EvO.R, "Override R");
  Eval->add_option("--out", EvO.out, "Report JSON output");

  RandomMapOpts RO;
  auto *Random = App.add_subcommand("random-map", "Random-ranking baseline");
  Random->add_option("--pds", RO.pds, "Problem descriptions")->required();
  Random->add_option("--per-pd", RO.perPd, "Codes per PD")->required();
  Random->add_option("--R", RO.R, "R (default per-pd - 1)");
  Random->add_option("--trials", RO.trials, "Trials")->capture_default_str();
  Random->add_option("--seed", RO.seed, "Seed")->capture_default_str();
  Random->add_option("--out", RO.out, "JSON output");

  std::string MapOut;
  auto *Export =
      App.add_subcommand("export-mapping", "Write the default token mapping");
  Export->add_option("--out", MapOut, "TSV output");

  RunContext Ctx;
  Ctx.startedAt = isoNow();
  for (int I = 0; I < Argc; ++I)
    Ctx.commandLine.push_back(Argv[I]);

  try {
    App.parse(Argc, Argv);
  } catch (const CLI::Success &E) {
    return App.exit(E);
  } catch (const CLI::ParseError &E) {
    App.exit(E);
    return ExitConfig;
  }

  CLI::App *Sub = App.get_subcommands().front();
  if (ConfigOpt->count()) {
    Ctx.configFile = ConfigOpt->as<std::string>();
    try {
      Ctx.configEcho = readFile(Ctx.configFile);
    } catch (const std::exception &) {
    }
  }

  int Exit = ExitOk;
  try {
    if (Sub == Parse)
      Exit = runParse(PO, Jobs, Ctx);
    else if (Sub == Sbt)
      Exit = runSbt(SO, Jobs, Ctx);
    else if (Sub == Split)
      Exit = runSplit(SpO, Jobs, Ctx);
    else if (Sub == Pairs)
      Exit = runPairs(PaO, Ctx);
    else if (Sub == Embed)
      Exit = runEmbed(EO, Jobs, Ctx);
    else if (Sub == Eval)
      Exit = runEval(EvO, Jobs, Ctx);
    else if (Sub == Random)
      Exit = runRandomMap(RO, Jobs, Ctx);
    else if (Sub == Export)
      Exit = runExportMapping(MapOut, Ctx);
  } catch (const ProtocolError &E) {
    std::cerr << "irclone: protocol error: " << E.what() << "\n";
    Exit = ExitProtocol;
  } catch (const ShortfallError &E) {
    std::cerr << "irclone: shortfall: " << E.what() << "\n";
    Exit = ExitConfig;
  } catch (const std::exception &E) {
    std::cerr << "irclone: " << E.what() << "\n";
    Exit = ExitConfig;
  }

  if (!RunManifest.empty()) {
    Ctx.manifestPath = RunManifest;
    Ctx.manifestToStderr = false;
  }
  Ctx.emit(Sub->get_name(), Sub->config_to_str(true, false), Exit);
  return Exit;
}
