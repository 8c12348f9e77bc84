//===--- dataset.cpp - Corpus ingestion, splits and pairs -------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/dataset.h"
#include "irclone/eval.h"
#include "irclone/frontend.h"
#include "irclone/support.h"

#include <cctype>
#include <cmath>
#include <set>

namespace fs = std::filesystem;

namespace irclone {

namespace {

std::string lower(std::string S) {
  for (char &C : S)
    C = static_cast<char>(std::tolower(static_cast<unsigned char>(C)));
  return S;
}

std::optional<Language> languageFromDir(const std::string &Name) {
  std::string L = lower(Name);
  if (L == "c")
    return Language::C;
  if (L == "cobol")
    return Language::Cobol;
  return std::nullopt;
}

std::vector<std::string> splitCsvLine(std::string_view Line) {
  std::vector<std::string> Out;
  std::string Field;
  bool Quoted = false;
  for (std::size_t I = 0; I < Line.size(); ++I) {
    char C = Line[I];
    if (Quoted) {
      if (C == '"' && I + 1 < Line.size() && Line[I + 1] == '"') {
        Field += '"';
        ++I;
      } else if (C == '"') {
        Quoted = false;
      } else {
        Field += C;
      }
    } else if (C == '"') {
      Quoted = true;
    } else if (C == ',') {
      Out.push_back(std::move(Field));
      Field.clear();
    } else if (C != '\r') {
      Field += C;
    }
  }
  Out.push_back(std::move(Field));
  return Out;
}

struct Verdict {
  std::string status;
  std::string language;
};

std::map<std::string, Verdict> readMetadata(const fs::path &P) {
  std::string Text;
  try {
    Text = readFile(P);
  } catch (const std::exception &E) {
    throw DatasetError(E.what());
  }
  std::map<std::string, Verdict> Out;
  std::size_t Begin = 0, LineNo = 0;
  std::optional<std::size_t> IdCol, StatusCol, LangCol;
  while (Begin < Text.size()) {
    std::size_t End = Text.find('\n', Begin);
    if (End == std::string::npos)
      End = Text.size();
    std::string_view Line(Text.data() + Begin, End - Begin);
    Begin = End + 1;
    ++LineNo;
    if (Line.find_first_not_of(" \t\r") == std::string_view::npos)
      continue;
    std::vector<std::string> Cols = splitCsvLine(Line);
    if (!IdCol) {
      for (std::size_t I = 0; I < Cols.size(); ++I) {
        if (Cols[I] == "submission_id")
          IdCol = I;
        else if (Cols[I] == "status")
          StatusCol = I;
        else if (Cols[I] == "language")
          LangCol = I;
      }
      if (!IdCol || !StatusCol)
        throw DatasetError(P.string() +
                           ": header needs submission_id and status columns");
      continue;
    }
    std::size_t Need = std::max(*IdCol, *StatusCol);
    if (LangCol)
      Need = std::max(Need, *LangCol);
    if (Cols.size() <= Need)
      throw DatasetError(P.string() + ":" + std::to_string(LineNo) +
                         ": too few columns");
    Out[Cols[*IdCol]] = {Cols[*StatusCol], LangCol ? Cols[*LangCol] : ""};
  }
  if (!IdCol)
    throw DatasetError(P.string() + ": empty metadata file");
  return Out;
}

bool hasContent(const fs::path &P) {
  std::error_code EC;
  if (!fs::is_regular_file(P, EC))
    return false;
  std::string Text = readFile(P);
  return std::any_of(Text.begin(), Text.end(), [](unsigned char C) {
    return !std::isspace(C);
  });
}

std::vector<fs::path> sortedEntries(const fs::path &Dir, bool Dirs) {
  std::vector<fs::path> Out;
  std::error_code EC;
  if (!fs::is_directory(Dir, EC))
    return Out;
  for (const fs::directory_entry &E : fs::directory_iterator(Dir)) {
    if (Dirs ? E.is_directory() : E.is_regular_file())
      Out.push_back(E.path());
  }
  std::sort(Out.begin(), Out.end());
  return Out;
}

} // namespace

//===----------------------------------------------------------------------===//
// Ingestion and filtering
//===----------------------------------------------------------------------===//

IngestResult ingest(const fs::path &Root, unsigned Jobs) {
  IngestResult Result;
  std::set<std::string> PdIds;
  for (const fs::path &D : sortedEntries(Root / "data", true))
    PdIds.insert(D.filename().string());
  for (const fs::path &F : sortedEntries(Root / "problem_descriptions", false))
    if (F.extension() == ".html")
      PdIds.insert(F.stem().string());

  struct Pending {
    std::size_t pd, sub;
  };
  std::vector<Pending> Fallback;
  for (const std::string &Id : PdIds) {
    ProblemDescription Pd;
    Pd.pdId = Id;
    Pd.descriptionPresent =
        hasContent(Root / "problem_descriptions" / (Id + ".html"));
    std::map<std::string, Verdict> Meta;
    fs::path MetaPath = Root / "metadata" / (Id + ".csv");
    bool HaveMeta = fs::exists(MetaPath);
    if (HaveMeta)
      Meta = readMetadata(MetaPath);
    for (const fs::path &LangDir : sortedEntries(Root / "data" / Id, true)) {
      auto Lang = languageFromDir(LangDir.filename().string());
      if (!Lang) {
        ++Result.unknownLanguageDirs;
        continue;
      }
      for (const fs::path &F : sortedEntries(LangDir, false)) {
        Submission S;
        S.sourceId = F.stem().string();
        S.language = *Lang;
        S.path = F;
        auto It = Meta.find(S.sourceId);
        if (It != Meta.end()) {
          S.accepted = It->second.status == "Accepted";
        } else {
          Fallback.push_back({Result.pds.size(), Pd.submissions.size()});
        }
        Pd.submissions.push_back(std::move(S));
      }
    }
    std::set<std::string> Seen;
    for (const Submission &S : Pd.submissions)
      if (!Seen.insert(S.sourceId).second)
        throw DatasetError("PD " + Id + " has two submissions with id '" +
                           S.sourceId + "'");
    Result.pds.push_back(std::move(Pd));
  }

  parallelFor(Fallback.size(), Jobs, [&](std::size_t I) {
    Submission &S = Result.pds[Fallback[I].pd].submissions[Fallback[I].sub];
    SourceFile Src{S.path.string(), readFile(S.path), true};
    S.accepted = parseSource(Src, S.language).ok();
  });
  Result.fallbackVerdicts = Fallback.size();
  return Result;
}

FilterResult filterPds(const std::vector<ProblemDescription> &Pds,
                       Language Lang) {
  FilterResult R;
  for (const ProblemDescription &Pd : Pds) {
    if (!Pd.descriptionPresent) {
      ++R.noDescription;
      continue;
    }
    ProblemDescription Kept{Pd.pdId, true, {}};
    for (const Submission &S : Pd.submissions)
      if (S.language == Lang && S.accepted)
        Kept.submissions.push_back(S);
    if (Kept.submissions.empty()) {
      ++R.noAccepted;
      continue;
    }
    if (Kept.submissions.size() < 2) {
      ++R.singleCode;
      continue;
    }
    R.pds.push_back(std::move(Kept));
  }
  return R;
}

//===----------------------------------------------------------------------===//
// Split specifications
//===----------------------------------------------------------------------===//

SplitSpec SplitSpec::defaults() {
  SplitSpec S;
  S.seed = 0;
  S.trainValRatio = 0.9;
  S.maxTokenLen = 512;
  S.cobolTests = {{"Test-COBOL-MAP@2", 3, std::nullopt, std::nullopt,
                   std::nullopt},
                  {"Test-COBOL-MAP@1", 2, 512, std::nullopt, std::nullopt}};
  S.cTests = {{"Test-C-MAP@299", 300, std::nullopt, std::nullopt,
               std::nullopt},
              {"Test-C-MAP@99", 100, 512, std::nullopt, std::nullopt}};
  return S;
}

namespace {

std::string trainName(std::optional<std::size_t> Limit) {
  return "Train-C-" + (Limit ? std::to_string(*Limit) : std::string("ALL"));
}

std::string valName(std::optional<std::size_t> Limit) {
  return "Val-C-" + (Limit ? std::to_string(*Limit) : std::string("ALL"));
}

OrderedJson optionalJson(const std::optional<std::size_t> &V) {
  return V ? OrderedJson(*V) : OrderedJson(nullptr);
}

std::optional<std::size_t> optionalFrom(const OrderedJson &J,
                                        const char *Key) {
  if (!J.contains(Key) || J[Key].is_null())
    return std::nullopt;
  return J[Key].get<std::size_t>();
}

OrderedJson testsToJson(const std::vector<TestSplitSpec> &Tests) {
  OrderedJson Out = OrderedJson::array();
  for (const TestSplitSpec &T : Tests) {
    OrderedJson J;
    J["name"] = T.name;
    J["codes_per_pd"] = T.codesPerPd;
    J["max_token_len"] = optionalJson(T.maxTokenLen);
    J["num_pds"] = optionalJson(T.numPds);
    J["min_codes"] = optionalJson(T.minCodes);
    Out.push_back(std::move(J));
  }
  return Out;
}

std::vector<TestSplitSpec> testsFromJson(const OrderedJson &J) {
  if (!J.is_array())
    throw DatasetError("test split lists must be arrays");
  std::vector<TestSplitSpec> Out;
  for (const OrderedJson &T : J) {
    if (!T.is_object() || !T.contains("name") || !T.contains("codes_per_pd"))
      throw DatasetError("test splits need 'name' and 'codes_per_pd'");
    TestSplitSpec S;
    S.name = T["name"].get<std::string>();
    S.codesPerPd = T["codes_per_pd"].get<std::size_t>();
    S.maxTokenLen = optionalFrom(T, "max_token_len");
    S.numPds = optionalFrom(T, "num_pds");
    S.minCodes = optionalFrom(T, "min_codes");
    Out.push_back(std::move(S));
  }
  return Out;
}

} // namespace

void validateSpec(const SplitSpec &S) {
  if (!(S.trainValRatio > 0.0 && S.trainValRatio < 1.0))
    throw DatasetError("train_val_ratio must lie strictly between 0 and 1");
  std::set<std::string> Names = {trainName(std::nullopt),
                                 valName(std::nullopt), "spec"};
  if (S.maxTokenLen) {
    Names.insert(trainName(S.maxTokenLen));
    Names.insert(valName(S.maxTokenLen));
  }
  for (const auto *List : {&S.cobolTests, &S.cTests}) {
    for (const TestSplitSpec &T : *List) {
      if (T.name.empty())
        throw DatasetError("test split without a name");
      if (!Names.insert(T.name).second)
        throw DatasetError("split name '" + T.name + "' is used twice");
      if (T.codesPerPd < 2)
        throw DatasetError("test split '" + T.name +
                           "' needs codes_per_pd >= 2");
      if (T.numPds && *T.numPds == 0)
        throw DatasetError("test split '" + T.name + "' has num_pds = 0");
    }
  }
}

OrderedJson specToJson(const SplitSpec &S) {
  OrderedJson J;
  J["seed"] = S.seed;
  J["train_val_ratio"] = S.trainValRatio;
  J["max_token_len"] = optionalJson(S.maxTokenLen);
  J["cobol_tests"] = testsToJson(S.cobolTests);
  J["c_tests"] = testsToJson(S.cTests);
  return J;
}

SplitSpec specFromJson(const OrderedJson &J) {
  if (!J.is_object())
    throw DatasetError("split spec must be a JSON object");
  SplitSpec S = SplitSpec::defaults();
  try {
    for (const auto &[Key, V] : J.items()) {
      if (Key == "seed")
        S.seed = V.get<std::uint64_t>();
      else if (Key == "train_val_ratio")
        S.trainValRatio = V.get<double>();
      else if (Key == "max_token_len")
        S.maxTokenLen = optionalFrom(J, "max_token_len");
      else if (Key == "cobol_tests")
        S.cobolTests = testsFromJson(V);
      else if (Key == "c_tests")
        S.cTests = testsFromJson(V);
      else
        throw DatasetError("unknown split spec field '" + Key + "'");
    }
  } catch (const nlohmann::json::exception &E) {
    throw DatasetError(std::string("malformed split spec: ") + E.what());
  }
  validateSpec(S);
  return S;
}

//===----------------------------------------------------------------------===//
// Splitting
//===----------------------------------------------------------------------===//

const NamedSplit *SplitSet::find(std::string_view Name) const {
  for (const NamedSplit &S : splits)
    if (S.name == Name)
      return &S;
  return nullptr;
}

namespace {

class Splitter {
public:
  Splitter(const SplitSpec &Spec, const TokenLengthFn &Lengths)
      : Spec(Spec), Lengths(Lengths) {}

  /// Accepted, parseable submissions of `Pd` that fit `Limit`, by id.
  std::vector<std::string> eligible(const ProblemDescription &Pd,
                                    Language Lang,
                                    std::optional<std::size_t> Limit) const {
    std::vector<std::string> Out;
    for (const Submission &S : Pd.submissions) {
      if (S.language != Lang || !S.accepted)
        continue;
      std::optional<std::size_t> Len;
      if (Lengths) {
        Len = Lengths(S);
        if (!Len)
          continue;
      } else if (Limit) {
        throw DatasetError("token length limits need token lengths");
      }
      if (Limit && *Len > *Limit)
        continue;
      Out.push_back(S.sourceId);
    }
    std::sort(Out.begin(), Out.end());
    return Out;
  }

  NamedSplit buildTest(const TestSplitSpec &T,
                       const std::vector<const ProblemDescription *> &Pool,
                       Language Lang, const std::string &PoolName) const {
    std::vector<std::pair<std::string, std::vector<std::string>>> Candidates;
    for (const ProblemDescription *Pd : Pool) {
      std::vector<std::string> Ids = eligible(*Pd, Lang, T.maxTokenLen);
      if (Ids.size() >= T.requiredCodes())
        Candidates.push_back({Pd->pdId, std::move(Ids)});
    }
    std::size_t Want = T.numPds.value_or(std::max<std::size_t>(
        1, Candidates.size()));
    if (Candidates.size() < Want)
      throw ShortfallError(
          "test split '" + T.name + "' needs " + std::to_string(Want) +
          " PDs with at least " + std::to_string(T.requiredCodes()) +
          " eligible " + std::string(languageName(Lang)) + " codes" +
          (T.maxTokenLen ? " of at most " + std::to_string(*T.maxTokenLen) +
                               " tokens"
                         : std::string()) +
          " among " + PoolName + ", found " +
          std::to_string(Candidates.size()));
    Rng G(deriveSeed(Spec.seed, fnv1a64(T.name)));
    std::vector<std::size_t> Order(Candidates.size());
    for (std::size_t I = 0; I < Order.size(); ++I)
      Order[I] = I;
    if (T.numPds)
      Order = G.sample(Order, Want);

    NamedSplit Out;
    Out.name = T.name;
    Out.R = T.R();
    Out.language = Lang;
    for (std::size_t I : Order) {
      const auto &[Pd, Ids] = Candidates[I];
      for (const std::string &Id : G.sample(Ids, T.codesPerPd))
        Out.entries.push_back({Pd, Id});
    }
    sortEntries(Out.entries);
    return Out;
  }

  static void sortEntries(std::vector<SplitEntry> &E) {
    std::sort(E.begin(), E.end(), [](const SplitEntry &A, const SplitEntry &B) {
      return std::tie(A.pd, A.id) < std::tie(B.pd, B.id);
    });
  }

  void addTrainVal(SplitSet &Out,
                   const std::vector<const ProblemDescription *> &Pool) const {
    std::vector<const ProblemDescription *> Shuffled = Pool;
    Rng G(deriveSeed(Spec.seed, fnv1a64("train/val")));
    G.shuffle(Shuffled);
    auto NTrain = static_cast<std::size_t>(std::floor(
        static_cast<double>(Shuffled.size()) * Spec.trainValRatio + 1e-9));
    std::vector<const ProblemDescription *> Train(Shuffled.begin(),
                                                  Shuffled.begin() + NTrain);
    std::vector<const ProblemDescription *> Val(Shuffled.begin() + NTrain,
                                                Shuffled.end());
    std::vector<std::optional<std::size_t>> Limits = {std::nullopt};
    if (Spec.maxTokenLen)
      Limits.push_back(Spec.maxTokenLen);
    for (std::optional<std::size_t> Limit : Limits) {
      for (bool IsTrain : {true, false}) {
        NamedSplit S;
        S.name = IsTrain ? trainName(Limit) : valName(Limit);
        for (const ProblemDescription *Pd : IsTrain ? Train : Val) {
          std::vector<std::string> Ids = eligible(*Pd, Language::C, Limit);
          // A PD contributes only if it can still form a positive pair.
          if (Ids.size() < 2)
            continue;
          for (std::string &Id : Ids)
            S.entries.push_back({Pd->pdId, std::move(Id)});
        }
        sortEntries(S.entries);
        Out.splits.push_back(std::move(S));
      }
    }
  }

private:
  const SplitSpec &Spec;
  const TokenLengthFn &Lengths;
};

std::vector<const ProblemDescription *>
sortedPointers(const std::vector<ProblemDescription> &Pds) {
  std::vector<const ProblemDescription *> Out;
  for (const ProblemDescription &Pd : Pds)
    Out.push_back(&Pd);
  std::sort(Out.begin(), Out.end(),
            [](const ProblemDescription *A, const ProblemDescription *B) {
              return A->pdId < B->pdId;
            });
  for (std::size_t I = 1; I < Out.size(); ++I)
    if (Out[I]->pdId == Out[I - 1]->pdId)
      throw DatasetError("PD '" + Out[I]->pdId + "' listed twice");
  return Out;
}

} // namespace

SplitSet makeSplits(const std::vector<ProblemDescription> &CPds,
                    const std::vector<ProblemDescription> &CobolPds,
                    const SplitSpec &Spec, const TokenLengthFn &Lengths) {
  validateSpec(Spec);
  Splitter S(Spec, Lengths);
  std::vector<const ProblemDescription *> C = sortedPointers(CPds);
  std::vector<const ProblemDescription *> Cobol = sortedPointers(CobolPds);

  std::vector<NamedSplit> CobolTests;
  std::set<std::string> HeldOut;
  for (const TestSplitSpec &T : Spec.cobolTests) {
    CobolTests.push_back(S.buildTest(T, Cobol, Language::Cobol, "COBOL PDs"));
    for (const SplitEntry &E : CobolTests.back().entries)
      HeldOut.insert(E.pd);
  }

  std::vector<const ProblemDescription *> Remaining, Shared;
  for (const ProblemDescription *Pd : C)
    (HeldOut.count(Pd->pdId) ? Shared : Remaining).push_back(Pd);

  SplitSet Out;
  S.addTrainVal(Out, Remaining);
  for (NamedSplit &T : CobolTests)
    Out.splits.push_back(std::move(T));
  for (const TestSplitSpec &T : Spec.cTests)
    Out.splits.push_back(
        S.buildTest(T, Shared, Language::C, "C PDs shared with COBOL tests"));
  return Out;
}

OrderedJson manifestToJson(const SplitSet &S, const SplitSpec &Spec) {
  OrderedJson J;
  J["spec"] = specToJson(Spec);
  for (const NamedSplit &N : S.splits) {
    OrderedJson List = OrderedJson::array();
    for (const SplitEntry &E : N.entries) {
      OrderedJson EJ;
      EJ["pd"] = E.pd;
      EJ["id"] = E.id;
      List.push_back(std::move(EJ));
    }
    J[N.name] = std::move(List);
  }
  return J;
}

SplitSet manifestFromJson(const OrderedJson &J) {
  if (!J.is_object())
    throw DatasetError("split manifest must be a JSON object");
  SplitSpec Spec = J.contains("spec") ? specFromJson(J["spec"])
                                      : SplitSpec::defaults();
  std::map<std::string, std::pair<std::size_t, Language>> Tests;
  for (const TestSplitSpec &T : Spec.cobolTests)
    Tests[T.name] = {T.R(), Language::Cobol};
  for (const TestSplitSpec &T : Spec.cTests)
    Tests[T.name] = {T.R(), Language::C};
  SplitSet Out;
  try {
    for (const auto &[Key, V] : J.items()) {
      if (Key == "spec")
        continue;
      NamedSplit N;
      N.name = Key;
      auto It = Tests.find(Key);
      if (It != Tests.end()) {
        N.R = It->second.first;
        N.language = It->second.second;
      }
      for (const OrderedJson &E : V)
        N.entries.push_back(
            {E.at("pd").get<std::string>(), E.at("id").get<std::string>()});
      Out.splits.push_back(std::move(N));
    }
  } catch (const nlohmann::json::exception &E) {
    throw DatasetError(std::string("malformed split manifest: ") + E.what());
  }
  return Out;
}

//===----------------------------------------------------------------------===//
// Pairs
//===----------------------------------------------------------------------===//

std::vector<CodePair> genPairs(const std::vector<SplitEntry> &Split,
                               const PairOptions &Opts) {
  if (Opts.negativesPerPositive < 0)
    throw DatasetError("negative ratio must be non-negative");
  std::vector<SplitEntry> Items = Split;
  std::sort(Items.begin(), Items.end(),
            [](const SplitEntry &A, const SplitEntry &B) {
              return std::tie(A.pd, A.id) < std::tie(B.pd, B.id);
            });
  std::set<std::string> Pds;
  for (std::size_t I = 0; I < Items.size(); ++I) {
    Pds.insert(Items[I].pd);
    if (I && Items[I].id == Items[I - 1].id && Items[I].pd == Items[I - 1].pd)
      throw DatasetError("id '" + Items[I].id + "' appears twice");
  }
  if (Pds.size() < 2)
    throw DatasetError("pair generation needs at least two PDs; got " +
                       std::to_string(Pds.size()));

  using IndexPair = std::pair<std::size_t, std::size_t>;
  std::vector<IndexPair> Positives;
  for (std::size_t I = 0; I < Items.size(); ++I)
    for (std::size_t J = I + 1; J < Items.size() && Items[J].pd == Items[I].pd;
         ++J)
      Positives.push_back({I, J});

  Rng G(deriveSeed(Opts.seed, fnv1a64("pairs")));
  if (Opts.maxPositives && *Opts.maxPositives < Positives.size()) {
    Positives = G.sample(Positives, *Opts.maxPositives);
    std::sort(Positives.begin(), Positives.end());
  }

  std::size_t N = Items.size();
  std::size_t AllPairs = N * (N - 1) / 2;
  std::size_t SamePd = 0;
  for (std::size_t I = 0; I < N;) {
    std::size_t J = I;
    while (J < N && Items[J].pd == Items[I].pd)
      ++J;
    SamePd += (J - I) * (J - I - 1) / 2;
    I = J;
  }
  std::size_t Cross = AllPairs - SamePd;
  auto Want = static_cast<std::size_t>(std::llround(
      Opts.negativesPerPositive * static_cast<double>(Positives.size())));
  Want = std::min(Want, Cross);

  std::vector<IndexPair> Negatives;
  if (Want > 0 && (Cross <= 4000000 || 2 * Want >= Cross)) {
    std::vector<IndexPair> All;
    All.reserve(Cross);
    for (std::size_t I = 0; I < N; ++I)
      for (std::size_t J = I + 1; J < N; ++J)
        if (Items[I].pd != Items[J].pd)
          All.push_back({I, J});
    Negatives = G.sample(std::move(All), Want);
  } else if (Want > 0) {
    std::set<IndexPair> Chosen;
    while (Negatives.size() < Want) {
      std::size_t I = G.below(N), J = G.below(N);
      if (I == J || Items[I].pd == Items[J].pd)
        continue;
      IndexPair P = std::minmax(I, J);
      if (Chosen.insert(P).second)
        Negatives.push_back(P);
    }
  }

  std::vector<CodePair> Out;
  Out.reserve(Positives.size() + Negatives.size());
  for (const IndexPair &P : Positives)
    Out.push_back({Items[P.first].id, Items[P.second].id, 1});
  for (const IndexPair &P : Negatives)
    Out.push_back({Items[P.first].id, Items[P.second].id, 0});
  return Out;
}

std::string pairsToJsonl(const std::vector<CodePair> &Pairs) {
  std::string Out;
  for (const CodePair &P : Pairs) {
    OrderedJson J;
    J["a"] = P.a;
    J["b"] = P.b;
    J["label"] = P.label;
    Out += J.dump();
    Out += '\n';
  }
  return Out;
}

} // namespace irclone
