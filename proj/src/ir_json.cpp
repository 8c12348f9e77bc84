//===--- ir_json.cpp - IR JSON interchange ----------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/ir_json.h"

namespace irclone {

OrderedJson nodeToJson(const AstNode &N) {
  OrderedJson J;
  J["kind"] = std::string(kindJsonName(N.kind()));
  if (N.isLeaf())
    J["value"] = N.value();
  OrderedJson Children = OrderedJson::array();
  for (const Edge &E : N.children()) {
    OrderedJson C;
    C["role"] = std::string(roleName(E.role));
    C["node"] = nodeToJson(*E.node);
    Children.push_back(std::move(C));
  }
  J["children"] = std::move(Children);
  return J;
}

OrderedJson unitToJson(const CompilationUnit &CU) {
  OrderedJson J;
  J["language"] = std::string(languageName(CU.language));
  J["source_id"] = CU.sourceId;
  OrderedJson Symbols = OrderedJson::array();
  for (const Symbol &S : CU.symbols) {
    OrderedJson SJ;
    SJ["id"] = S.id;
    SJ["name"] = S.name;
    SJ["category"] = std::string(categoryName(S.category));
    Symbols.push_back(std::move(SJ));
  }
  J["symbols"] = std::move(Symbols);
  J["root"] = nodeToJson(*CU.root);
  return J;
}

NodePtr nodeFromJson(const OrderedJson &J) {
  if (!J.is_object() || !J.contains("kind") || !J["kind"].is_string())
    throw IrJsonError("IR node must be an object with a string 'kind'");
  auto Kind = kindFromJsonName(J["kind"].get<std::string>());
  if (!Kind)
    throw IrJsonError("unknown node kind '" + J["kind"].get<std::string>() +
                      "'");
  if (isLeafKind(*Kind)) {
    if (!J.contains("value") || !J["value"].is_string())
      throw IrJsonError("leaf node '" + J["kind"].get<std::string>() +
                        "' needs a string 'value'");
    if (J.contains("children") && !J["children"].empty())
      throw IrJsonError("leaf node with children");
    return AstNode::leaf(*Kind, J["value"].get<std::string>());
  }
  std::vector<Edge> Children;
  if (J.contains("children")) {
    if (!J["children"].is_array())
      throw IrJsonError("'children' must be an array");
    for (const OrderedJson &C : J["children"]) {
      if (!C.is_object() || !C.contains("role") || !C["role"].is_string() ||
          !C.contains("node"))
        throw IrJsonError("child entries need 'role' and 'node'");
      auto R = roleFromName(C["role"].get<std::string>());
      if (!R)
        throw IrJsonError("unknown role '" + C["role"].get<std::string>() +
                          "'");
      Children.push_back({*R, nodeFromJson(C["node"])});
    }
  }
  return AstNode::branch(*Kind, std::move(Children));
}

CompilationUnit unitFromJson(const OrderedJson &J) {
  if (!J.is_object())
    throw IrJsonError("IR unit must be a JSON object");
  for (const char *Field : {"language", "source_id", "symbols", "root"})
    if (!J.contains(Field))
      throw IrJsonError(std::string("IR unit is missing '") + Field + "'");
  CompilationUnit CU;
  auto Lang = languageFromName(J["language"].get<std::string>());
  if (!Lang)
    throw IrJsonError("unknown language '" +
                      J["language"].get<std::string>() + "'");
  CU.language = *Lang;
  CU.sourceId = J["source_id"].get<std::string>();
  for (const OrderedJson &S : J["symbols"]) {
    auto Cat = categoryFromName(S.at("category").get<std::string>());
    if (!Cat)
      throw IrJsonError("unknown symbol category '" +
                        S.at("category").get<std::string>() + "'");
    CU.symbols.push_back(
        {S.at("id").get<int>(), S.at("name").get<std::string>(), *Cat});
  }
  CU.root = nodeFromJson(J["root"]);
  return CU;
}

std::string dumpUnit(const CompilationUnit &CU) {
  return unitToJson(CU).dump(2) + "\n";
}

CompilationUnit parseUnit(const std::string &Text) {
  OrderedJson J;
  try {
    J = OrderedJson::parse(Text);
  } catch (const nlohmann::json::exception &E) {
    throw IrJsonError(std::string("malformed IR JSON: ") + E.what());
  }
  try {
    return unitFromJson(J);
  } catch (const nlohmann::json::exception &E) {
    throw IrJsonError(std::string("malformed IR JSON: ") + E.what());
  }
}

} // namespace irclone
