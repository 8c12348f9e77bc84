//===--- ir_json.h - IR JSON interchange ------------------------*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Canonical JSON form of a CompilationUnit:
///
///   node = {"kind": s, "value": s?, "children": [{"role": s, "node": node}]}
///   unit = {"language": "C"|"COBOL", "source_id": s,
///           "symbols": [{"id": n, "name": s, "category": s}], "root": node}
///
/// Fields are emitted in the order above so output is byte-reproducible.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_IR_JSON_H
#define IRCLONE_IR_JSON_H

#include "irclone/ir.h"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace irclone {

using OrderedJson = nlohmann::ordered_json;

class IrJsonError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

OrderedJson nodeToJson(const AstNode &N);
OrderedJson unitToJson(const CompilationUnit &CU);

/// Throws IrJsonError on schema mismatches (unknown kinds, roles, etc.).
NodePtr nodeFromJson(const OrderedJson &J);
CompilationUnit unitFromJson(const OrderedJson &J);

/// Pretty-printed with two-space indentation and a trailing newline.
std::string dumpUnit(const CompilationUnit &CU);
CompilationUnit parseUnit(const std::string &Text);

} // namespace irclone

#endif // IRCLONE_IR_JSON_H
