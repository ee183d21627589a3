#pragma once

#include <optional>
#include <string>

#include "juliaflow/harmonic_measure.hpp"
#include "juliaflow/tree.hpp"

namespace juliaflow {

struct TreeDocument {
  TreeWithDynamics tree;
  std::optional<MeasureAssignment> omega;
  std::optional<std::string> poly;  // polynomial text, when known
};

// Canonical text form: fixed field order, vertices sorted by (level, index).
std::string serialize_tree(const TreeWithDynamics& t, const MeasureAssignment* omega = nullptr,
                           const std::string& poly = "");
std::string serialize_tree(const TreeDocument& doc);

// Throws MalformedDocument on any syntactic or referential defect.
TreeDocument parse_tree(const std::string& text);

TreeDocument read_tree_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace juliaflow
