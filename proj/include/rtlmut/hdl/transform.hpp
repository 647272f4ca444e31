#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlmut/hdl/ast.hpp"

namespace rtlmut::hdl {

/// Re-attaches declaration initializers that were lowered into a separate
/// continuous assignment. The lowered form `reg r; assign r = <const>;` is
/// folded back into `reg r = <const>;`. All other nodes are left as is.
Node sanitize(const Node& ast);

enum class EditKind : std::uint8_t { Replace, Insert, Delete };

std::string_view edit_kind_name(EditKind kind);
EditKind edit_kind_from_name(std::string_view name);

/// One location where two trees differ. For Insert the path names the
/// inserted child in the mutant; for Delete it names the removed child in
/// the golden tree.
struct DiffSite {
  std::string file;
  NodePath path;
  EditKind kind = EditKind::Replace;

  friend bool operator==(const DiffSite&, const DiffSite&) = default;
};

class HierarchyMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimal set of differing subtree positions. Formatting is irrelevant
/// since spans are ignored. Two single-site differences under one parent
/// whose contents are exchanged are reported as one swap at that parent.
std::vector<DiffSite> structural_diff(const Node& golden, const Node& mutant);

struct FileTree {
  std::string file;
  const Node* root = nullptr;
};

/// File-by-file diff over a whole design. Throws HierarchyMismatch when the
/// file lists or the module name sets differ.
std::vector<DiffSite> structural_diff(const std::vector<FileTree>& golden, const std::vector<FileTree>& mutant);

/// A concrete edit produced by a mutation operator.
struct EditRecord {
  std::string operator_id;
  std::string variant;
  EditKind kind = EditKind::Replace;
  std::string file;
  std::uint32_t line = 0;
  NodePath path;  // anchor in the golden tree
  std::string before_fragment;
  std::string after_fragment;

  /// Where structural_diff is expected to report this edit.
  DiffSite expected_site() const;
};

/// True when `site` is the difference this edit should produce. Insertions
/// and deletions inside runs of identical siblings are position-ambiguous;
/// those match any position in the run.
bool site_matches(const EditRecord& edit, const DiffSite& site, const Node& golden_root, const Node& mutant_root);

}  // namespace rtlmut::hdl
