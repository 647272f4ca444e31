#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtlmut/elab/consteval.hpp"
#include "rtlmut/hdl/ast.hpp"
#include "rtlmut/hdl/source.hpp"

namespace rtlmut::elab {

class ElabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnresolvedModule : public ElabError {
 public:
  explicit UnresolvedModule(const std::string& name) : ElabError("unresolved module '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ParameterNotConstant : public ElabError {
 public:
  using ElabError::ElabError;
};

class CyclicHierarchy : public ElabError {
 public:
  using ElabError::ElabError;
};

class MultipleTopCandidates : public ElabError {
 public:
  using ElabError::ElabError;
};

enum class Direction : std::uint8_t { None, Input, Output };

struct Signal {
  std::string name;
  Direction direction = Direction::None;
  bool is_reg = false;       // reg or integer; written procedurally
  bool is_signed = false;
  std::int64_t msb = 0;
  std::int64_t lsb = 0;
  bool is_array = false;
  std::int64_t array_lo = 0;
  std::int64_t array_hi = 0;
  const hdl::Node* init = nullptr;  // declaration initializer, if any

  std::uint32_t width() const {
    return static_cast<std::uint32_t>((msb >= lsb ? msb - lsb : lsb - msb) + 1);
  }
  std::int64_t array_size() const { return is_array ? array_hi - array_lo + 1 : 0; }
};

struct DesignFile {
  std::string path;  // relative to the design directory
  hdl::SourceFile source;
  std::shared_ptr<const hdl::Node> ast;
};

struct ModuleRef {
  std::size_t file = 0;
  std::uint32_t index = 0;  // child index under the file's SourceText
};

/// One node of the elaborated hierarchy. Signals are evaluated under this
/// instance's parameter bindings.
struct Instance {
  std::string path;  // "" for the top, else dotted instance names
  std::string name;
  std::string module;
  int parent = -1;
  std::vector<int> children;
  ParamEnv params;
  std::map<std::string, Signal> signals;
  std::vector<std::string> port_order;
  hdl::NodePath item_path;  // InstanceItem in the parent module's file

  std::string qualify(const std::string& signal) const { return path.empty() ? signal : path + "." + signal; }
};

struct Design {
  std::string id;
  std::vector<DesignFile> files;
  std::string top;
  std::map<std::string, ModuleRef> modules;
  std::vector<Instance> instances;  // preorder; instances[0] is the top
  std::size_t loc = 0;

  const hdl::Node& module_node(const std::string& name) const;
  const DesignFile& module_file(const std::string& name) const;
  std::size_t file_index(const std::string& path) const;
  /// First instance (preorder) of a module; its parameters define the
  /// module's environment for static checks.
  const Instance& first_instance(const std::string& module) const;
  const Instance* find_instance(const std::string& path) const;
};

/// Resolves the hierarchy below `top` (or the unique uninstantiated module
/// when `top` is empty), folds parameters and checks declarations, port
/// bindings and assignment targets.
Design elaborate(std::vector<DesignFile> files, const std::string& top, std::string id = {});

/// Loads and parses every `.v` file under `dir` (sorted by relative path).
std::vector<DesignFile> load_design_files(const std::filesystem::path& dir);
DesignFile make_design_file(std::string path, std::string text);

/// Re-elaborates `base` with the given files replaced by new text.
Design rebuild(const Design& base, const std::map<std::string, std::string>& replaced_text);

/// Total non-blank line count across files.
std::size_t count_loc(const std::vector<DesignFile>& files);

}  // namespace rtlmut::elab
