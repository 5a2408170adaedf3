#pragma once

#include <string>

namespace gradspace {

/// Linear preorder on a coordinate space: componentwise, or the Loewner order
/// on n x n symmetric matrices stored row-major.
struct OrderSpec {
  enum class Kind { componentwise, psd };
  Kind kind = Kind::componentwise;

  static OrderSpec componentwise() { return {Kind::componentwise}; }
  static OrderSpec psd() { return {Kind::psd}; }

  std::string name() const { return kind == Kind::psd ? "psd" : "componentwise"; }
};

}  // namespace gradspace
