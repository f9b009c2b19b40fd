#pragma once

#include <string>

#include "txforest/spec.hpp"

namespace txf {

// Renders a core spec in the surface syntax. On the core-expressible
// fragment the result parses and compiles back to an alpha-equivalent spec;
// constructs with no surface form (a bare dir spec, a non-literal path
// outside a comprehension) render as diagnostic pseudo-syntax.
std::string pretty(const Spec& s);

std::string pretty(const Expr& e);
std::string pretty(const Command& c);

}  // namespace txf
