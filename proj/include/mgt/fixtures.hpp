#pragma once

#include "mgt/hodge.hpp"

namespace mgt {

// Built-in graphs with their catalog velocity fields stored as field "b" in
// the document. The acceptance suite and the CLI's builtin: scheme use these.
struct Fixture {
  std::string name;
  GraphPtr graph;
  VelocityField field;
};

Fixture fixture(const std::string& name);
std::vector<std::string> fixture_names();

}  // namespace mgt
