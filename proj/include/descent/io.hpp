#pragma once

#include <iosfwd>
#include <string>

#include "descent/amalgam.hpp"
#include "descent/digraph.hpp"
#include "descent/expansion.hpp"

namespace descent {

// Text exchange formats. Writers are bit-exact: level lines list ids in
// ascending order, edge lines sort by (src, dst).

std::string write_ldg(const LayeredDigraph& g);
LayeredDigraph read_ldg(std::istream& in);
LayeredDigraph read_ldg_string(const std::string& text);

std::string write_exs(const ExpansionSystem& sys);
ExpansionSystem read_exs(std::istream& in);
ExpansionSystem read_exs_string(const std::string& text);

// Layered text plus generator and frontier lines; levels are distances
// from the generator set.
std::string write_ldgx(const FGObject& f);
FGObject read_ldgx(std::istream& in, const ExpansionSystem& gamma);

// Loads a .ldg or .exs by suffix; .exs inputs are expanded to `depth`.
LayeredDigraph load_digraph(const std::string& path, int depth);
ExpansionSystem load_system(const std::string& path);

} // namespace descent
