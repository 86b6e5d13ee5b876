#pragma once

#include <iosfwd>
#include <string>

#include "qmlp/structure.hpp"

namespace qmlp {

/// Text structure format, one block per configuration:
///
///   begin
///   comment <free text>
///   atom <x> <y> <z> <element> <charge> <n> <fx> <fy> <fz>
///   energy <E>
///   charge <Q>
///   end
///
/// Values are Hartree/Bohr. `#` comment lines are allowed between blocks.
/// A structure without force labels is written with zero force columns and
/// the reserved token `no_forces` appended to its comment line; the parser
/// strips the token and leaves the forces unset.
Dataset parse_structures(const std::string& path);
Dataset parse_structures(std::istream& in, const std::string& name = "<stream>");

void write_structures(const Dataset& data, const std::string& path);
void write_structures(const Dataset& data, std::ostream& out);

}  // namespace qmlp
