#ifndef NSPLAN_STRIPS_PDDL_HPP
#define NSPLAN_STRIPS_PDDL_HPP

#include <string>

#include "nsplan/strips/task.hpp"

namespace nsplan {

// Parses the STRIPS subset of PDDL (:strips and :typing only). Types are
// compiled into static unary predicates whose atoms are appended to the
// initial state. Negative preconditions, conditional effects, quantifiers
// and other ADL constructs are rejected.
LiftedTask parse(const std::string& domain_text, const std::string& problem_text);

// File-reading convenience used by the CLI; throws IoError if unreadable.
LiftedTask parse_files(const std::string& domain_path, const std::string& problem_path);

std::string read_file(const std::string& path);

}  // namespace nsplan

#endif
