#ifndef NSPLAN_GEN_GENERATORS_HPP
#define NSPLAN_GEN_GENERATORS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace nsplan {

enum class DomainKind { blocks, gripper, ferry };

DomainKind domain_kind_from_string(const std::string& name);
std::string domain_kind_name(DomainKind kind);

// The PDDL domain text for one of the built-in domains.
const std::string& domain_pddl(DomainKind kind);

// Generates a problem instance: syntactically valid, non-trivial
// (I does not satisfy G) and verified solvable. Deterministic per
// (kind, size, size2, seed). `size` is the number of blocks / balls /
// cars; `size2` is the number of ferry locations (ignored elsewhere,
// 0 = same as size). Throws TaskError on out-of-range parameters.
std::string generate_problem(DomainKind kind, int size, int size2, uint64_t seed);

struct GenLimits {
    int min_size;
    int max_size;
};
GenLimits generator_limits(DomainKind kind);

// A batch across the given sizes, `per_size` instances each, with
// content-hash duplicate suppression. Deterministic per (kind, sizes,
// per_size, seed).
struct GeneratedInstance {
    std::string name;  // e.g. "gripper-3-s17"
    std::string text;
};
std::vector<GeneratedInstance> generate_batch(DomainKind kind,
                                              const std::vector<int>& sizes,
                                              int per_size, uint64_t seed,
                                              int size2 = 0);

}  // namespace nsplan

#endif
