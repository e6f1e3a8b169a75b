#ifndef NSPLAN_IO_SHA256_HPP
#define NSPLAN_IO_SHA256_HPP

#include <cstdint>
#include <string>

namespace nsplan {

// SHA-256 of a byte string, as lowercase hex. Used for instance-content
// hashes in run manifests and generator duplicate suppression.
std::string sha256_hex(const std::string& data);

}  // namespace nsplan

#endif
