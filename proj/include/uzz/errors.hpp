#pragma once

#include <stdexcept>
#include <string>

namespace uzz {

// Malformed input: bad file schema, asymmetric matrix, non-total map, ...
// CLI maps this to exit code 2.
struct malformed_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A window/sequence does not cover the range it must cover.
struct window_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input is well-formed but outside an operation's domain
// (e.g. a diameter > 1/2 space offered to a 2^-n grid).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A claimed bound failed while constructing a certificate
// (e.g. the image of a ball is not contained in any target ball).
// CLI maps this to exit code 1: the claim is refuted, the program worked.
struct contract_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace uzz
