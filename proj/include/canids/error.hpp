#pragma once

#include <stdexcept>
#include <string>

namespace canids {

enum class Errc {
    io,               // file missing / unreadable / unwritable
    parse,            // malformed input data
    invalid_argument, // caller violated a precondition
    domain,           // input is structurally valid but unusable (no overlap, all constant, ...)
    state,            // stateful call sequence violated (out-of-order windows, ...)
    degenerate_input, // statistic undefined for this input (constant vector, single class)
    internal,         // should-be-unreachable condition
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace canids
