#pragma once

#include <stdexcept>
#include <string>

namespace akz {

enum class errc {
  domain = 1,   // argument outside an operation's domain
  config,       // inconsistent configuration (bands, quadrature, options)
  io,           // file or parse failure
  maxit,        // iteration budget exhausted
  truncation,   // theta series hit its term cap
  guard_band,   // too close to the non-Lipschitz point of the u-map
  numeric       // breakdown (non-finite values, collapse of b_n, ...)
};

class error : public std::runtime_error {
public:
  error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace akz
