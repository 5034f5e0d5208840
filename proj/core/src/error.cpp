#include "kernelcur/error.hpp"

namespace kernelcur {

ParseError::ParseError(std::string source, std::size_t line, const std::string& what)
    : Error(source + ":" + std::to_string(line) + ": " + what),
      source_(std::move(source)),
      line_(line) {}

}  // namespace kernelcur
