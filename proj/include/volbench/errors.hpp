#pragma once

#include <stdexcept>
#include <string>

namespace volbench {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct EmptyCorpusError : Error {
    using Error::Error;
};

struct OutOfRangeError : Error {
    using Error::Error;
};

struct ReplayMissError : Error {
    using Error::Error;
};

struct ConsistencyError : Error {
    using Error::Error;
};

}  // namespace volbench
