#ifndef KGC_ERROR_HPP
#define KGC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace kgc {

enum class ErrorKind {
    // graph construction / integrity
    UnknownRelationship,
    DanglingEndpoint,
    SelfLoop,
    DuplicateEntity,
    NonTransitiveRelationship,
    SnapshotMismatch,
    // completion
    CyclicGraph,
    HopOutOfRange,
    EmptyPathSet,
    PathCountOverflow,
    // datasets
    InvalidParams,
    // serialization
    ParseError,
    SchemaError,
    ConfigError,
    IoError,
};

const char* to_string(ErrorKind kind) noexcept;

// Stable CLI exit code for each kind; documented in the README.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return kgc::exit_code(kind_); }

private:
    ErrorKind kind_;
};

} // namespace kgc

#endif
