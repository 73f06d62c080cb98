#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace clir {

/// Broad failure category. The CLI maps each kind to its own exit code.
enum class ErrorKind { contract, config, data, io, scorer };

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// A caller broke a documented precondition.
class ContractError : public Error {
  public:
    explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Input data is malformed or violates a data-model invariant.
class DataError : public Error {
  public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// A parse failure pinned to a file and 1-based line number.
class ParseError : public DataError {
  public:
    ParseError(std::string file, std::size_t line, const std::string& msg)
        : DataError(file + ":" + std::to_string(line) + ": " + msg),
          file_(std::move(file)),
          line_(line) {}
    [[nodiscard]] const std::string& file() const noexcept { return file_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// The reranking scorer failed (transport exhausted retries, or protocol violation).
class ScorerError : public Error {
  public:
    explicit ScorerError(const std::string& what) : Error(ErrorKind::scorer, what) {}
};

}  // namespace clir
