#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nulleval {

// Root of the project's error taxonomy. Every throwing operation in the
// library raises a subclass of Error so callers can catch one type at the
// CLI boundary and map it to an exit code.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// A source record failed to parse under the dataset's published schema.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::size_t record_index)
        : Error(what + " (record index " + std::to_string(record_index) + ")"),
          record_index(record_index) {}
    explicit SchemaError(const std::string& what) : Error(what), record_index(0) {}
    std::size_t record_index;
};

class CountMismatch : public Error {
public:
    CountMismatch(const std::string& dataset, std::size_t expected, std::size_t got)
        : Error("dataset " + dataset + ": expected " + std::to_string(expected) +
                " records, got " + std::to_string(got)),
          dataset(dataset), expected(expected), got(got) {}
    std::string dataset;
    std::size_t expected;
    std::size_t got;
};

class InsufficientRecords : public Error {
public:
    InsufficientRecords(std::size_t requested, std::size_t available)
        : Error("sample of " + std::to_string(requested) + " requested but only " +
                std::to_string(available) + " records available"),
          requested(requested), available(available) {}
    std::size_t requested;
    std::size_t available;
};

class MissingChoices : public Error {
public:
    using Error::Error;
};

class MalformedRecord : public Error {
public:
    using Error::Error;
};

class TypeMismatch : public Error {
public:
    using Error::Error;
};

class EmptyCell : public Error {
public:
    using Error::Error;
};

class ZeroBaseline : public Error {
public:
    using Error::Error;
};

class NoPairs : public Error {
public:
    using Error::Error;
};

class MissingTechnique : public Error {
public:
    using Error::Error;
};

class IncompleteRun : public Error {
public:
    IncompleteRun(const std::string& what, std::vector<std::string> missing_cells)
        : Error(what), missing_cells(std::move(missing_cells)) {}
    std::vector<std::string> missing_cells;
};

class FixtureMissing : public Error {
public:
    using Error::Error;
};

class UnknownRecord : public Error {
public:
    using Error::Error;
};

// Provider-side failures all carry the record id so an interrupted cell can
// be resumed without re-querying completed records.
class ProviderError : public Error {
public:
    ProviderError(const std::string& what, std::string record_id)
        : Error(what + " [record " + record_id + "]"), record_id(std::move(record_id)) {}
    std::string record_id;
};

class TransportError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class AuthError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class QuotaError : public ProviderError {
public:
    using ProviderError::ProviderError;
};

class ManifestMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace nulleval
