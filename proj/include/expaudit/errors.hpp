#pragma once

#include <stdexcept>
#include <string>

namespace expaudit {

// Input/contract violations: bad files, bad configuration, bad arguments.
// The CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Failures of a statistical procedure on otherwise valid input.
// The CLI maps these to exit code 3.
struct StatError : std::runtime_error {
    explicit StatError(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownVariable : ValidationError {
    explicit UnknownVariable(const std::string& what) : ValidationError(what) {}
};

struct TooManyNoiseVariables : ValidationError {
    explicit TooManyNoiseVariables(const std::string& what) : ValidationError(what) {}
};

struct TooManyVariables : ValidationError {
    explicit TooManyVariables(const std::string& what) : ValidationError(what) {}
};

struct MalformedRow : ValidationError {
    explicit MalformedRow(const std::string& what) : ValidationError(what) {}
};

struct MissingColumn : ValidationError {
    explicit MissingColumn(const std::string& what) : ValidationError(what) {}
};

struct InsufficientRecords : ValidationError {
    explicit InsufficientRecords(const std::string& what) : ValidationError(what) {}
};

struct EmptyPairSet : ValidationError {
    explicit EmptyPairSet(const std::string& what) : ValidationError(what) {}
};

struct ConditioningOnNullEvent : StatError {
    explicit ConditioningOnNullEvent(const std::string& what) : StatError(what) {}
};

struct SeparationDetected : StatError {
    explicit SeparationDetected(const std::string& what) : StatError(what) {}
};

struct RankDeficient : StatError {
    explicit RankDeficient(const std::string& what) : StatError(what) {}
};

struct NoConvergence : StatError {
    explicit NoConvergence(const std::string& what) : StatError(what) {}
};

struct SingleClass : StatError {
    explicit SingleClass(const std::string& what) : StatError(what) {}
};

}  // namespace expaudit
