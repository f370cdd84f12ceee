#pragma once

#include <stdexcept>
#include <string>

namespace pacifier {

struct InvalidGraph : std::runtime_error {
    explicit InvalidGraph(const std::string& msg) : std::runtime_error("invalid graph: " + msg) {}
};

struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& msg) : std::runtime_error("invalid input: " + msg) {}
};

struct InvalidAction : std::runtime_error {
    explicit InvalidAction(const std::string& msg) : std::runtime_error("invalid action: " + msg) {}
};

struct InvalidBudget : std::runtime_error {
    explicit InvalidBudget(const std::string& msg) : std::runtime_error("invalid budget: " + msg) {}
};

struct InvalidPlan : std::runtime_error {
    explicit InvalidPlan(const std::string& msg) : std::runtime_error("invalid plan: " + msg) {}
};

struct NonConverged : std::runtime_error {
    explicit NonConverged(const std::string& msg) : std::runtime_error("not converged: " + msg) {}
};

struct NumericalFailure : std::runtime_error {
    explicit NumericalFailure(const std::string& msg) : std::runtime_error("numerical failure: " + msg) {}
};

struct GenerationFailed : std::runtime_error {
    explicit GenerationFailed(const std::string& msg) : std::runtime_error("generation failed: " + msg) {}
};

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error("shape mismatch: " + msg) {}
};

struct StateError : std::runtime_error {
    explicit StateError(const std::string& msg) : std::runtime_error("state error: " + msg) {}
};

struct UnsupportedVariant : std::runtime_error {
    explicit UnsupportedVariant(const std::string& msg) : std::runtime_error("unsupported variant: " + msg) {}
};

struct Refused : std::runtime_error {
    explicit Refused(const std::string& msg) : std::runtime_error("refused: " + msg) {}
};

struct IngestError : std::runtime_error {
    explicit IngestError(const std::string& msg) : std::runtime_error("ingest error: " + msg) {}
};

struct EpisodeDone : std::runtime_error {
    explicit EpisodeDone(const std::string& msg) : std::runtime_error("episode done: " + msg) {}
};

struct TrainingDiverged : std::runtime_error {
    explicit TrainingDiverged(const std::string& msg) : std::runtime_error("training diverged: " + msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

}  // namespace pacifier
