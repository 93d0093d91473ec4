#pragma once

#include <stdexcept>
#include <string>

namespace unlearn_audit {

// Base of every error raised by the toolkit. The CLI maps subclasses onto
// exit codes (see tools/audit_main.cpp).
class AuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public AuditError {
public:
    using AuditError::AuditError;
};

class DegenerateVector : public AuditError {
public:
    using AuditError::AuditError;
};

class EmptySample : public AuditError {
public:
    using AuditError::AuditError;
};

class MalformedTokenization : public AuditError {
public:
    using AuditError::AuditError;
};

class MalformedTrace : public AuditError {
public:
    using AuditError::AuditError;
};

class ConfigError : public AuditError {
public:
    ConfigError(std::string key, const std::string& message)
        : AuditError("config: " + (key.empty() ? std::string() : "'" + key + "': ") + message),
          key_(std::move(key)) {}

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class IoError : public AuditError {
public:
    using AuditError::AuditError;
};

// The adapter broke its contract (missing embedding, bad trace, unknown backend).
class AdapterError : public AuditError {
public:
    using AuditError::AuditError;
};

// A probe run aborted. Carries the cell that failed.
class ProbeAbort : public AuditError {
public:
    ProbeAbort(std::string probe, std::string concept_name, std::string variant, std::string seed,
               const std::string& cause)
        : AuditError(probe + " probe aborted (concept='" + concept_name + "', variant=" + variant +
                     (seed.empty() ? std::string() : ", seed=" + seed) + "): " + cause),
          probe_(std::move(probe)),
          concept_(std::move(concept_name)),
          variant_(std::move(variant)),
          seed_(std::move(seed)) {}

    const std::string& probe() const { return probe_; }
    const std::string& concept_name() const { return concept_; }
    const std::string& variant() const { return variant_; }
    const std::string& seed() const { return seed_; }

private:
    std::string probe_;
    std::string concept_;
    std::string variant_;
    std::string seed_;
};

}  // namespace unlearn_audit
