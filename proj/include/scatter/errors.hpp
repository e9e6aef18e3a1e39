#pragma once

#include <stdexcept>
#include <string>

namespace scatter {

// Error taxonomy mirrors the CLI exit codes: validation (1), backend (2),
// parse (3). Every thrown error derives from one of the three bases.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// ---- process / core types ----

class DuplicateSegmentId final : public ValidationError {
public:
    explicit DuplicateSegmentId(const std::string& id)
        : ValidationError("duplicate segment id: " + id), id_(id) {}
    const std::string& id() const { return id_; }

private:
    std::string id_;
};

class EmptyMarkers final : public ValidationError {
public:
    explicit EmptyMarkers(const std::string& segment_id)
        : ValidationError("segment has empty marker set: " + segment_id) {}
};

class TooFewSegments final : public ValidationError {
public:
    explicit TooFewSegments(std::size_t n)
        : ValidationError("process needs at least 2 segments, got " + std::to_string(n)) {}
};

class BadMode final : public ValidationError {
public:
    explicit BadMode(const std::string& mode)
        : ValidationError("unknown process mode: " + mode) {}
};

// ---- prompt registry ----

class UnknownTemplate final : public ValidationError {
public:
    UnknownTemplate(const std::string& role, std::size_t variant)
        : ValidationError("no template for role '" + role + "' variant " + std::to_string(variant)) {}
};

class MissingBinding final : public ValidationError {
public:
    explicit MissingBinding(const std::string& name)
        : ValidationError("missing binding for placeholder: " + name), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

// ---- gateway ----

class HttpError final : public BackendError {
public:
    HttpError(int status, const std::string& body)
        : BackendError("http error " + std::to_string(status) + ": " + body),
          status_(status),
          body_(body) {}
    int status() const { return status_; }
    const std::string& body() const { return body_; }

private:
    int status_;
    std::string body_;
};

class CassetteMiss final : public BackendError {
public:
    explicit CassetteMiss(const std::string& key)
        : BackendError("cassette miss: " + key), digest_(key) {}
    const std::string& digest() const { return digest_; }

private:
    std::string digest_;
};

class MockNoRuleMatched final : public BackendError {
public:
    MockNoRuleMatched(const std::string& role, const std::string& prompt_head)
        : BackendError("no mock rule matched role '" + role + "' prompt: " + prompt_head) {}
};

// ---- pipeline ----

class OriginUnresolvable final : public ValidationError {
public:
    OriginUnresolvable()
        : ValidationError("cannot resolve origin segment: no declaration, no named segment, "
                          "all coupling scores zero") {}
};

// ---- eval harness ----

class MalformedOutput final : public ParseError {
public:
    explicit MalformedOutput(const std::string& why)
        : ParseError("malformed structured output: " + why) {}
};

// ---- stats ----

class ZeroVariance final : public ValidationError {
public:
    explicit ZeroVariance(const std::string& what_of)
        : ValidationError("zero variance in " + what_of) {}
};

class LengthMismatch final : public ValidationError {
public:
    LengthMismatch(std::size_t nx, std::size_t ny)
        : ValidationError("paired samples differ in length: " + std::to_string(nx) + " vs " +
                          std::to_string(ny)) {}
};

class TooFewPairs final : public ValidationError {
public:
    explicit TooFewPairs(std::size_t n)
        : ValidationError("paired test needs at least 2 pairs, got " + std::to_string(n)) {}
};

} // namespace scatter
