#pragma once

#include <stdexcept>
#include <string>

namespace truthrl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid input value; field() names the offending parameter.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)), message_(message) {}
    const std::string& field() const noexcept { return field_; }
    // Message without the field prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class JudgeUnavailableError : public Error {
public:
    JudgeUnavailableError(const std::string& message, int attempts)
        : Error(message), attempts_(attempts) {}
    int attempts() const noexcept { return attempts_; }

private:
    int attempts_;
};

class JudgeProtocolError : public Error {
public:
    JudgeProtocolError(const std::string& message, std::string raw_reply)
        : Error(message), raw_reply_(std::move(raw_reply)) {}
    const std::string& raw_reply() const noexcept { return raw_reply_; }

private:
    std::string raw_reply_;
};

class ConfigError : public Error {
public:
    ConfigError(int line, std::string key, const std::string& message)
        : Error(format(line, key, message)), line_(line), key_(std::move(key)) {}
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(int line, const std::string& key, const std::string& message) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += key + ": ";
        return out + message;
    }
    int line_;
    std::string key_;
};

}  // namespace truthrl
