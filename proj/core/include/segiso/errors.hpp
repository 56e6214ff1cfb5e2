#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace segiso {

enum class Errc {
    io,
    schema,
    config,
    invalid_argument,
    invalid_coordinate,
    not_found,
    degenerate_prior,
    degenerate_model,
    insufficient_data,
    insufficient_training,
    calibration,
    locked,
};

constexpr std::string_view errc_name(Errc c) {
    switch (c) {
        case Errc::io: return "io";
        case Errc::schema: return "schema";
        case Errc::config: return "config";
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::invalid_coordinate: return "invalid_coordinate";
        case Errc::not_found: return "not_found";
        case Errc::degenerate_prior: return "degenerate_prior";
        case Errc::degenerate_model: return "degenerate_model";
        case Errc::insufficient_data: return "insufficient_data";
        case Errc::insufficient_training: return "insufficient_training";
        case Errc::calibration: return "calibration";
        case Errc::locked: return "locked";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void throw_error(Errc code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace segiso
