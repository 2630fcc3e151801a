/**
 * @file error.hpp
 * @brief Error type shared by all vision modules
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vision {

enum class error_code {
    invalid_argument,
    io_error,
    not_found,
    duplicate_batch,
    illegal_transition,
    confirmation_required,
    manifest_invalid,
    unknown_filter_field,
    unknown_fault_kind,
    lock_held,
};

[[nodiscard]] auto to_string(error_code code) -> std::string_view;

/**
 * @brief Exception carrying a stable machine-readable code.
 *
 * The code string (e.g. "ILLEGAL_TRANSITION") is what the HTTP envelope and
 * the CLI report; the message is free text for humans.
 */
class error : public std::runtime_error {
public:
    error(error_code code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] auto code() const noexcept -> error_code { return code_; }

private:
    error_code code_;
};

}  // namespace vision
