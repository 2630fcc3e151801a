/**
 * @file error.cpp
 */

#include "vision/common/error.hpp"

namespace vision {

auto to_string(error_code code) -> std::string_view {
    switch (code) {
        case error_code::invalid_argument: return "INVALID_ARGUMENT";
        case error_code::io_error: return "IO_ERROR";
        case error_code::not_found: return "NOT_FOUND";
        case error_code::duplicate_batch: return "DUPLICATE_BATCH";
        case error_code::illegal_transition: return "ILLEGAL_TRANSITION";
        case error_code::confirmation_required: return "CONFIRMATION_REQUIRED";
        case error_code::manifest_invalid: return "MANIFEST_INVALID";
        case error_code::unknown_filter_field: return "UNKNOWN_FILTER_FIELD";
        case error_code::unknown_fault_kind: return "UNKNOWN_FAULT_KIND";
        case error_code::lock_held: return "LOCK_HELD";
    }
    return "UNKNOWN";
}

}  // namespace vision
