#pragma once

#include <string>

namespace pmc {

/// Runs one batch job (JSON text in, rendered JSON or DOT out).
/// Throws parse_error / precision_error / precondition_error / internal_error.
std::string run_job_text(const std::string& job_json);

}  // namespace pmc
