#pragma once

namespace pdfool {

/// Full command-line front end: generate | fit | pd | attack | experiment.
/// Returns the process exit status; failures print one diagnostic line to
/// stderr and return nonzero.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace pdfool
