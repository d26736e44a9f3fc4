#include "pdfool/cli.hpp"

int main(int argc, char** argv) { return pdfool::cli_dispatch(argc, argv); }
