#include "cpf/cli.hpp"

int main(int argc, char** argv) { return cpf::cli::run_cli(argc, argv); }
