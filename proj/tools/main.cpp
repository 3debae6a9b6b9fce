#include "cli.hpp"

int main(int argc, char** argv) {
    return rccat::cli::cli_main(argc, argv);
}
