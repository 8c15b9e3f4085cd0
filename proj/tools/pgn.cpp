#include <pgn/cli.hpp>

int main(int argc, char** argv) { return pgn::cli::run(argc, argv, std::cout, std::cerr); }
