#include "evl/cli.hpp"

int main(int argc, char** argv) { return evl::cli_dispatch(argc, argv); }
