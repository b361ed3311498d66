#include "cli.hpp"

int main(int argc, char** argv)
{
    return chowla::cli::run(argc, argv);
}
