#include "nipaths/cli.hpp"

int main(int argc, char** argv)
{
    return nipaths::cli::run(argc, argv);
}
