#include "pvdg/cli.hpp"

int main(int argc, char** argv)
{
    return pvdg::cli_main(argc, argv);
}
