#include "oscispline/cli.hpp"

int main(int argc, char** argv)
{
    return oscispline::run(argc, argv);
}
