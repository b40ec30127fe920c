#include <string>
#include <vector>

#include "fidsta/cli.hpp"

int main(int argc, char** argv) {
    return fidsta::fidsta_main(std::vector<std::string>(argv + 1, argv + argc));
}
