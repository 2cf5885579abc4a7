#include <iostream>

#include "choq/experiments.hpp"

int main() {
    const int failures = choq::run_verification(std::cout, "acceptance_out");
    return failures == 0 ? 0 : 4;
}
