// Runs every acceptance criterion at its stated tolerance and prints one
// PASS/FAIL line each. Exit status is nonzero if any criterion fails.

#include <cstdio>

#include "dunce/reproduce.hpp"

int main() {
    dunce::ReproduceOptions opt;
    int failed = 0;
    for (const auto& c : dunce::criteria()) {
        const auto r = dunce::run_criterion(c, opt);
        std::printf("%s [%2d] %-30s %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.summary.c_str(),
                    r.seconds);
        std::fflush(stdout);
        failed += !r.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(dunce::criteria().size()) - failed,
                dunce::criteria().size());
    return failed == 0 ? 0 : 1;
}
