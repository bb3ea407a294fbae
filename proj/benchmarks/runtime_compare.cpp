// Wall-clock comparison of repeated optimizer solves against generator
// training + evaluation across sample sizes, printed as a table.
//
//   runtime_compare [--n 50,100,200,500,1000] [--problems 2000] [--seed 1]
//                   [--train-iters 50000]

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include "monospline/simbench.hpp"

using namespace monospline;

int main(int argc, char** argv) {
    std::vector<int> n_grid{50, 100, 200, 500, 1000};
    int problems = 2000;
    std::uint64_t seed = 1;
    long train_iters = 50000;

    for (int a = 1; a + 1 < argc; a += 2) {
        std::string key = argv[a];
        std::string val = argv[a + 1];
        if (key == "--n") {
            n_grid.clear();
            std::stringstream ss(val);
            std::string tok;
            while (std::getline(ss, tok, ',')) n_grid.push_back(std::stoi(tok));
        } else if (key == "--problems") {
            problems = std::stoi(val);
        } else if (key == "--seed") {
            seed = std::stoull(val);
        } else if (key == "--train-iters") {
            train_iters = std::stol(val);
        } else {
            std::fprintf(stderr, "unknown option %s\n", key.c_str());
            return 2;
        }
    }

    std::vector<RuntimeRow> rows = bench_runtime(n_grid, problems, seed, train_iters);
    std::printf("%s", runtime_to_text(rows).c_str());
    return 0;
}
