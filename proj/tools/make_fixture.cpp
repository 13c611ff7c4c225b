// Regenerates the bundled synthetic dataset: make_fixture <dir> [seed]
#include <cstdlib>
#include <iostream>
#include <string>

#include "costar/error.hpp"
#include "costar/synth.hpp"

int main(int argc, char** argv) {
    if (argc < 2 || argc > 3) {
        std::cerr << "usage: make_fixture <dir> [seed]\n";
        return 2;
    }
    costar::synth::FixtureOptions options;
    if (argc == 3) options.seed = std::strtoull(argv[2], nullptr, 10);
    try {
        const auto raw = costar::synth::make_fixture(options);
        costar::synth::to_dataset(raw);  // validates
        costar::synth::write_dataset(raw, argv[1]);
        std::cerr << raw.stars.size() << " stars, " << raw.works.size() << " works, "
                  << raw.cast.size() << " cast rows\n";
    } catch (const costar::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    }
    return 0;
}
