#include "synth.hpp"

#include <random>
#include <set>
#include <stdexcept>
#include <vector>

namespace hinsim {

PlantedData planted_partition(const PlantedConfig& cfg) {
    const int c = cfg.communities;
    if (c < 1 || cfg.authors < c || cfg.venues < c || cfg.papers < 1)
        throw std::invalid_argument("planted partition needs at least one author and venue per community");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    auto community_of = [c](int i, int n) { return static_cast<int>(static_cast<long long>(i) * c / n); };
    auto members = [&](int n) {
        std::vector<std::vector<int>> m(c);
        for (int i = 0; i < n; ++i) m[community_of(i, n)].push_back(i);
        return m;
    };
    auto by_author = members(cfg.authors);
    auto by_venue = members(cfg.venues);
    auto pick = [&](const std::vector<int>& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
    auto any = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };

    PlantedData d;
    for (int a = 0; a < cfg.authors; ++a) {
        d.nodes += "a" + std::to_string(a) + "\tA\n";
        d.benchmark += "a" + std::to_string(a) + "\tc" + std::to_string(community_of(a, cfg.authors)) + "\n";
    }
    for (int p = 0; p < cfg.papers; ++p) d.nodes += "p" + std::to_string(p) + "\tP\n";
    for (int v = 0; v < cfg.venues; ++v) d.nodes += "v" + std::to_string(v) + "\tV\n";

    for (int p = 0; p < cfg.papers; ++p) {
        int g = p % c;
        int slots = 2 + any(2);
        std::set<int> authors;
        // Round-robin the first slot so every author gets at least one paper.
        int first = by_author[g][(p / c) % by_author[g].size()];
        authors.insert(first);
        while (static_cast<int>(authors.size()) < slots)
            authors.insert(coin(rng) < cfg.author_noise ? any(cfg.authors) : pick(by_author[g]));
        for (int a : authors) d.edges += "a" + std::to_string(a) + "\tp" + std::to_string(p) + "\n";
        int v = coin(rng) < cfg.venue_noise ? any(cfg.venues) : pick(by_venue[g]);
        d.edges += "p" + std::to_string(p) + "\tv" + std::to_string(v) + "\n";
    }
    return d;
}

}  // namespace hinsim
