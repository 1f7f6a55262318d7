#pragma once

#include <cstdint>
#include <string>

namespace hinsim {

// Author-paper-venue network with planted author communities.
struct PlantedConfig {
    int communities = 3;
    int authors = 450;
    int papers = 1500;
    int venues = 45;
    double author_noise = 0.1;  // chance an author slot is drawn from any community
    double venue_noise = 0.05;
    std::uint64_t seed = 7;
};

struct PlantedData {
    std::string nodes;
    std::string edges;
    std::string benchmark;  // author labels
};

PlantedData planted_partition(const PlantedConfig& cfg);

}  // namespace hinsim
