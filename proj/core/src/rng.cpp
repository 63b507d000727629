#include "rwre/rng.hpp"

namespace rwre {

std::uint64_t site_key(std::uint64_t seed, const Point& x, std::uint64_t stream) {
    std::uint64_t k = derive_key(seed, {stream});
    for (int v : x.c) k = mix64(k ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
    return k;
}

}  // namespace rwre
