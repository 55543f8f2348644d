#include "ergomesh/common.hpp"

#include <cstdio>

namespace ergomesh {

void log_warning(const std::string& message) {
    std::fprintf(stderr, "[warn] %s\n", message.c_str());
}

void Fnv1a::feed(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        state ^= bytes[i];
        state *= 1099511628211ull;
    }
}

}  // namespace ergomesh
