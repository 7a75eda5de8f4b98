#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace ofdr {

std::string sha256_hex(std::span<const uint8_t> data);
std::string sha256_file_hex(const std::string& path);

}  // namespace ofdr
