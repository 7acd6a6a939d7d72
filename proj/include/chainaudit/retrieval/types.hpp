#pragma once
#ifndef CHAINAUDIT_RETRIEVAL_TYPES_HPP
#define CHAINAUDIT_RETRIEVAL_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "chainaudit/common.hpp"

namespace chainaudit::retrieval {

/// 300 MiB per-file retrieval cap.
inline constexpr std::uint64_t kDefaultMaxFileBytes = 300ULL << 20;

enum class FileClass { root_license, directory_license, scattered_license, readme, none };

inline std::string_view to_string(FileClass c)
{
    switch (c) {
        case FileClass::root_license: return "root_license";
        case FileClass::directory_license: return "directory_license";
        case FileClass::scattered_license: return "scattered_license";
        case FileClass::readme: return "readme";
        case FileClass::none: return "none";
    }
    return "none";
}

inline FileClass file_class_from_string(std::string_view s)
{
    if (s == "root_license") return FileClass::root_license;
    if (s == "directory_license") return FileClass::directory_license;
    if (s == "scattered_license") return FileClass::scattered_license;
    if (s == "readme") return FileClass::readme;
    if (s == "none") return FileClass::none;
    throw FormatError("unknown file class '" + std::string(s) + "'");
}

inline bool is_license_class(FileClass c)
{
    return c == FileClass::root_license || c == FileClass::directory_license ||
           c == FileClass::scattered_license;
}

struct RetrievedFile {
    std::string artifact_id;
    std::string path;
    FileClass file_class = FileClass::none;
    std::uint64_t size_bytes = 0;
    std::string content;
    std::string content_hash;
};

}  // namespace chainaudit::retrieval

#endif  // CHAINAUDIT_RETRIEVAL_TYPES_HPP
