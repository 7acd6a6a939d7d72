#pragma once
#ifndef CHAINAUDIT_AUDIT_NOTICE_HPP
#define CHAINAUDIT_AUDIT_NOTICE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "chainaudit/common.hpp"
#include "chainaudit/unicode.hpp"

namespace chainaudit::audit {

struct DegenerateNoticeError : Error {
    using Error::Error;
};

/// Keeps Unicode letters and digits, lowercased; everything else is dropped.
inline std::string normalize_notice(std::string_view text)
{
    return unicode::alnum_lower(text);
}

/// Substring test against already-normalized downstream text.
inline bool notice_in_normalized(std::string_view normalized_notice, std::string_view normalized_downstream)
{
    if (normalized_notice.empty()) {
        throw DegenerateNoticeError("notice is empty after normalization");
    }
    return normalized_downstream.find(normalized_notice) != std::string_view::npos;
}

inline bool attribution_preserved(std::string_view upstream_notice, std::string_view downstream_text)
{
    return notice_in_normalized(normalize_notice(upstream_notice), normalize_notice(downstream_text));
}

/// True when any usable notice survives. Notices that normalize to nothing
/// are skipped here rather than failing the whole artifact.
inline bool any_notice_preserved(const std::vector<std::string>& normalized_notices,
                                 std::string_view normalized_downstream)
{
    for (const auto& n : normalized_notices) {
        if (!n.empty() && notice_in_normalized(n, normalized_downstream)) {
            return true;
        }
    }
    return false;
}

}  // namespace chainaudit::audit

#endif  // CHAINAUDIT_AUDIT_NOTICE_HPP
