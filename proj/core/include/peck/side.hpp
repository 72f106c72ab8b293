#pragma once

#include <string>

namespace peck {

enum class Side { left, right };

inline Side opposite(Side s) { return s == Side::left ? Side::right : Side::left; }

std::string to_string(Side s);
Side side_from_string(const std::string& s);

}  // namespace peck
