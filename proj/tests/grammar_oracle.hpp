#pragma once

#include <string_view>

namespace pandora::test {

// Reference recognizer for the stack-description grammar: a scannerless
// backtracking interpreter of the productions, deciding accept/reject only.
// Kept independent of the production parser so the two can disagree.
bool grammar_accepts(std::string_view text);

} // namespace pandora::test
