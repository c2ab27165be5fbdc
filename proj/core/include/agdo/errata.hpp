#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "agdo/labels.hpp"

namespace agdo {

/// One closed-form coefficient ratio. Ids look like
/// "cross.even.a/d" or "hex.0.f/b" (hex cases are named by k - l mod 3).
struct FormulaEntry {
    std::string id;
    Model model;
    int residue;             // n+m mod 2 or k-l mod 3
    std::size_t coefficient; // index into the stencil
    bool forced_zero;
};

/// Every closed-form ratio of both models, unit coefficients excluded.
const std::vector<FormulaEntry>& formula_catalog();

/// A formula whose printed form fails the null-space oracle, with the minimal
/// index correction that restores the match.
struct Erratum {
    std::string formula;
    std::string printed;
    std::string corrected;
    std::string evidence;
};

const std::vector<Erratum>& errata();
const Erratum* find_erratum(std::string_view formula);

/// Typesetting ambiguities that needed a reading but no correction.
struct ReadingNote {
    std::string formula;
    std::string note;
};

const std::vector<ReadingNote>& reading_notes();

} // namespace agdo
