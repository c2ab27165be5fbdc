#include "agdo/errata.hpp"

#include <algorithm>

namespace agdo {

const std::vector<FormulaEntry>& formula_catalog()
{
    static const std::vector<FormulaEntry> catalog{
        {"cross.even.a/d", Model::cross, 0, 0, false},
        {"cross.even.b/d", Model::cross, 0, 1, false},
        {"cross.even.c/d", Model::cross, 0, 2, false},
        {"cross.even.v/d", Model::cross, 0, 4, false},
        {"cross.odd.a/c", Model::cross, 1, 0, false},
        {"cross.odd.b/c", Model::cross, 1, 1, false},
        {"cross.odd.d/c", Model::cross, 1, 3, false},
        {"cross.odd.v/c", Model::cross, 1, 4, false},
        {"hex.0.a/b", Model::hex, 0, 0, false},
        {"hex.0.c/b", Model::hex, 0, 2, true},
        {"hex.0.d/b", Model::hex, 0, 3, false},
        {"hex.0.f/b", Model::hex, 0, 4, false},
        {"hex.0.g/b", Model::hex, 0, 5, true},
        {"hex.1.a/d", Model::hex, 1, 0, true},
        {"hex.1.b/d", Model::hex, 1, 1, false},
        {"hex.1.c/d", Model::hex, 1, 2, false},
        {"hex.1.f/d", Model::hex, 1, 4, false},
        {"hex.1.g/d", Model::hex, 1, 5, true},
        {"hex.2.a/f", Model::hex, 2, 0, true},
        {"hex.2.b/f", Model::hex, 2, 1, false},
        {"hex.2.c/f", Model::hex, 2, 2, true},
        {"hex.2.d/f", Model::hex, 2, 3, false},
        {"hex.2.g/f", Model::hex, 2, 5, false},
    };
    return catalog;
}

const std::vector<Erratum>& errata()
{
    static const std::vector<Erratum> list{
        {"hex.0.f/b",
         "f/b = -(r_{v+e4-e5} / r_{v+e2-e3+e4-e6}) * Theta(R1, v+e4-e5) / Theta(Q3, v+e2-e3+e4-e6)"
         " * exp(-int^{R1} (Omega_{Q3Q2} + Omega_{R3R2}))",
         "f/b = -(r_{v+e4-e5} / r_{v+e2-e3+e4-e6}) * Theta(R1, v+e4-e5) / Theta(R1, v+e2-e3+e4-e6)"
         " * exp(-int^{R1} (Omega_{Q3Q2} + Omega_{R3R2}))",
         "on random torus data the printed reading deviates from the null-space oracle by 4.6e-1 (relative "
         "to the largest component) and leaves a normalized residual of 5.8e-1; the corrected reading "
         "matches to 3.2e-15 with residual 1.3e-15. Every other factor of the ratio is evaluated at R1."},
    };
    return list;
}

const Erratum* find_erratum(std::string_view formula)
{
    const auto& list = errata();
    const auto it = std::find_if(list.begin(), list.end(), [&](const Erratum& e) { return e.formula == formula; });
    return it == list.end() ? nullptr : &*it;
}

const std::vector<ReadingNote>& reading_notes()
{
    static const std::vector<ReadingNote> notes{
        {"cross.odd.v/c",
         "the upper limit typeset as 'P_2+' in the prefactor exp(... - int^{P_2+} Omega_3) is read as P_2^+; "
         "this reading matches the oracle, so no correction is recorded."},
    };
    return notes;
}

} // namespace agdo
