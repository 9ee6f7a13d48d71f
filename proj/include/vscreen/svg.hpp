#pragma once

// Static SVG figures rendered from emitted JSON reports. Layout is fixed and
// all numbers are printed with fixed precision, so identical reports give
// identical bytes.

#include <optional>
#include <string>
#include <string_view>

#include "vscreen/report.hpp"

namespace vscreen::svg {

enum class Figure { Tiered, Sensitivity, Contingency, Synthetic };
std::string_view to_string(Figure f);
std::optional<Figure> parse_figure(std::string_view name);

// L against F with dashed Tier 1 guide lines. Reads "profiles" (top level or
// under "psychometrics") and, when present, the classification block.
std::string tiered_scatter(const report::Json& doc);
// r(KEEP, correct) bars by model; needs psychometrics.item_sensitivity.
std::string sensitivity_bars(const report::Json& doc);
// WITHDRAW x BET 2x2 grid per model; needs psychometrics.contingency.
std::string contingency_grids(const report::Json& doc);
// Policy x index matrix with verdict shading; needs synthetic.policies.
std::string synthetic_matrix(const report::Json& doc);

// Throws MissingSection when the document lacks the block the figure needs.
std::string render(const report::Json& doc, Figure figure);

}  // namespace vscreen::svg
