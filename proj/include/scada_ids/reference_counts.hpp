#pragma once

// Instance counts published for the full gas-pipeline corpus (274,628 rows)
// and its first fold. Used to scale synthetic datasets and to audit stage
// populations.

#include <array>
#include <cstddef>
#include <cstdint>

namespace scada_ids::reference {

inline constexpr std::size_t kCorpusSize = 274628;

/// Rows per category, index 0 = Normal, 1..7 = NMRI..Recon.
inline constexpr std::array<std::uint32_t, 8> kCategoryCounts = {
    214580, 7753, 13035, 7900, 20412, 4898, 2176, 3874,
};

struct FoldCount {
    std::uint32_t train;
    std::uint32_t test;
};

/// Fold-1 stage-1 populations: Normal, Attack.
inline constexpr std::array<FoldCount, 2> kStage1Counts = {{{142901, 71679}, {40138, 19910}}};

/// Fold-1 stage-2 populations per category, index 0 unused.
inline constexpr std::array<FoldCount, 8> kStage2Counts = {{
    {0, 0},
    {5222, 2531},
    {8743, 4292},
    {5361, 2539},
    {13550, 6862},
    {3232, 1666},
    {1449, 727},
    {2581, 1293},
}};

/// Fold-1 stage-3 populations per subclass, index 0 unused. The MSCI rows
/// (13-17) sum to 5,461 training rows against 5,361 in the stage-2 counts;
/// the stage-2 figure agrees with the corpus totals.
inline constexpr std::array<FoldCount, 36> kStage3Counts = {{
    {0, 0},
    {1221, 571}, {1015, 445}, {1126, 574}, {1277, 655}, {931, 485}, {1326, 700},
    {997, 515},  {1186, 612}, {936, 460},  {955, 519},  {1206, 628}, {1374, 698},
    {1077, 517}, {1158, 518}, {1148, 510}, {1115, 543}, {963, 451},
    {1449, 727}, {1089, 545}, {474, 192},  {1134, 588}, {1009, 533}, {1355, 693}, {752, 408},
    {995, 477},  {1237, 571}, {1389, 690}, {1233, 625},
    {1276, 580}, {1414, 706}, {1268, 638}, {1264, 607},
    {1071, 533}, {1327, 683}, {1491, 713},
}};

} // namespace scada_ids::reference
