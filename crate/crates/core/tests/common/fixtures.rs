//! Published per-tree counts, accuracies and timings.

pub struct TreeRow {
    pub tree: u32,
    pub total: u64,
    pub true_wood: u64,
    pub false_wood: u64,
    pub true_leaf: u64,
    pub false_leaf: u64,
    pub oa: f64,
    pub kappa: f64,
    pub mcc: f64,
    pub time_ms: f64,
    pub ms_per_million: f64,
}

#[rustfmt::skip]
pub const TREES: [TreeRow; 24] = [
    TreeRow { tree: 1, total: 876657, true_wood: 128879, false_wood: 1215, true_leaf: 724963, false_leaf: 21600, oa: 0.9739, kappa: 0.9032, mcc: 0.9066, time_ms: 935.0, ms_per_million: 1067.0 },
    TreeRow { tree: 2, total: 716701, true_wood: 133791, false_wood: 5647, true_leaf: 556506, false_leaf: 20757, oa: 0.9631, kappa: 0.8870, mcc: 0.8889, time_ms: 930.0, ms_per_million: 1298.0 },
    TreeRow { tree: 3, total: 629250, true_wood: 166616, false_wood: 2080, true_leaf: 436377, false_leaf: 24177, oa: 0.9582, kappa: 0.8979, mcc: 0.9012, time_ms: 870.0, ms_per_million: 1383.0 },
    TreeRow { tree: 4, total: 733233, true_wood: 116880, false_wood: 651, true_leaf: 563511, false_leaf: 52191, oa: 0.9279, kappa: 0.7726, mcc: 0.7923, time_ms: 912.0, ms_per_million: 1244.0 },
    TreeRow { tree: 5, total: 1064546, true_wood: 384086, false_wood: 1592, true_leaf: 635815, false_leaf: 43053, oa: 0.9580, kappa: 0.9113, mcc: 0.9144, time_ms: 1901.0, ms_per_million: 1786.0 },
    TreeRow { tree: 6, total: 971915, true_wood: 213843, false_wood: 1899, true_leaf: 723765, false_leaf: 32408, oa: 0.9647, kappa: 0.9027, mcc: 0.9061, time_ms: 1350.0, ms_per_million: 1390.0 },
    TreeRow { tree: 7, total: 3398859, true_wood: 638655, false_wood: 7436, true_leaf: 2671850, false_leaf: 80918, oa: 0.9740, kappa: 0.9191, mcc: 0.9211, time_ms: 5547.0, ms_per_million: 1633.0 },
    TreeRow { tree: 8, total: 1162123, true_wood: 271612, false_wood: 4924, true_leaf: 844380, false_leaf: 41207, oa: 0.9603, kappa: 0.8952, mcc: 0.8983, time_ms: 1565.0, ms_per_million: 1347.0 },
    TreeRow { tree: 9, total: 1068644, true_wood: 289835, false_wood: 3926, true_leaf: 689853, false_leaf: 85030, oa: 0.9167, kappa: 0.8076, mcc: 0.8203, time_ms: 1625.0, ms_per_million: 1521.0 },
    TreeRow { tree: 10, total: 1210685, true_wood: 105130, false_wood: 1653, true_leaf: 1065500, false_leaf: 38402, oa: 0.9669, kappa: 0.8219, mcc: 0.8331, time_ms: 1103.0, ms_per_million: 912.0 },
    TreeRow { tree: 11, total: 1318700, true_wood: 508514, false_wood: 1065, true_leaf: 754751, false_leaf: 54370, oa: 0.9579, kappa: 0.9130, mcc: 0.9162, time_ms: 2456.0, ms_per_million: 1863.0 },
    TreeRow { tree: 12, total: 742280, true_wood: 140832, false_wood: 1491, true_leaf: 547082, false_leaf: 52875, oa: 0.9267, kappa: 0.7923, mcc: 0.8080, time_ms: 917.0, ms_per_million: 1236.0 },
    TreeRow { tree: 13, total: 203303, true_wood: 8801, false_wood: 37, true_leaf: 189965, false_leaf: 4500, oa: 0.9776, kappa: 0.7837, mcc: 0.8021, time_ms: 506.0, ms_per_million: 2489.0 },
    TreeRow { tree: 14, total: 1896619, true_wood: 420063, false_wood: 7086, true_leaf: 1407001, false_leaf: 62469, oa: 0.9633, kappa: 0.8995, mcc: 0.9024, time_ms: 2981.0, ms_per_million: 1572.0 },
    TreeRow { tree: 15, total: 1080397, true_wood: 88755, false_wood: 1962, true_leaf: 969166, false_leaf: 20514, oa: 0.9792, kappa: 0.8762, mcc: 0.8808, time_ms: 990.0, ms_per_million: 917.0 },
    TreeRow { tree: 16, total: 980776, true_wood: 66944, false_wood: 184, true_leaf: 901368, false_leaf: 12280, oa: 0.9872, kappa: 0.9080, mcc: 0.9116, time_ms: 880.0, ms_per_million: 898.0 },
    TreeRow { tree: 17, total: 841575, true_wood: 76668, false_wood: 8182, true_leaf: 733275, false_leaf: 23450, oa: 0.9624, kappa: 0.8080, mcc: 0.8115, time_ms: 791.0, ms_per_million: 940.0 },
    TreeRow { tree: 18, total: 1357196, true_wood: 286918, false_wood: 4034, true_leaf: 977493, false_leaf: 88751, oa: 0.9316, kappa: 0.8164, mcc: 0.8281, time_ms: 1789.0, ms_per_million: 1319.0 },
    TreeRow { tree: 19, total: 4925230, true_wood: 1128847, false_wood: 8731, true_leaf: 3587437, false_leaf: 200215, oa: 0.9575, kappa: 0.8872, mcc: 0.8919, time_ms: 12753.0, ms_per_million: 2590.0 },
    TreeRow { tree: 20, total: 1716488, true_wood: 644566, false_wood: 6718, true_leaf: 981870, false_leaf: 83334, oa: 0.9475, kappa: 0.8910, mcc: 0.8949, time_ms: 3517.0, ms_per_million: 2049.0 },
    TreeRow { tree: 21, total: 1275620, true_wood: 179962, false_wood: 4550, true_leaf: 1055309, false_leaf: 35799, oa: 0.9683, kappa: 0.8805, mcc: 0.8843, time_ms: 1334.0, ms_per_million: 1046.0 },
    TreeRow { tree: 22, total: 1301100, true_wood: 150458, false_wood: 1391, true_leaf: 1059025, false_leaf: 90226, oa: 0.9295, kappa: 0.7276, mcc: 0.7544, time_ms: 1392.0, ms_per_million: 1070.0 },
    TreeRow { tree: 23, total: 1315914, true_wood: 279447, false_wood: 3560, true_leaf: 948193, false_leaf: 84714, oa: 0.9329, kappa: 0.8200, mcc: 0.8315, time_ms: 1778.0, ms_per_million: 1352.0 },
    TreeRow { tree: 24, total: 771395, true_wood: 118643, false_wood: 1805, true_leaf: 603828, false_leaf: 47119, oa: 0.9365, kappa: 0.7913, mcc: 0.8065, time_ms: 938.0, ms_per_million: 1216.0 },
];
