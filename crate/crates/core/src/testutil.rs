use crate::cfg::Cfg;

/// Five-block sample graph with node types 02, 12, 21, 11, 20 on nodes 0..=4.
pub fn sample_cfg() -> Cfg {
    Cfg::from_edges("sample", [(0, 1), (0, 2), (1, 2), (1, 4), (2, 3), (3, 4)]).unwrap()
}

/// Hand-listed features of [`sample_cfg`], missing the 4-gram `12|21|11|20`.
pub fn sample_table() -> [&'static str; 19] {
    [
        "02",
        "12",
        "21",
        "11",
        "20",
        "02|12",
        "02|21",
        "12|21",
        "12|20",
        "21|11",
        "11|20",
        "02|12|21",
        "02|12|20",
        "02|21|11",
        "12|21|11",
        "21|11|20",
        "02|12|21|11",
        "02|21|11|20",
        "02|12|21|11|20",
    ]
}
