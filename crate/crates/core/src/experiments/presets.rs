//! Shipped experiment configs.

/// `(name, config JSON)`; each preset writes to an output directory named after itself.
pub const PRESETS: [(&str, &str); 5] = [
    (
        "corexample_h2",
        include_str!("../../presets/corexample_h2.json"),
    ),
    (
        "fatou_scalar",
        include_str!("../../presets/fatou_scalar.json"),
    ),
    (
        "dirichlet_disk_e2",
        include_str!("../../presets/dirichlet_disk_e2.json"),
    ),
    (
        "tube_two_arc",
        include_str!("../../presets/tube_two_arc.json"),
    ),
    (
        "barycenter_suite",
        include_str!("../../presets/barycenter_suite.json"),
    ),
];

/// Config text of a preset by name.
pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
