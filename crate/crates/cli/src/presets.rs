//! Built-in scenarios layered over the defaults.

pub const PRESETS: &[(&str, &str)] = &[
    ("table1", ""),
    ("table2-ms10", "[run]\nproblem = A\n[geometry]\nm_x = 5\nm_y = 2\n"),
    ("table2-ms12", "[run]\nproblem = A\n[geometry]\nm_x = 4\nm_y = 3\n"),
    ("table2-ms15", "[run]\nproblem = A\n[geometry]\nm_x = 5\nm_y = 3\n"),
    ("table3-ms20", "[run]\nproblem = A\ntrials = 1000\n[geometry]\nm_x = 5\nm_y = 4\n"),
    ("table4-ms10", "[run]\nproblem = B\ngamma_0 = 20 dB\n[geometry]\nm_x = 5\nm_y = 2\n"),
    ("fig7-15x15", "[geometry]\nm_x = 15\nm_y = 15\n"),
    ("fig7-30x30", "[geometry]\nm_x = 30\nm_y = 30\n"),
];

pub fn preset(name: &str) -> Result<&'static str, String> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t).ok_or_else(|| {
        format!(
            "unknown preset '{name}'; available presets: {}",
            PRESETS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        )
    })
}
