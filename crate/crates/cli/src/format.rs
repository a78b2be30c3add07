//! Number formatting shared by every output.

/// Report values: 12 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Data values: shortest representation that parses back to the same bits.
pub fn exact(x: f64) -> String {
    format!("{x:e}")
}

/// Percentage with one decimal, for the aligned text tables.
pub fn percent(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}
