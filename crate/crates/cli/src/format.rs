//! Number formatting for console and CSV output.

/// `x` to `digits` significant digits, fixed or scientific like `%g`.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    // round first so 9.999996 becomes 10.0000 rather than 9.99999
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// Console precision.
pub fn short(x: f64) -> String {
    sig(x, 6)
}

/// Full precision for CSV: 17 significant digits.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn short_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| short(*x)).collect();
    format!("({})", parts.join(", "))
}
