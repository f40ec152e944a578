use core::f64::consts::PI;
use core::fmt;
use core::ops::Neg;

use alloc::string::String;

use crate::model::ModelParams;

/// Name of the step-time symbol in pulse programs.
pub const STEP_SYMBOL: &str = "Delta_t";

/// An integer combination `(a·m + b·J + c·w)·Δt`.
///
/// Every angle the compiler produces from the model couplings has this
/// form, which lets the pulse printer emit the same symbolic labels as a
/// hand-written pulse table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SymbolicAngle {
    pub mass: i32,
    pub field: i32,
    pub hopping: i32,
}

impl SymbolicAngle {
    pub const fn new(mass: i32, field: i32, hopping: i32) -> Self {
        Self {
            mass,
            field,
            hopping,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mass == 0 && self.field == 0 && self.hopping == 0
    }

    pub fn evaluate(&self, params: &ModelParams, step: f64) -> f64 {
        (self.mass as f64 * params.m + self.field as f64 * params.j + self.hopping as f64 * params.w)
            * step
    }

    fn terms(&self) -> impl Iterator<Item = (i32, &'static str)> {
        [(self.mass, "m"), (self.field, "J"), (self.hopping, "w")]
            .into_iter()
            .filter(|(c, _)| *c != 0)
    }
}

impl Neg for SymbolicAngle {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.mass, -self.field, -self.hopping)
    }
}

/// Renders `(2m+2J)Delta_t`, `J Delta_t`, `-2m Delta_t` or `0`.
impl fmt::Display for SymbolicAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let count = self.terms().count();
        if count == 0 {
            return f.write_str("0");
        }
        let mut body = String::new();
        for (k, (c, name)) in self.terms().enumerate() {
            if c < 0 {
                body.push('-');
            } else if k > 0 {
                body.push('+');
            }
            if c.abs() != 1 {
                body.push_str(&alloc::format!("{}", c.abs()));
            }
            body.push_str(name);
        }
        if count == 1 {
            write!(f, "{body} {STEP_SYMBOL}")
        } else {
            write!(f, "({body}){STEP_SYMBOL}")
        }
    }
}

/// A gate angle in radians with an optional symbolic origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle {
    pub radians: f64,
    pub symbol: Option<SymbolicAngle>,
}

impl Angle {
    pub const fn numeric(radians: f64) -> Self {
        Self {
            radians,
            symbol: None,
        }
    }

    pub fn symbolic(symbol: SymbolicAngle, params: &ModelParams, step: f64) -> Self {
        Self {
            radians: symbol.evaluate(params, step),
            symbol: Some(symbol),
        }
    }
}

impl Neg for Angle {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            radians: -self.radians,
            symbol: self.symbol.map(|s| -s),
        }
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Self::numeric(radians)
    }
}

/// Formats radians as a short multiple of π when possible (`pi/2`,
/// `-pi`, `1.5pi`, `0.07pi`), otherwise as a plain number.
pub fn format_radians(x: f64) -> String {
    if x == 0.0 {
        return String::from("0");
    }
    let k = x / PI;
    let thousandths = libm::round(k * 1000.0);
    if (k * 1000.0 - thousandths).abs() > 1e-9 {
        return alloc::format!("{x}");
    }
    let sign = if k < 0.0 { "-" } else { "" };
    let mag = thousandths.abs();
    if mag == 1000.0 {
        return alloc::format!("{sign}pi");
    }
    if mag == 500.0 {
        return alloc::format!("{sign}pi/2");
    }
    if mag == 250.0 {
        return alloc::format!("{sign}pi/4");
    }
    alloc::format!("{sign}{}pi", mag / 1000.0)
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.symbol {
            Some(s) => write!(f, "{s}"),
            None => f.write_str(&format_radians(self.radians)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn symbolic_labels() {
        assert_eq!(SymbolicAngle::new(2, 2, 0).to_string(), "(2m+2J)Delta_t");
        assert_eq!(SymbolicAngle::new(0, 1, 0).to_string(), "J Delta_t");
        assert_eq!(SymbolicAngle::new(2, 1, 0).to_string(), "(2m+J)Delta_t");
        assert_eq!(SymbolicAngle::new(-2, 0, 0).to_string(), "-2m Delta_t");
        assert_eq!(SymbolicAngle::new(-2, -1, 0).to_string(), "(-2m-J)Delta_t");
        assert_eq!(SymbolicAngle::default().to_string(), "0");
    }

    #[test]
    fn radian_labels() {
        assert_eq!(format_radians(PI), "pi");
        assert_eq!(format_radians(-PI / 2.0), "-pi/2");
        assert_eq!(format_radians(1.5 * PI), "1.5pi");
        assert_eq!(format_radians(0.07 * PI), "0.07pi");
        assert_eq!(format_radians(0.3), "0.3");
    }
}
