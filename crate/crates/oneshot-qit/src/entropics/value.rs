use serde::Serialize;

/// An entropic quantity in bits together with a certified bracket.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EntropicValue {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub eps: f64,
}

/// Certificate width attached to quantities computed by direct spectral
/// routes (threshold testers, exact D_max); dominated by eigensolver
/// accuracy, far below any acceptance tolerance in use.
pub const SPECTRAL_CERT: f64 = 1e-9;

impl EntropicValue {
    /// Exact-route value with a symmetric spectral certificate.
    pub fn spectral(value: f64, eps: f64) -> Self {
        if value.is_infinite() {
            return Self {
                value,
                lower: value,
                upper: value,
                eps,
            };
        }
        let w = SPECTRAL_CERT * (1.0 + value.abs());
        Self {
            value,
            lower: value - w,
            upper: value + w,
            eps,
        }
    }

    /// Bracketed value from a bisection: the reported value is the bracket
    /// midpoint.
    pub fn bracketed(lower: f64, upper: f64, eps: f64) -> Self {
        Self {
            value: 0.5 * (lower + upper),
            lower,
            upper,
            eps,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}
