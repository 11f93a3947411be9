//! Deviation questions: "how likely is X at least / at most this far from μ?"

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "form", content = "value")]
pub enum Deviation {
    /// `μ ± λ`
    Additive(f64),
    /// `(1 ± δ)μ`
    Multiplicative(f64),
    /// A fixed threshold `t`.
    Absolute(f64),
}

/// The expectation the deviation is measured from. Estimates are allowed by
/// the estimated-expectation extension of the Chernoff bounds: an upper
/// estimate for upper tails, a lower estimate for lower tails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "mu")]
pub enum Reference {
    Exact(f64),
    UpperEstimate(f64),
    LowerEstimate(f64),
}

impl Reference {
    pub fn mu(&self) -> f64 {
        match *self {
            Reference::Exact(m) | Reference::UpperEstimate(m) | Reference::LowerEstimate(m) => m,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailQuery {
    pub direction: Direction,
    pub deviation: Deviation,
    pub reference: Reference,
}

impl TailQuery {
    pub fn new(direction: Direction, deviation: Deviation, reference: Reference) -> Self {
        TailQuery { direction, deviation, reference }
    }

    pub fn upper_mult(mu: f64, delta: f64) -> Self {
        Self::new(Direction::Upper, Deviation::Multiplicative(delta), Reference::Exact(mu))
    }

    pub fn lower_mult(mu: f64, delta: f64) -> Self {
        Self::new(Direction::Lower, Deviation::Multiplicative(delta), Reference::Exact(mu))
    }

    pub fn upper_add(mu: f64, lambda: f64) -> Self {
        Self::new(Direction::Upper, Deviation::Additive(lambda), Reference::Exact(mu))
    }

    pub fn lower_add(mu: f64, lambda: f64) -> Self {
        Self::new(Direction::Lower, Deviation::Additive(lambda), Reference::Exact(mu))
    }

    pub fn upper_abs(mu: f64, t: f64) -> Self {
        Self::new(Direction::Upper, Deviation::Absolute(t), Reference::Exact(mu))
    }

    pub fn lower_abs(mu: f64, t: f64) -> Self {
        Self::new(Direction::Lower, Deviation::Absolute(t), Reference::Exact(mu))
    }

    pub fn with_reference(mut self, r: Reference) -> Self {
        self.reference = r;
        self
    }

    pub fn mu(&self) -> f64 {
        self.reference.mu()
    }

    /// The threshold `t` of the event `X ≥ t` (upper) or `X ≤ t` (lower).
    pub fn threshold(&self) -> f64 {
        let mu = self.mu();
        match (self.direction, self.deviation) {
            (_, Deviation::Absolute(t)) => t,
            (Direction::Upper, Deviation::Additive(l)) => mu + l,
            (Direction::Lower, Deviation::Additive(l)) => mu - l,
            (Direction::Upper, Deviation::Multiplicative(d)) => (1.0 + d) * mu,
            (Direction::Lower, Deviation::Multiplicative(d)) => (1.0 - d) * mu,
        }
    }

    /// Additive distance of the threshold from the reference point (λ).
    pub fn lambda(&self) -> f64 {
        let mu = self.mu();
        match self.direction {
            Direction::Upper => self.threshold() - mu,
            Direction::Lower => mu - self.threshold(),
        }
    }

    /// Relative distance δ = λ/μ (infinite for μ = 0 and λ > 0).
    pub fn delta(&self) -> f64 {
        if let Deviation::Multiplicative(d) = self.deviation {
            return d;
        }
        let mu = self.mu();
        let l = self.lambda();
        if mu == 0.0 {
            if l == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            l / mu
        }
    }

    /// Whether the reference is admissible for this direction: an exact value,
    /// or an estimate on the correct side.
    pub fn reference_matches_direction(&self) -> bool {
        matches!(
            (self.direction, self.reference),
            (_, Reference::Exact(_))
                | (Direction::Upper, Reference::UpperEstimate(_))
                | (Direction::Lower, Reference::LowerEstimate(_))
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert_eq!(TailQuery::upper_mult(10.0, 0.2).threshold(), 12.0);
        assert_eq!(TailQuery::lower_mult(10.0, 0.5).threshold(), 5.0);
        assert_eq!(TailQuery::upper_add(10.0, 3.0).threshold(), 13.0);
        assert_eq!(TailQuery::lower_abs(10.0, 4.0).lambda(), 6.0);
        assert!((TailQuery::upper_abs(10.0, 15.0).delta() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn estimate_sides() {
        let q = TailQuery::upper_mult(1.0, 1.0);
        assert!(q.with_reference(Reference::UpperEstimate(2.0)).reference_matches_direction());
        assert!(!q.with_reference(Reference::LowerEstimate(2.0)).reference_matches_direction());
    }
}
