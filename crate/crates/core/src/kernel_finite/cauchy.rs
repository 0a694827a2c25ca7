//! Cauchy transforms `∫_C E(s)/(s−t) ds` over a vertical line `C`, from a
//! fixed node rule, including points `t` on or next to the line.

use std::f64::consts::PI;

use crate::quad::{CompensatedSum, NodeRule};
use crate::C64;

/// Side of the line on which `t` lies, or from which it is approached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// `∫_C e^{κ(s−t)²}/(s−t) ds` divided by `iπ`.
    fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// Nodes, weights and integrand values of `E` on an upward vertical line.
#[derive(Debug, Clone)]
pub struct LineRule {
    abscissa: f64,
    nodes: Vec<C64>,
    weights: Vec<C64>,
    values: Vec<C64>,
    build_err: f64,
}

impl LineRule {
    pub fn new(abscissa: f64, rule: NodeRule, e: impl Fn(C64) -> C64) -> Self {
        let values = rule.nodes.iter().map(|s| e(*s)).collect();
        LineRule {
            abscissa,
            nodes: rule.nodes,
            weights: rule.weights,
            values,
            build_err: rule.build_err,
        }
    }

    pub fn abscissa(&self) -> f64 {
        self.abscissa
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn build_err(&self) -> f64 {
        self.build_err
    }

    /// `∫_C E(s) ds`.
    pub fn integral(&self) -> C64 {
        let mut acc = CompensatedSum::new();
        for (v, w) in self.values.iter().zip(&self.weights) {
            acc.add(v * w);
        }
        acc.value()
    }

    /// `∫_C E(s) g(s) ds` for another factor `g`.
    pub fn integral_with(&self, g: impl Fn(C64) -> C64) -> C64 {
        let mut acc = CompensatedSum::new();
        for ((s, v), w) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            acc.add(v * g(*s) * w);
        }
        acc.value()
    }

    /// `∫_C E(s)/(s−t) ds` by the plain rule; accurate when `t` is well
    /// separated from the line relative to the local node spacing.
    pub fn cauchy_direct(&self, t: C64) -> C64 {
        let mut acc = CompensatedSum::new();
        for ((s, v), w) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            acc.add(v * w / (s - t));
        }
        acc.value()
    }

    /// `∫_C E(s)/(s−t) ds` for `t` on or near the line, given `e_t = E(t)`.
    /// The Gaussian `e^{(s−t)²/width²}` carries the singular part, whose
    /// line integral is `+iπ` for `t` left of the line and `−iπ` right of
    /// it. `side` is taken as given, so points on the line receive the
    /// boundary value from that side. Far from the line
    /// (`|Re t − c| ≥ 2·width`) the plain rule is used.
    pub fn cauchy(&self, t: C64, e_t: C64, side: Side, width: f64) -> C64 {
        let d = self.abscissa - t.re;
        if d.abs() >= 2.0 * width || !e_t.is_finite() {
            return self.cauchy_direct(t);
        }
        let kappa = 1.0 / (width * width);
        let mut acc = CompensatedSum::new();
        for ((s, v), w) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let u = s - t;
            let g = (kappa * u * u).exp();
            let g = if g.is_finite() { g } else { C64::new(0.0, 0.0) };
            acc.add((v - e_t * g) * w / u);
        }
        acc.value() + C64::new(0.0, side.sign() * PI) * e_t
    }
}
