//! Failure probabilities of the 3D and 4D Bacon-Shor generalizations.
//!
//! Both reduce to the 2D formulas with squared repetition lengths: the 3D
//! code protects Z with a full horizontal plane (length m^2) and X with a
//! vertical column (length k); the 4D code squares both lengths. The
//! evaluators below call the 2D code path with substituted shapes, so the
//! reductions hold bit for bit.

use crate::bs2d::{failure_report, CodeShape2D, FailureReport, NoiseModel};
use crate::error::{Error, Result};
use crate::optimizer::SearchConfig;
use crate::{bs2d, optimizer};

/// 3D block: horizontal square side `m` (the Z-protecting plane has m^2
/// qubits), vertical extent `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeShape3D {
    m: u64,
    k: u64,
}

impl CodeShape3D {
    pub fn new(m: u64, k: u64) -> Result<Self> {
        for (name, v) in [("m", m), ("k", k)] {
            if v == 0 || v % 2 == 0 {
                return Err(Error::NotOddPositive { name, value: v });
            }
        }
        Ok(CodeShape3D { m, k })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn qubits(&self) -> u64 {
        self.m * self.m * self.k
    }

    /// The 2D shape whose failure formulas this code inherits.
    pub fn equivalent_2d(&self) -> CodeShape2D {
        CodeShape2D::new(self.m * self.m, self.k).expect("odd squared dims stay odd")
    }
}

/// 4D block on an m x m x n x n hypercubic lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeShape4D {
    m: u64,
    n: u64,
}

impl CodeShape4D {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        for (name, v) in [("m", m), ("n", n)] {
            if v == 0 || v % 2 == 0 {
                return Err(Error::NotOddPositive { name, value: v });
            }
        }
        Ok(CodeShape4D { m, n })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn qubits(&self) -> u64 {
        self.m * self.m * self.n * self.n
    }

    pub fn equivalent_2d(&self) -> CodeShape2D {
        CodeShape2D::new(self.m * self.m, self.n * self.n).expect("odd squared dims stay odd")
    }
}

/// `RepFailProb(OddProb(p_z, k), m^2)` and `RepFailProb(OddProb(p_x, m^2), k)`.
pub fn bs3d_fail(noise: &NoiseModel, shape: CodeShape3D) -> Result<FailureReport> {
    failure_report(noise, shape.equivalent_2d())
}

/// `RepFailProb(OddProb(p_z, n^2), m^2)` and `RepFailProb(OddProb(p_x, m^2), n^2)`.
pub fn bs4d_fail(noise: &NoiseModel, shape: CodeShape4D) -> Result<FailureReport> {
    failure_report(noise, shape.equivalent_2d())
}

/// Shape found by the higher-dimensional optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HighDimShape {
    Three(CodeShape3D),
    Four(CodeShape4D),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighDimOptimum {
    pub shape: HighDimShape,
    pub report: FailureReport,
    pub boundary_hit: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Three,
    Four,
}

fn odd_window(center: f64, span: f64, cap: u64) -> (u64, u64) {
    let lo = (center / span).floor().max(1.0) as u64;
    let lo = if lo % 2 == 0 { lo + 1 } else { lo };
    let hi = ((center * span).ceil() as u64).min(cap);
    let hi = if hi % 2 == 0 { hi.saturating_sub(1) } else { hi };
    (lo, hi.max(lo))
}

/// Windowed exhaustive odd-integer search minimizing the combined failure of
/// the chosen dimension's formula. Seeds come from the 2D real-valued
/// optimum with the square-root taken on each squared axis.
pub fn optimize_highdim(
    noise: &NoiseModel,
    dimension: Dimension,
    span_factor: f64,
    max_side: u64,
) -> Result<HighDimOptimum> {
    let cfg2d = SearchConfig::for_noise(noise, span_factor, optimizer::DEFAULT_MAX_DIM)?;
    let (m2d, n2d) = cfg2d.center;

    let (a_center, b_center) = match dimension {
        Dimension::Three => (m2d.sqrt(), n2d),
        Dimension::Four => (m2d.sqrt(), n2d.sqrt()),
    };
    let (a_lo, a_hi) = odd_window(a_center.max(1.0), span_factor, max_side);
    let (b_lo, b_hi) = odd_window(b_center.max(1.0), span_factor, max_side);

    let mut best: Option<(f64, u64, u64, u64)> = None;
    for a in (a_lo..=a_hi).step_by(2) {
        for b in (b_lo..=b_hi).step_by(2) {
            let report = match dimension {
                Dimension::Three => bs3d_fail(noise, CodeShape3D::new(a, b)?)?,
                Dimension::Four => bs4d_fail(noise, CodeShape4D::new(a, b)?)?,
            };
            let qubits = match dimension {
                Dimension::Three => a * a * b,
                Dimension::Four => a * a * b * b,
            };
            let key = (report.combined.ln_value(), qubits, a, b);
            if best.map_or(true, |cur| key < cur) {
                best = Some(key);
            }
        }
    }
    let (_, _, a, b) = best.ok_or_else(|| Error::EmptyWindow {
        detail: "high-dimensional search window is empty".into(),
    })?;

    let (shape, report) = match dimension {
        Dimension::Three => {
            let s = CodeShape3D::new(a, b)?;
            (HighDimShape::Three(s), bs3d_fail(noise, s)?)
        }
        Dimension::Four => {
            let s = CodeShape4D::new(a, b)?;
            (HighDimShape::Four(s), bs4d_fail(noise, s)?)
        }
    };
    let boundary_hit =
        (a == a_lo && a_lo > 1) || a == a_hi || (b == b_lo && b_lo > 1) || b == b_hi;
    Ok(HighDimOptimum {
        shape,
        report,
        boundary_hit,
    })
}
