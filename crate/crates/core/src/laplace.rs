//! Numerical check of the one-dimensional Laplace integrals
//! `b_{l,n} = ∫ x^l exp(-n x^2 eta(x)) dx` with
//! `eta(x) = a1/2 + a3/3! x + b4/4! x^2`, against their leading-order
//! asymptotics in `n`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::asymptotics::AsymptoticConstants;
use crate::error::{Error, Result};

/// Parameters of one integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceSpec {
    pub a1: f64,
    pub a3: f64,
    pub b4: f64,
    pub l: u32,
    pub n: f64,
}

/// Relative accuracy requested from the quadrature.
pub const REL_TOL: f64 = 1e-10;
/// Below this, an integral whose prediction is zero counts as zero.
pub const ZERO_ABS_TOL: f64 = 1e-14;
const MAX_INTERVALS: usize = 4000;

/// `b4 = max(1, 2 a3^2 / (3 a1))`, which always satisfies `3 b4 a1 > a3^2`.
pub fn default_b4(a1: f64, a3: f64) -> f64 {
    (2.0 * a3 * a3 / (3.0 * a1)).max(1.0)
}

impl LaplaceSpec {
    pub fn new(a1: f64, a3: f64, b4: f64, l: u32, n: f64) -> Result<Self> {
        let spec = LaplaceSpec { a1, a3, b4, l, n };
        spec.validate()?;
        Ok(spec)
    }

    /// Coefficients `a1`, `a3` of the model at a given `theta`, with [`default_b4`].
    pub fn from_constants(c: &AsymptoticConstants, l: u32, n: f64) -> Result<Self> {
        LaplaceSpec::new(c.a1, c.a3, default_b4(c.a1, c.a3), l, n)
    }

    fn validate(&self) -> Result<()> {
        let LaplaceSpec { a1, a3, b4, n, .. } = *self;
        if ![a1, a3, b4, n].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("Laplace coefficients must be finite".into()));
        }
        if a1 <= 0.0 || n <= 0.0 {
            return Err(Error::Domain(format!("need a1 > 0 and n > 0, got a1 = {a1}, n = {n}")));
        }
        if 3.0 * b4 * a1 <= a3 * a3 {
            return Err(Error::Domain(format!("need 3 b4 a1 > a3^2, got b4 = {b4}, a1 = {a1}, a3 = {a3}")));
        }
        Ok(())
    }

    /// `d = 2 inf eta`, from the vertex of the quadratic.
    pub fn d(&self) -> f64 {
        self.a1 - self.a3 * self.a3 / (3.0 * self.b4)
    }

    /// Truncation radius with `n d X^2 / 2 = 80`.
    pub fn radius(&self) -> f64 {
        (160.0 / (self.n * self.d())).sqrt()
    }

    /// `f(x) + f(-x)` for the integrand `f`, written so that the odd part
    /// is formed without cancellation.
    fn folded(&self, x: f64) -> f64 {
        let x2 = x * x;
        let even = -self.n * x2 * (self.a1 / 2.0 + self.b4 / 24.0 * x2);
        let c = self.n * self.a3 / 6.0 * x2 * x;
        let power = x.powi(self.l as i32);
        let combo = if self.l.is_multiple_of(2) {
            (even - c).exp() + (even + c).exp()
        } else if c.abs() < 1.0 {
            -2.0 * even.exp() * c.sinh()
        } else {
            (even - c).exp() - (even + c).exp()
        };
        power * combo
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// 15-point Kronrod estimate and its distance to the embedded 7-point Gauss rule.
fn gauss_kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let pair = f(c - h * XGK[k]) + f(c + h * XGK[k]);
        kronrod += WGK[k] * pair;
        if k % 2 == 1 {
            gauss += WG[k / 2] * pair;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive interval halving on the piece with the largest error estimate.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let (value, error) = gauss_kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });
    let (mut total, mut total_err) = (value, error);
    while total_err > rel_tol * total.abs() && total_err > f64::MIN_POSITIVE {
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "{MAX_INTERVALS} subintervals reached, estimate {total:e} with error {total_err:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gauss_kronrod(&f, worst.a, mid);
        let (rv, re) = gauss_kronrod(&f, mid, worst.b);
        heap.push(Piece { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Piece { a: mid, b: worst.b, value: rv, error: re });
        // re-sum to avoid drift from repeated subtraction
        total = crate::diagnostics::sum(heap.iter().map(|p| p.value));
        total_err = heap.iter().map(|p| p.error).sum();
    }
    Ok(total)
}

/// `b_{l,n}` by quadrature over `|x| <= radius`; the tail beyond it is below
/// `exp(-80)` relative to the Gaussian scale.
pub fn b_integral(spec: &LaplaceSpec) -> Result<f64> {
    b_integral_within(spec, spec.radius())
}

/// As [`b_integral`] with an explicit truncation radius.
pub fn b_integral_within(spec: &LaplaceSpec, radius: f64) -> Result<f64> {
    spec.validate()?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("truncation radius must be positive, got {radius}")));
    }
    integrate(|x| spec.folded(x), 0.0, radius, REL_TOL)
}

/// `E Z^k` for standard normal `Z`: `(k-1)!!` for even `k`, zero for odd.
pub fn normal_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    (1..k).step_by(2).map(f64::from).product()
}

/// Leading term of `b_{l,n}`: `-C_l / n^{(l+2)/2}` for odd `l` and
/// `D_l / n^{(l+1)/2}` for even `l`, where
/// `C_l = a3/3! sqrt(2 pi / a1^{l+4}) E Z^{l+3}` and
/// `D_l = sqrt(2 pi / a1^{l+1}) E Z^l`.
pub fn asymptotic_prediction(spec: &LaplaceSpec) -> f64 {
    let tau = std::f64::consts::TAU;
    let l = spec.l;
    if l % 2 == 1 {
        let c = spec.a3 / 6.0 * (tau / spec.a1.powi(l as i32 + 4)).sqrt() * normal_moment(l + 3);
        -c / spec.n.powf(f64::from(l + 2) / 2.0)
    } else {
        let d = (tau / spec.a1.powi(l as i32 + 1)).sqrt() * normal_moment(l);
        d / spec.n.powf(f64::from(l + 1) / 2.0)
    }
}

/// One row of a convergence table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub l: u32,
    pub n: f64,
    pub integral: f64,
    pub prediction: f64,
    /// `None` when the prediction is exactly zero.
    pub ratio: Option<f64>,
}

pub fn convergence_check(a1: f64, a3: f64, b4: f64, l: u32, n_grid: &[f64]) -> Result<Vec<ConvergenceRow>> {
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Input("n grid must be strictly increasing".into()));
    }
    n_grid
        .iter()
        .map(|&n| {
            let spec = LaplaceSpec::new(a1, a3, b4, l, n)?;
            let integral = b_integral(&spec)?;
            let prediction = asymptotic_prediction(&spec);
            let ratio = (prediction != 0.0).then(|| integral / prediction);
            Ok(ConvergenceRow { l, n, integral, prediction, ratio })
        })
        .collect()
}

/// The convergence contract on a table: `|ratio - 1|` strictly decreasing
/// along the grid and at most `tol` on its last row. Rows with a zero
/// prediction instead need `|integral| < ZERO_ABS_TOL`.
pub fn table_converges(rows: &[ConvergenceRow], tol: f64) -> bool {
    let mut last_gap = f64::INFINITY;
    for row in rows {
        match row.ratio {
            None => {
                if row.integral.abs() >= ZERO_ABS_TOL {
                    return false;
                }
            }
            Some(r) => {
                let gap = (r - 1.0).abs();
                if gap >= last_gap {
                    return false;
                }
                last_gap = gap;
            }
        }
    }
    match rows.last() {
        Some(ConvergenceRow { ratio: Some(r), .. }) => (r - 1.0).abs() <= tol,
        Some(_) => true,
        None => false,
    }
}
